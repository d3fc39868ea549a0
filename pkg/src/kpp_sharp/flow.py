"""Lagrangian flow of the chemotactic drift field.

Phi(t1, t2, x3) is the position at time t1 of the characteristic

    dX/dt = grad v(t, X),      X(t2) = x3,

integrated (forward or backward) with fixed-step classical RK4 together
with the variational equation dJ/dt = Hess v(t, X) J for the Jacobian
J = d Phi / d x3.  The chemo field supplies exact gradients and Hessians,
so the only error is the O(dt^4) time discretization.  The identity

    d Phi / d t2 + J grad v(t2, x3) = 0

ties the two derivative routes together and is used as a consistency check
by the test-suite.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import geometry


@dataclass(frozen=True)
class FlowMap:
    """Flow of dX/dt = grad v(t, X) for a field exposing grad/hess.

    field must provide grad_base(t, x) and hess_base(t, x) for x of shape
    (..., ndim); ChemoFieldSpec does.  dt_flow is the RK4 step.
    """

    field: object
    dt_flow: float = 1e-3

    def __post_init__(self):
        if self.dt_flow <= 0:
            raise ValueError("flow step dt_flow must be positive")


def advance_flow(flow: FlowMap, t1: float, t2: float, x3: np.ndarray):
    """Return (Phi(t1, t2, x3), d Phi / d x3) for points x3 of shape (..., nd).

    Works for either time direction; t1 == t2 returns the points unchanged
    with identity Jacobians.
    """
    x3 = np.asarray(x3, dtype=float)
    single = x3.ndim == 1
    X = np.atleast_2d(x3).astype(float).copy()
    p, nd = X.shape
    J = np.broadcast_to(np.eye(nd), (p, nd, nd)).copy()
    span = t1 - t2
    if span != 0.0:
        nsteps = max(1, math.ceil(abs(span) / flow.dt_flow))
        h = span / nsteps
        t = t2
        g = flow.field.grad_base
        H = flow.field.hess_base

        def rates(tt, Xc, Jc):
            return g(tt, Xc), np.einsum("pij,pjk->pik", H(tt, Xc), Jc)

        for _ in range(nsteps):
            k1x, k1j = rates(t, X, J)
            k2x, k2j = rates(t + h / 2, X + h / 2 * k1x, J + h / 2 * k1j)
            k3x, k3j = rates(t + h / 2, X + h / 2 * k2x, J + h / 2 * k2j)
            k4x, k4j = rates(t + h, X + h * k3x, J + h * k3j)
            X += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
            J += h / 6 * (k1j + 2 * k2j + 2 * k3j + k4j)
            t += h
    if single:
        return X[0], J[0]
    return X.reshape(x3.shape), J.reshape(x3.shape + (nd,))


@dataclass(frozen=True)
class Interface:
    """Oriented interface: a CCW closed polyline (2D) or two endpoints (1D).

    2D points have shape (n, 2) with no repeated endpoint; 1D points have
    shape (2, 1) ordered [left, right], outward normals (-1, +1).
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (1, 2):
            raise ValueError("interface points must have shape (n, 1) or (n, 2)")
        if pts.shape[1] == 1:
            if pts.shape[0] != 2 or pts[0, 0] >= pts[1, 0]:
                raise ValueError("1D interface is two ordered endpoints")
        else:
            if pts.shape[0] < 8:
                raise ValueError("2D interface needs at least 8 markers")
            pts = geometry.ensure_ccw(pts)
        object.__setattr__(self, "points", pts)

    @property
    def ndim(self) -> int:
        return self.points.shape[1]

    def normals(self) -> np.ndarray:
        if self.ndim == 1:
            return np.array([[-1.0], [1.0]])
        return geometry.outward_normals(self.points)

    def is_simple(self) -> bool:
        return True if self.ndim == 1 else geometry.is_simple(self.points)

    def resampled(self, n: int) -> "Interface":
        if self.ndim == 1:
            return self
        return Interface(geometry.resample_closed(self.points, n))

    def signed_distance(self, x: np.ndarray) -> np.ndarray:
        """Signed distance to the interface, negative on the enclosed side."""
        x = np.asarray(x, dtype=float)
        if self.ndim == 1:
            xl, xr = self.points[0, 0], self.points[1, 0]
            return np.maximum(xl - x[..., 0], x[..., 0] - xr)
        flat = x.reshape(-1, 2)
        return geometry.signed_distance(flat, self.points).reshape(x.shape[:-1])


def drift_interface(flow: FlowMap, interface: Interface, t_gen: float,
                    domain=None) -> Interface:
    """Push every interface marker through the flow over [0, t_gen].

    Returns the drifted interface Phi(t_gen, 0, .) applied markerwise.
    Raises if a marker leaves the domain or, in 2D, if the drifted polyline
    self-intersects (the flow is a diffeomorphism, so either event means
    the discretization is too coarse for the field).
    """
    pts, _ = advance_flow(flow, t_gen, 0.0, interface.points)
    if domain is not None:
        lo = np.asarray(domain.lo)
        hi = np.asarray(domain.hi)
        if np.any(pts < lo) or np.any(pts > hi):
            raise ValueError("drifted interface leaves the domain")
    drifted = Interface(pts)
    if not drifted.is_simple():
        raise ValueError("drifted interface self-intersects")
    return drifted
