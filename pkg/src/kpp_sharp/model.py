"""Problem data for the drifted degenerate Fisher-KPP equation.

The PDE solved elsewhere in this package is

    u_t = eps * lap(u^m) - div(u * grad v_eps) + (1/eps) * u * (1 - u)

on a box with no-flux boundary conditions, where v_eps = v + eps * v1 is a
smooth chemoattractant field and the initial datum u0 is supported on a
convex region strictly inside the box.  This module holds the declarative
description of all of that data: scalar parameters, the chemo field (a sum
of compactly supported smooth bumps with closed-form derivatives), the
initial datum family, and the cell-centered grid / scalar field containers
shared by the solvers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np


# ---------------------------------------------------------------------------
# domain and scalar parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Axis-aligned box [lo_i, hi_i], i < ndim, ndim in {1, 2}."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("domain lo/hi dimension mismatch")
        if len(self.lo) not in (1, 2):
            raise ValueError("only 1D and 2D domains are supported")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("domain must have positive extent")

    @property
    def ndim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple[float, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))


@dataclass(frozen=True)
class Params:
    """Scalar problem parameters.

    epsilon : interface thickness parameter, 0 < epsilon <= 1
    m       : porous-medium exponent, m >= 2
    T       : final time of the propagation window
    eta     : layer tolerance used by the emergence checks, 0 < eta < 1/2
    """

    epsilon: float
    m: float
    T: float
    eta: float
    domain: Domain

    def __post_init__(self):
        if not (0 < self.epsilon <= 1):
            raise ValueError("epsilon must lie in (0, 1]")
        if self.m < 2:
            raise ValueError("porous-medium exponent m must be >= 2")
        if self.T <= 0:
            raise ValueError("final time T must be positive")
        if not (0 < self.eta < 0.5):
            raise ValueError("eta must lie in (0, 1/2)")

    @property
    def t_gen(self) -> float:
        """Generation time eps * |ln eps|."""
        return self.epsilon * abs(math.log(self.epsilon))


# ---------------------------------------------------------------------------
# chemoattractant field: compactly supported smooth bumps
# ---------------------------------------------------------------------------

def _mollifier(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value and first two derivatives of g(rho) = exp(-rho/(1-rho)) on [0, 1).

    g is C-infinity on [0, infinity) once extended by zero for rho >= 1,
    with g(0) = 1 and all derivatives vanishing at rho = 1.
    """
    rho = np.asarray(rho, dtype=float)
    inside = rho < 1.0
    # clamp to avoid overflow in the dead branch; results there are zeroed
    r = np.where(inside, rho, 0.5)
    q = 1.0 / (1.0 - r)
    g = np.exp(-r * q)
    dpsi = -q * q            # psi = -rho/(1-rho), psi' = -1/(1-rho)^2
    d2psi = -2.0 * q**3
    dg = g * dpsi
    d2g = g * (dpsi * dpsi + d2psi)
    zero = np.zeros_like(g)
    return (np.where(inside, g, zero),
            np.where(inside, dg, zero),
            np.where(inside, d2g, zero))


@dataclass(frozen=True)
class Bump:
    """One compactly supported bump A * env(t) * g(|x-c|^2 / R^2).

    The spatial profile is the standard mollifier, identically zero for
    |x - c| >= R, so value, gradient, Hessian and Laplacian all have exact
    closed forms and exact compact support.
    """

    amplitude: float
    center: tuple[float, ...]
    radius: float
    envelope: str = "const"       # "const" or "gauss"
    t_center: float = 0.0         # gauss envelope: exp(-((t-t_center)/t_width)^2)
    t_width: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("bump radius must be positive")
        if self.envelope not in ("const", "gauss"):
            raise ValueError(f"unknown envelope kind {self.envelope!r}")
        if self.envelope == "gauss" and self.t_width <= 0:
            raise ValueError("gauss envelope width must be positive")

    def _env(self, t: float) -> float:
        if self.envelope == "const":
            return 1.0
        return math.exp(-((t - self.t_center) / self.t_width) ** 2)

    def eval(self, t: float, x: np.ndarray):
        """Return (value, gradient, hessian) at points x of shape (..., ndim)."""
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.center, dtype=float)
        nd = c.size
        dx = x - c
        r2 = np.sum(dx * dx, axis=-1)
        rho = r2 / self.radius**2
        g, dg, d2g = _mollifier(rho)
        a = self.amplitude * self._env(t)
        grad_rho = 2.0 * dx / self.radius**2
        val = a * g
        grad = a * dg[..., None] * grad_rho
        hess = a * (d2g[..., None, None]
                    * grad_rho[..., :, None] * grad_rho[..., None, :]
                    + dg[..., None, None]
                    * (2.0 / self.radius**2) * np.eye(nd))
        return val, grad, hess


@dataclass(frozen=True)
class ChemoFieldSpec:
    """Chemo field v_eps = v + eps * v1.

    base_terms and perturbation_terms are bump lists for v and v1.  Every
    term must be supported strictly inside the declared ball (center,
    ball_radius); evaluation outside that ball returns exactly zero, which
    keeps all drift terms away from the domain boundary.
    """

    base_terms: tuple[Bump, ...] = ()
    perturbation_terms: tuple[Bump, ...] = ()
    ball_center: tuple[float, ...] = (0.0,)
    ball_radius: float = math.inf

    def __post_init__(self):
        bc = np.asarray(self.ball_center, dtype=float)
        for term in self.base_terms + self.perturbation_terms:
            c = np.asarray(term.center, dtype=float)
            if c.size != bc.size:
                raise ValueError("bump center dimension mismatch")
            if np.linalg.norm(c - bc) + term.radius >= self.ball_radius:
                raise ValueError(
                    "bump support must lie strictly inside the declared ball")

    def _sum(self, terms, t, x):
        x = np.asarray(x, dtype=float)
        nd = x.shape[-1]
        val = np.zeros(x.shape[:-1])
        grad = np.zeros(x.shape[:-1] + (nd,))
        hess = np.zeros(x.shape[:-1] + (nd, nd))
        for term in terms:
            v, g, h = term.eval(t, x)
            val += v
            grad += g
            hess += h
        return val, grad, hess

    def eval_base(self, t: float, x: np.ndarray):
        """(v, grad v, hess v) of the unperturbed field."""
        return self._sum(self.base_terms, t, x)

    def eval_perturbation(self, t: float, x: np.ndarray):
        """(v1, grad v1, hess v1) of the order-eps correction."""
        return self._sum(self.perturbation_terms, t, x)

    def eval_eps(self, t: float, x: np.ndarray, epsilon: float):
        """(v_eps, grad v_eps, hess v_eps) with v_eps = v + eps * v1."""
        v, g, h = self.eval_base(t, x)
        if self.perturbation_terms and epsilon != 0.0:
            v1, g1, h1 = self.eval_perturbation(t, x)
            v = v + epsilon * v1
            g = g + epsilon * g1
            h = h + epsilon * h1
        return v, g, h

    def grad_base(self, t: float, x: np.ndarray) -> np.ndarray:
        """Drift velocity grad v(t, x) used by the Lagrangian flow."""
        return self.eval_base(t, x)[1]

    def hess_base(self, t: float, x: np.ndarray) -> np.ndarray:
        return self.eval_base(t, x)[2]

    def sup_bounds(self, times, grid: "Grid", epsilon: float):
        """Sampled sup of |grad v_eps| and |lap v_eps| over times x grid."""
        pts = grid.centers_flat()
        gmax = lmax = 0.0
        for t in times:
            _, g, h = self.eval_eps(t, pts, epsilon)
            gmax = max(gmax, float(np.linalg.norm(g, axis=-1).max(initial=0.0)))
            lmax = max(lmax, float(np.abs(np.trace(h, axis1=-2, axis2=-1)).max(initial=0.0)))
        return gmax, lmax


def eval_chemo(spec: ChemoFieldSpec, t: float, x: np.ndarray,
               epsilon: float = 0.0):
    """Evaluate (v, grad_v, lap_v) of v_eps = v + eps * v1 at (t, x).

    x has shape (..., ndim).  epsilon = 0 evaluates the base field alone.
    All derivatives are closed forms of the bump family, no differencing.
    """
    v, g, h = spec.eval_eps(t, x, epsilon)
    lap = np.trace(h, axis1=-2, axis2=-1)
    return v, g, lap


# ---------------------------------------------------------------------------
# initial data: positive cap on a convex support, zero outside
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialDataSpec:
    """Initial datum u0 = height * (1 - s(x)) on a convex support.

    s is the scaled ellipse coordinate sum(((x_i - c_i)/r_i)^2); the support
    {s <= 1} is an interval (1D) or a disk/ellipse (2D), convex by
    construction.  u0 vanishes on the support boundary with strictly
    negative outward slope, and is identically zero outside.

    shape  : "interval", "disk" or "ellipse"
    radii  : one radius per axis ("disk"/"interval" use a single value)
    margin : required clearance between the support and the domain boundary
    """

    shape: str
    center: tuple[float, ...]
    radii: tuple[float, ...]
    height: float
    margin: float = 0.0

    def __post_init__(self):
        if self.shape not in ("interval", "disk", "ellipse"):
            raise ValueError(f"unknown initial-data shape {self.shape!r}")
        if self.height <= 0:
            raise ValueError("initial cap height must be positive")
        if any(r <= 0 for r in self.radii):
            raise ValueError("support radii must be positive")
        nd = len(self.center)
        if self.shape == "interval" and nd != 1:
            raise ValueError("interval support is one-dimensional")
        if self.shape in ("disk", "ellipse") and nd != 2:
            raise ValueError("disk/ellipse support is two-dimensional")
        if len(self.radii) != nd:
            raise ValueError("need one support radius per axis")
        if self.shape == "disk" and len(set(self.radii)) != 1:
            raise ValueError("disk radii must be equal")

    def validate_inside(self, domain: Domain) -> None:
        """Check the support sits inside the domain with the given margin."""
        for lo, hi, c, r in zip(domain.lo, domain.hi, self.center, self.radii):
            if c - r - self.margin < lo or c + r + self.margin > hi:
                raise ValueError("initial support violates the domain margin")

    def _s(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.center, dtype=float)
        r = np.asarray(self.radii, dtype=float)
        return np.sum(((x - c) / r) ** 2, axis=-1)

    def eval(self, x: np.ndarray) -> np.ndarray:
        s = self._s(x)
        return np.where(s < 1.0, self.height * (1.0 - s), 0.0)

    def support_distance(self, x: np.ndarray) -> np.ndarray:
        """Euclidean distance from x to the support (0 inside).

        Exact for interval and disk; for an ellipse the distance to the
        boundary is computed by projecting along the gradient of s, which
        is exact to first order and adequate for the band checks it feeds.
        """
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.center, dtype=float)
        if self.shape == "interval":
            d = np.abs(x[..., 0] - c[0]) - self.radii[0]
            return np.maximum(d, 0.0)
        if self.shape == "disk":
            d = np.linalg.norm(x - c, axis=-1) - self.radii[0]
            return np.maximum(d, 0.0)
        # ellipse: first-order projection, s = 1 level set
        s = self._s(x)
        r = np.asarray(self.radii, dtype=float)
        grad = 2.0 * (x - c) / r**2
        gn = np.linalg.norm(grad, axis=-1)
        d = np.where(s > 1.0, (s - 1.0) / np.maximum(gn, 1e-300), 0.0)
        return np.maximum(d, 0.0)

    def boundary_points(self, n: int = 360) -> np.ndarray:
        """n points sampled on the support boundary."""
        c = np.asarray(self.center, dtype=float)
        if self.shape == "interval":
            return np.array([[c[0] - self.radii[0]], [c[0] + self.radii[0]]])
        th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        r = np.asarray(self.radii, dtype=float)
        return c + np.stack([r[0] * np.cos(th), r[1] * np.sin(th)], axis=-1)

    def min_boundary_slope(self, n: int = 360) -> float:
        """min over boundary samples of |du0/dn| (inward one-sided slope)."""
        pts = self.boundary_points(n)
        c = np.asarray(self.center, dtype=float)
        r = np.asarray(self.radii, dtype=float)
        grad = -2.0 * self.height * (pts - c) / r**2   # grad of h(1-s), inside limit
        return float(np.linalg.norm(grad, axis=-1).min())


def eval_initial(spec: InitialDataSpec, x: np.ndarray) -> np.ndarray:
    """Evaluate u0 at points x of shape (..., ndim); exactly 0 outside."""
    return spec.eval(x)


# ---------------------------------------------------------------------------
# grid and field containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Cell-centered uniform grid on a Domain with no-flux boundary tag.

    shape is (nx,) in 1D or (ny, nx) in 2D; values arrays are indexed
    [i] and [j, i] with x the fastest axis, matching row-major dumps.
    """

    domain: Domain
    shape: tuple[int, ...]
    bc: str = "no-flux"

    def __post_init__(self):
        if len(self.shape) != self.domain.ndim:
            raise ValueError("grid rank must match the domain dimension")
        if any(n < 4 for n in self.shape):
            raise ValueError("grid needs at least 4 cells per axis")
        if self.bc != "no-flux":
            raise ValueError("only the no-flux boundary condition is supported")

    @property
    def ndim(self) -> int:
        return self.domain.ndim

    @property
    def dx(self) -> tuple[float, ...]:
        # spacing per axis in x-first order (dx, dy)
        sides = self.domain.sides
        if self.ndim == 1:
            return (sides[0] / self.shape[0],)
        return (sides[0] / self.shape[1], sides[1] / self.shape[0])

    def axis_centers(self, axis: int) -> np.ndarray:
        """Cell centers along physical axis (0 = x, 1 = y)."""
        n = self.shape[0] if self.ndim == 1 else (self.shape[1], self.shape[0])[axis]
        h = self.dx[axis]
        return self.domain.lo[axis] + (np.arange(n) + 0.5) * h

    def centers(self) -> np.ndarray:
        """Cell-center coordinates, shape grid.shape + (ndim,)."""
        if self.ndim == 1:
            return self.axis_centers(0)[:, None]
        xs, ys = self.axis_centers(0), self.axis_centers(1)
        X, Y = np.meshgrid(xs, ys)
        return np.stack([X, Y], axis=-1)

    def centers_flat(self) -> np.ndarray:
        return self.centers().reshape(-1, self.ndim)

    def min_dx(self) -> float:
        return min(self.dx)


@dataclass
class ScalarField:
    """Grid function sampled at cell centers."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError("field values do not match the grid shape")

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def interp(self, x: np.ndarray) -> np.ndarray:
        """Multilinear interpolation at points x, shape (..., ndim)."""
        x = np.asarray(x, dtype=float)
        g = self.grid
        out_shape = x.shape[:-1]
        pts = x.reshape(-1, g.ndim)
        res = np.empty(pts.shape[0])
        if g.ndim == 1:
            xs = g.axis_centers(0)
            res = np.interp(pts[:, 0], xs, self.values)
        else:
            xs, ys = g.axis_centers(0), g.axis_centers(1)
            fx = np.clip((pts[:, 0] - xs[0]) / g.dx[0], 0, len(xs) - 1 - 1e-12)
            fy = np.clip((pts[:, 1] - ys[0]) / g.dx[1], 0, len(ys) - 1 - 1e-12)
            i0, j0 = fx.astype(int), fy.astype(int)
            tx, ty = fx - i0, fy - j0
            V = self.values
            res = ((1 - ty) * ((1 - tx) * V[j0, i0] + tx * V[j0, i0 + 1])
                   + ty * ((1 - tx) * V[j0 + 1, i0] + tx * V[j0 + 1, i0 + 1]))
        return res.reshape(out_shape)
