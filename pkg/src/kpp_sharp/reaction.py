"""Perturbed logistic reaction and its phase ODE.

The reaction entering the generation analysis is f_delta(u) = f(u) + delta
where f is the odd extension of u(1-u) from u >= 0, i.e. f(u) = u(1-|u|).
f is C1 with f'(u) = 1 - 2|u| (the second derivative jumps at u = 0; the
adaptive integrator below handles the crossing with its local error
control).  For |delta| below delta0, f_delta keeps three transversal zeros
a_minus < a < a_plus near -1, 0, 1, and the layer-generation comparators
are built from the flow Y(tau, xi) of dY/dtau = f_delta(Y) together with
its first two derivatives in xi, which obey the variational equations

    (Y_xi)'   = f_delta'(Y) Y_xi,            Y_xi(0)   = 1,
    (Y_xixi)' = f_delta''(Y) Y_xi^2 + f_delta'(Y) Y_xixi, Y_xixi(0) = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

DELTA0_DEFAULT = 0.1


@dataclass(frozen=True)
class ReactionZeros:
    """Zeros a_minus < a < a_plus of f_delta and the slope mu = f'(a)."""

    a_minus: float
    a: float
    a_plus: float
    mu: float


@dataclass(frozen=True)
class PerturbedReaction:
    """f_delta(u) = u(1 - |u|) + delta with |delta| < delta0."""

    delta: float
    delta0: float = DELTA0_DEFAULT

    def __post_init__(self):
        if not (0 < self.delta0 <= 0.2):
            raise ValueError("delta0 must lie in (0, 0.2]")
        if abs(self.delta) >= self.delta0:
            raise ValueError(
                f"|delta| = {abs(self.delta):g} must be below delta0 = {self.delta0:g}")

    def f(self, u):
        u = np.asarray(u, dtype=float)
        return u * (1.0 - np.abs(u)) + self.delta

    def df(self, u):
        u = np.asarray(u, dtype=float)
        return 1.0 - 2.0 * np.abs(u)

    def d2f(self, u):
        u = np.asarray(u, dtype=float)
        return -2.0 * np.sign(u)


def reaction_zeros(delta: float, delta0: float = DELTA0_DEFAULT) -> ReactionZeros:
    """Locate the three zeros of f_delta by bracketed root finding.

    Brackets [-2, -1/2], [-1/2, 1/2], [1/2, 2] are sign-definite for every
    |delta| < delta0 <= 0.2; each zero is resolved to 1e-12.
    """
    r = PerturbedReaction(delta, delta0)
    scalar_f = lambda u: float(r.f(u))
    a_minus = brentq(scalar_f, -2.0, -0.5, xtol=1e-14, rtol=8.9e-16)
    a_mid = brentq(scalar_f, -0.5, 0.5, xtol=1e-14, rtol=8.9e-16)
    a_plus = brentq(scalar_f, 0.5, 2.0, xtol=1e-14, rtol=8.9e-16)
    return ReactionZeros(a_minus, a_mid, a_plus, float(r.df(a_mid)))


def solve_Y(tau: float, xi, delta: float, *, delta0: float = DELTA0_DEFAULT,
            c0: float | None = None, rtol: float = 1e-10, atol: float = 1e-12):
    """Integrate dY/dtau = f_delta(Y) from Y(0) = xi, with xi-derivatives.

    Parameters
    ----------
    tau   : nonnegative stretched time.
    xi    : scalar or array of initial states; when c0 is given every xi
            must lie in (-c0, c0), the window on which the growth bounds
            of the comparator analysis hold.
    delta : reaction shift, |delta| < delta0.

    Returns
    -------
    (Y, Y_xi, Y_xixi) with the shape of xi.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    r = PerturbedReaction(delta, delta0)
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if c0 is not None and np.any(np.abs(xi_arr) >= c0):
        raise ValueError("initial states must lie strictly inside (-c0, c0)")
    n = xi_arr.size
    if tau == 0.0:
        Y, Yx, Yxx = xi_arr.copy(), np.ones(n), np.zeros(n)
    else:
        y0 = np.concatenate([xi_arr, np.ones(n), np.zeros(n)])

        def rhs(_t, y):
            Y, Yx, Yxx = y[:n], y[n:2 * n], y[2 * n:]
            dfv = r.df(Y)
            return np.concatenate([r.f(Y), dfv * Yx,
                                   r.d2f(Y) * Yx * Yx + dfv * Yxx])

        sol = solve_ivp(rhs, (0.0, tau), y0, method="DOP853",
                        rtol=rtol, atol=atol, dense_output=False)
        if not sol.success:      # pragma: no cover - defensive
            raise RuntimeError(f"reaction ODE integration failed: {sol.message}")
        y = sol.y[:, -1]
        Y, Yx, Yxx = y[:n], y[n:2 * n], y[2 * n:]
    if np.isscalar(xi) or np.asarray(xi).ndim == 0:
        return float(Y[0]), float(Yx[0]), float(Yxx[0])
    shp = np.asarray(xi).shape
    return Y.reshape(shp), Yx.reshape(shp), Yxx.reshape(shp)


def logistic_exact(tau: float, xi):
    """Closed form of Y for delta = 0 and xi in [0, 1]: the logistic flow.

    Y = xi e^tau / (1 - xi + xi e^tau), written with e^{-tau} so that
    large tau cannot overflow.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any((xi < 0) | (xi > 1)):
        raise ValueError("the logistic closed form needs xi in [0, 1]")
    em = np.exp(-tau)
    return xi / (xi + (1.0 - xi) * em)
