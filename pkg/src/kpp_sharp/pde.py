"""Finite-volume solver for the drifted degenerate Fisher-KPP equation

    u_t = eps * lap(u^m) - div(u * grad v_eps) + (1/eps) u (1 - u)

on a cell-centered grid with no-flux boundaries (zero total flux through
every boundary face; the chemo drift already vanishes there because its
support is interior).  Time stepping is Strang splitting:

    half reaction -> full transport-diffusion -> half reaction

The reaction substep uses the exact logistic flow, which is monotone and
maps [0, max(1, sup u)] into itself.  The transport-diffusion substep is a
conservative update with donor-cell upwinding of the drift flux and a
centered two-point flux on w = u^m.  Both substeps are monotone in the
cell values whenever dt respects stable_dt, so the discrete comparison
principle holds step by step.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .model import ChemoFieldSpec, Grid, InitialDataSpec, Params, ScalarField

SAFETY = 0.5          # splitting-accuracy cap: dt <= SAFETY * eps
_BOUND_FUDGE = 1e-9   # roundoff allowance in the bound assertions


class CflError(RuntimeError):
    """Raised when a step is attempted with dt above the stability bound."""


@dataclass
class PdeState:
    """Solution state plus the coefficients needed to advance it."""

    params: Params
    chemo: ChemoFieldSpec
    field: ScalarField
    t: float = 0.0
    reaction: bool = True
    u0_sup: float = dc_field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.u0_sup is None:
            self.u0_sup = float(self.field.values.max(initial=0.0))
        if self.field.values.min(initial=0.0) < 0.0:
            raise ValueError("initial field must be nonnegative")
        self._static_chemo = all(
            b.envelope == "const"
            for b in self.chemo.base_terms + self.chemo.perturbation_terms)
        self._face_cache = None
        # drift concentration pushes interior maxima to ~1 + eps |lap v|;
        # the hard bound asserted after every step allows exactly for that
        _, lap_sup = self.chemo.sup_bounds(
            (0.0, 0.5 * self.params.T, self.params.T),
            self.field.grid, self.params.epsilon)
        self.lap_sup = lap_sup
        self.bound_cap = (max(1.0, self.u0_sup)
                          + 1.5 * self.params.epsilon * lap_sup + _BOUND_FUDGE)

    def copy(self) -> "PdeState":
        st = PdeState(self.params, self.chemo, self.field.copy(), self.t,
                      self.reaction, self.u0_sup)
        return st

    # -- face velocities -------------------------------------------------
    def _face_points(self):
        g = self.field.grid
        if g.ndim == 1:
            xs = g.domain.lo[0] + np.arange(1, g.shape[0]) * g.dx[0]
            return (xs[:, None],)
        xs, ys = g.axis_centers(0), g.axis_centers(1)
        fx = g.domain.lo[0] + np.arange(1, g.shape[1]) * g.dx[0]
        fy = g.domain.lo[1] + np.arange(1, g.shape[0]) * g.dx[1]
        X, Y = np.meshgrid(fx, ys)
        px = np.stack([X, Y], axis=-1)              # vertical interior faces
        X, Y = np.meshgrid(xs, fy)
        py = np.stack([X, Y], axis=-1)              # horizontal interior faces
        return px, py

    def face_velocities(self, t: float):
        """Normal drift speed grad v_eps at interior faces, per axis."""
        if self._static_chemo and self._face_cache is not None:
            return self._face_cache
        eps = self.params.epsilon
        pts = self._face_points()
        if self.field.grid.ndim == 1:
            _, gdx, _ = self.chemo.eval_eps(t, pts[0], eps)
            vel = (gdx[:, 0],)
        else:
            _, gx, _ = self.chemo.eval_eps(t, pts[0], eps)
            _, gy, _ = self.chemo.eval_eps(t, pts[1], eps)
            vel = (gx[..., 0], gy[..., 1])
        if self._static_chemo:
            self._face_cache = vel
        return vel


def stable_dt(state: PdeState) -> float:
    """Largest safe step for the current state.

    Diffusion and advection each give a parabolic/CFL bound

        dt_diff = h^2 / (2 N eps m u_max^{m-1}),   dt_adv = h / (2 N |grad v|max);

    their harmonic combination keeps the monotonicity coefficient of the
    combined update nonnegative even when both mechanisms act in the same
    cell, and is capped by the splitting-accuracy bound SAFETY * eps.  The
    result always satisfies dt <= min(dt_diff, dt_adv, SAFETY * eps).
    """
    p = state.params
    g = state.field.grid
    h = g.min_dx()
    ndim = g.ndim
    u_max = float(state.field.values.max(initial=0.0))
    inv = 0.0
    if u_max > 0.0:
        inv += (2.0 * ndim * p.epsilon * p.m * u_max ** (p.m - 1.0)) / h**2
    vmax = max((float(np.abs(v).max(initial=0.0))
                for v in state.face_velocities(state.t)), default=0.0)
    if vmax > 0.0:
        inv += (2.0 * ndim * vmax) / h
    grid_dt = 1.0 / inv if inv > 0.0 else np.inf
    return float(min(grid_dt, SAFETY * p.epsilon))


def _logistic_half(u: np.ndarray, dt_half: float, eps: float) -> np.ndarray:
    # exact flow of u' = u(1-u)/eps over dt_half, stable for large exponents
    e = np.exp(-dt_half / eps)
    return u / (u + (1.0 - u) * e)


def _transport_diffusion(u: np.ndarray, vel, dt: float, eps: float, m: float,
                         dx) -> np.ndarray:
    w = u**m
    if u.ndim == 1:
        a = vel[0]
        ap, am = np.maximum(a, 0.0), np.minimum(a, 0.0)
        flux = ap * u[:-1] + am * u[1:] - eps * (w[1:] - w[:-1]) / dx[0]
        out = u.copy()
        out[:-1] -= dt / dx[0] * flux
        out[1:] += dt / dx[0] * flux
        return out
    ax, ay = vel
    out = u.copy()
    apx, amx = np.maximum(ax, 0.0), np.minimum(ax, 0.0)
    fx = apx * u[:, :-1] + amx * u[:, 1:] - eps * (w[:, 1:] - w[:, :-1]) / dx[0]
    out[:, :-1] -= dt / dx[0] * fx
    out[:, 1:] += dt / dx[0] * fx
    apy, amy = np.maximum(ay, 0.0), np.minimum(ay, 0.0)
    fy = apy * u[:-1, :] + amy * u[1:, :] - eps * (w[1:, :] - w[:-1, :]) / dx[1]
    out[:-1, :] -= dt / dx[1] * fy
    out[1:, :] += dt / dx[1] * fy
    return out


def step(state: PdeState, dt: float) -> None:
    """Advance the state by one Strang step of size dt, in place.

    Raises CflError when dt exceeds the current stable_dt, and asserts the
    a-priori bounds 0 <= u <= max(1, sup u0) + O(eps |lap v|) afterwards
    rather than clamping from above.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    limit = stable_dt(state)
    if dt > limit * (1.0 + 1e-9):
        p, g = state.params, state.field.grid
        h = g.min_dx()
        u_max = float(state.field.values.max(initial=0.0))
        diff = (h**2 / (2 * g.ndim * p.epsilon * p.m * u_max ** (p.m - 1))
                if u_max > 0 else np.inf)
        name = "diffusion" if diff <= SAFETY * p.epsilon else "splitting"
        vmax = max((float(np.abs(v).max(initial=0.0))
                    for v in state.face_velocities(state.t)), default=0.0)
        if vmax > 0 and h / (2 * g.ndim * vmax) < diff:
            name = "advection"
        raise CflError(
            f"dt = {dt:g} exceeds the {name} bound stable_dt = {limit:g}")

    p = state.params
    u = state.field.values
    if state.reaction:
        u = _logistic_half(u, 0.5 * dt, p.epsilon)
    vel = state.face_velocities(state.t + 0.5 * dt)
    u = _transport_diffusion(u, vel, dt, p.epsilon, p.m,
                             state.field.grid.dx)
    if state.reaction:
        u = _logistic_half(u, 0.5 * dt, p.epsilon)

    if u.min() < -_BOUND_FUDGE:
        raise AssertionError(f"positivity violated: min u = {u.min():g}")
    np.maximum(u, 0.0, out=u)          # roundoff-level negatives only
    if u.max(initial=0.0) > state.bound_cap:
        raise AssertionError(
            f"upper bound violated: max u = {u.max():g} > {state.bound_cap:g}")
    state.field.values = u
    state.t += dt


@dataclass
class Snapshot:
    t: float
    field: ScalarField
    mass: float
    u_min: float
    u_max: float


@dataclass
class SimResult:
    grid: Grid
    params: Params
    snapshots: list

    def at(self, t: float) -> Snapshot:
        k = int(np.argmin([abs(s.t - t) for s in self.snapshots]))
        s = self.snapshots[k]
        if abs(s.t - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t = {t:g}")
        return s


def mass(field: ScalarField) -> float:
    return float(field.values.sum() * np.prod(field.grid.dx))


def simulate(params: Params, chemo: ChemoFieldSpec, initial: InitialDataSpec,
             grid: Grid, times=None, reaction: bool = True,
             t_end: float | None = None) -> SimResult:
    """Integrate from u0 with adaptive dt = stable_dt, snapshotting.

    Snapshot times always include the generation time t_gen = eps |ln eps|
    and the final time; each is hit exactly by shortening the last step.
    """
    initial.validate_inside(params.domain)
    if initial.min_boundary_slope() <= 0:      # pragma: no cover - family guarantees
        raise ValueError("initial datum must leave its support transversally")
    u0 = ScalarField(grid, initial.eval(grid.centers()))
    state = PdeState(params, chemo, u0, 0.0, reaction)
    T = params.T if t_end is None else t_end
    want = {round(float(t), 12) for t in (times or [])}
    want |= {round(min(params.t_gen, T), 12), round(T, 12), 0.0}
    want = sorted(t for t in want if 0.0 <= t <= T + 1e-12)

    snaps = []

    def record():
        f = state.field
        snaps.append(Snapshot(state.t, f.copy(), mass(f),
                              float(f.values.min()), float(f.values.max())))

    if want and want[0] == 0.0:
        record()
        want = want[1:]
    for target in want:
        while state.t < target - 1e-13:
            dt = min(stable_dt(state), target - state.t)
            try:
                step(state, dt)
            except CflError:
                # reaction growth within the substep can shave the margin
                step(state, 0.5 * dt)
        state.t = target
        record()
    return SimResult(grid, params, snaps)


def extract_level_set(field: ScalarField, level: float) -> np.ndarray:
    """Points where the grid function crosses the level, shape (k, ndim).

    Crossings are located by linear interpolation along grid edges between
    adjacent cell centers.
    """
    u = field.values
    g = field.grid
    s = u - level
    pts = []
    if g.ndim == 1:
        xs = g.axis_centers(0)
        mask = s[:-1] * s[1:] < 0.0
        idx = np.nonzero(mask)[0]
        th = s[idx] / (s[idx] - s[idx + 1])
        pts.append((xs[idx] + th * g.dx[0])[:, None])
        on = np.nonzero(s == 0.0)[0]
        if on.size:
            pts.append(xs[on][:, None])
        return np.vstack(pts) if pts else np.empty((0, 1))
    xs, ys = g.axis_centers(0), g.axis_centers(1)
    mx = s[:, :-1] * s[:, 1:] < 0.0
    j, i = np.nonzero(mx)
    th = s[j, i] / (s[j, i] - s[j, i + 1])
    pts.append(np.stack([xs[i] + th * g.dx[0], ys[j]], axis=1))
    my = s[:-1, :] * s[1:, :] < 0.0
    j, i = np.nonzero(my)
    th = s[j, i] / (s[j, i] - s[j + 1, i])
    pts.append(np.stack([xs[i], ys[j] + th * g.dx[1]], axis=1))
    out = np.vstack([p for p in pts if p.size])
    return out if out.size else np.empty((0, 2))


def layer_thickness(field: ScalarField, eta: float) -> float:
    """Width of the transition layer: Hausdorff gap between the eta and
    1 - eta level sets of the field."""
    if not (0 < eta < 0.5):
        raise ValueError("eta must lie in (0, 1/2)")
    lo = extract_level_set(field, eta)
    hi = extract_level_set(field, 1.0 - eta)
    if len(lo) == 0 or len(hi) == 0:
        raise ValueError("layer not developed: a requested level set is empty")
    from .geometry import hausdorff
    return hausdorff(lo, hi)
