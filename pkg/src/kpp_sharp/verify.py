"""Theorem-level experiments: analytic sub/super-solutions, residual sign
checks, layer emergence, ordering, and the sharp-interface convergence sweep.

The comparators implemented here sandwich the solution of

    u_t = eps lap(u^m) - div(u grad v_eps) + u(1-u)/eps

during the two phases of the dynamics:

* generation (t <= t_gen = eps |ln eps|): perturbed logistic flows composed
  with the backtracked drift trajectory,
      w_pm(t,x) = [ Y(t/eps, u0(Phi(0,t,x)) +- eps^2 C_G (e^{mu t/eps} - 1);
                    +-eps M) ]_+ ,
  where Y is the reaction flow with the reaction shifted by +-eps M and mu
  is the linearization rate at the shifted unstable zero;

* propagation (t >= t_gen): travelling-wave profiles ridden on the cut-off
  signed distance to the drifted free boundary,
      u_pm(t,x) = (1 +- q(t)) U((d_eps(t,x) -+ eps p(t)) / eps),
      p(t) = -e^{-t/eps} + e^{Lt} + K,
      q(t) = sigma (e^{-t/eps} + eps L e^{Lt}).

All constants are existential in the underlying estimates, so the checks
search small ladders and report the first witness that works.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .config import RunConfig
from .flow import FlowMap, Interface, advance_flow, drift_interface
from .front import CutoffDistanceFn, cutoff_distance, track_front_markers
from .model import ChemoFieldSpec, Grid, InitialDataSpec, Params, ScalarField
from .pde import extract_level_set, layer_thickness, simulate
from .reaction import reaction_zeros, solve_Y
from .wave import WaveProfile, compute_wave


# ---------------------------------------------------------------------------
# generation-phase comparators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenComparators:
    """Constants of the small-time sandwich.

    M scales the reaction shift +-eps M and must dominate the drift
    compression term, M >= C0 sup|lap v_eps|; C_G scales the corrector that
    absorbs the diffusion of u0; M0 is the emergence threshold; K_cvx and
    C_G2 parametrize the finite-speed barrier used near the support.
    """

    M: float
    C_G: float
    M0: float
    K_cvx: float = 1.0
    C_G2: float = 1.0

    def validate(self, lap_sup: float, C0: float = 2.0) -> None:
        if self.M < C0 * lap_sup - 1e-12:
            raise ValueError(
                f"M = {self.M:g} below C0 sup|lap v| = {C0 * lap_sup:g}")
        if self.K_cvx < 1.0:
            raise ValueError("K_cvx must be >= 1")


def eval_gen_comparator(gen: GenComparators, chemo: ChemoFieldSpec,
                        initial: InitialDataSpec, params: Params, sign: int,
                        t: float, x: np.ndarray, *,
                        flow: FlowMap | None = None) -> np.ndarray:
    """w_pm(t, x) for sign = +1 / -1, vectorized over points x."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not (-1e-12 <= t <= params.t_gen * (1 + 1e-9) + 1e-12):
        raise ValueError(f"t = {t:g} outside the generation window "
                         f"[0, {params.t_gen:g}]")
    eps = params.epsilon
    if flow is None:
        flow = FlowMap(chemo)
    y0, _ = advance_flow(flow, 0.0, t, np.asarray(x, dtype=float))
    xi = initial.eval(y0)
    delta = sign * eps * gen.M
    mu = reaction_zeros(delta).mu if delta != 0.0 else 1.0
    tau = t / eps
    shift = eps**2 * gen.C_G * (np.exp(mu * tau) - 1.0)
    Y, _, _ = solve_Y(tau, xi + sign * shift, delta)
    return np.maximum(np.asarray(Y, dtype=float), 0.0)


def default_gen_comparators(cfg: RunConfig, params: Params, grid: Grid,
                            C_G: float | None = None) -> GenComparators:
    _, lap_sup = cfg.chemo.sup_bounds((0.0, params.t_gen / 2, params.t_gen),
                                      grid, params.epsilon)
    M = cfg.verify.M or cfg.verify.C0 * lap_sup
    gen = GenComparators(M=M, C_G=C_G if C_G is not None else cfg.verify.C_G,
                         M0=cfg.verify.m0_ladder[0])
    gen.validate(lap_sup, cfg.verify.C0)
    return gen


@dataclass
class GenerationReport:
    eps: float
    eta: float
    m0_witness: float | None
    bound_ok: bool
    bound_margin: float         # max u - (1 + eta), negative when ok
    inner_worst: float          # min u on the covered region, over best M0
    outer_worst: float          # max u on the excluded region, over best M0
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.m0_witness is not None

    def summary(self) -> list[str]:
        tag = "pass" if self.passed else "FAIL"
        return [f"generation eps={self.eps:g}: {tag} "
                f"(M0={self.m0_witness}, max u - (1+eta) = "
                f"{self.bound_margin:+.2e}, inner min u = {self.inner_worst:.4f}, "
                f"outer max u = {self.outer_worst:.2e}){self.details}"]


def check_generation(cfg: RunConfig, eps_list=None,
                     m0_ladder=None) -> list[GenerationReport]:
    """Emergence of the layers at t_gen for each eps.

    (i) u <= 1 + eta everywhere; (ii) u >= 1 - eta wherever the backtracked
    initial datum exceeds M0 eps; (iii) u <= 1e-10 wherever the backtracked
    point is at distance >= M0 eps from the initial support.  The smallest
    working M0 of the ladder is reported as witness.
    """
    eps_list = tuple(eps_list if eps_list is not None else cfg.sweep.eps)
    m0_ladder = tuple(m0_ladder if m0_ladder is not None
                      else cfg.verify.m0_ladder)
    reports = []
    for eps in eps_list:
        params = cfg.params(eps)
        grid = cfg.grid(eps)
        sim = simulate(params, cfg.chemo, cfg.initial, grid,
                       t_end=params.t_gen)
        u = sim.at(params.t_gen).field.values.reshape(-1)
        flow = FlowMap(cfg.chemo, cfg.verify.dt_flow)
        back, _ = advance_flow(flow, 0.0, params.t_gen, grid.centers_flat())
        u0_back = cfg.initial.eval(back)
        dist_back = cfg.initial.support_distance(back)

        eta = params.eta
        bound_margin = float(u.max() - (1.0 + eta))
        bound_ok = bound_margin <= 1e-12
        witness = None
        inner_worst = np.nan
        outer_worst = np.nan
        detail = ""
        for m0 in m0_ladder:
            inner = u0_back >= m0 * eps
            outer = dist_back >= m0 * eps
            w_in = float(u[inner].min()) if inner.any() else np.inf
            w_out = float(u[outer].max()) if outer.any() else 0.0
            if bound_ok and w_in >= 1.0 - eta and w_out <= 1e-10:
                witness, inner_worst, outer_worst = m0, w_in, w_out
                break
            inner_worst, outer_worst = w_in, w_out
        if witness is None:
            detail = (f"; worst offenders: inner min {inner_worst:.4f}, "
                      f"outer max {outer_worst:.2e}, bound "
                      f"{bound_margin:+.2e}")
        reports.append(GenerationReport(eps, eta, witness, bound_ok,
                                        bound_margin, inner_worst,
                                        outer_worst, detail))
    return reports


@dataclass
class SandwichReport:
    label: str
    rows: list                   # (t, worst_low, worst_high) raw violations
    passed: bool

    def summary(self) -> list[str]:
        out = [f"{self.label}: {'pass' if self.passed else 'FAIL'}"]
        for t, lo, hi in self.rows:
            out.append(f"  t={t:.4f}: lower excess {lo:+.2e}, "
                       f"upper excess {hi:+.2e}")
        return out


def _interp_tolerance(vals: np.ndarray, grid: Grid) -> np.ndarray:
    """Value slack equivalent to a 2h spatial misplacement of a profile."""
    if vals.ndim == 1:
        slope = np.abs(np.gradient(vals, grid.dx[0]))
    else:
        slope = np.abs(np.gradient(vals, grid.dx[0], axis=1)) \
            + np.abs(np.gradient(vals, grid.dx[1], axis=0))
    return 2.0 * grid.min_dx() * slope + 1e-9


def check_generation_sandwich(cfg: RunConfig, eps: float | None = None,
                              gen: GenComparators | None = None,
                              n_times: int = 5,
                              c_g_ladder=(1.0, 2.0, 4.0, 8.0, 16.0)
                              ) -> SandwichReport:
    """w_-(t,.) <= u(t,.) <= w_+(t,.) at n_times points of [0, t_gen]."""
    params = cfg.params(eps)
    grid = cfg.grid(eps)
    times = np.linspace(0.0, params.t_gen, n_times)
    sim = simulate(params, cfg.chemo, cfg.initial, grid, times=list(times),
                   t_end=params.t_gen)
    flow = FlowMap(cfg.chemo, cfg.verify.dt_flow)
    pts = grid.centers_flat()
    ladder = [gen.C_G] if gen is not None else list(c_g_ladder)
    rows, passed = [], False
    for c_g in ladder:
        g = gen if gen is not None else default_gen_comparators(
            cfg, params, grid, C_G=c_g)
        rows = []
        ok = True
        for t in times:
            u = sim.at(t).field.values
            wm = eval_gen_comparator(g, cfg.chemo, cfg.initial, params, -1,
                                     t, pts, flow=flow).reshape(grid.shape)
            wp = eval_gen_comparator(g, cfg.chemo, cfg.initial, params, +1,
                                     t, pts, flow=flow).reshape(grid.shape)
            lo = float((wm - u - _interp_tolerance(wm, grid)).max())
            hi = float((u - wp - _interp_tolerance(wp, grid)).max())
            rows.append((float(t), lo, hi))
            ok &= lo <= 0.0 and hi <= 0.0
        if ok:
            passed = True
            break
    label = f"generation sandwich eps={params.epsilon:g} (C_G={c_g:g})"
    return SandwichReport(label, rows, passed)


# ---------------------------------------------------------------------------
# propagation-phase comparators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropComparators:
    """sigma, K, L of the propagation sandwich; p and q as documented in
    the module docstring."""

    sigma: float
    K: float
    L: float

    def p(self, t, eps: float):
        return -np.exp(-t / eps) + np.exp(self.L * t) + self.K

    def q(self, t, eps: float):
        return self.sigma * (np.exp(-t / eps)
                             + eps * self.L * np.exp(self.L * t))

    def validate(self, D: float, eta: float, cstar: float, m: float) -> None:
        lhs = cstar * (m - 1.0) * D**2 * (1.0 + 2.0 * self.sigma)**(m - 2.0) \
            * self.sigma
        if lhs > 0.5 + 1e-12:
            raise ValueError(f"sigma condition fails: {lhs:.3g} > 1/2 "
                             f"(sigma={self.sigma:g}, D={D:g})")
        if self.sigma > eta / 2.0 + 1e-12:
            raise ValueError(f"sigma = {self.sigma:g} exceeds eta/2")
        if self.K < 1.0:
            raise ValueError("K must be >= 1")
        if self.L <= 0.0:
            raise ValueError("L must be positive")


def interface_from_initial(initial: InitialDataSpec,
                           n_markers: int) -> Interface:
    """The support boundary of u0 as an oriented Interface."""
    if initial.shape == "interval":
        return Interface(initial.boundary_points(2))
    return Interface(initial.boundary_points(n_markers))


@dataclass
class PropagationSetup:
    """Everything the propagation checks share: one simulation, the drifted
    front trajectory, its cut-off distance, and the measured constants."""

    cfg: RunConfig
    params: Params
    grid: Grid
    wave: WaveProfile
    sim: object
    traj: object
    dfn: CutoffDistanceFn
    d0: float
    D: float
    lap_sup: float

    @classmethod
    def build(cls, cfg: RunConfig, eps: float | None = None,
              *, checkpoints=None) -> "PropagationSetup":
        params = cfg.params(eps)
        grid = cfg.grid(eps)
        wave = compute_wave(params.m)
        times = list(checkpoints if checkpoints is not None
                     else cfg.checkpoint_times(params))
        sim = simulate(params, cfg.chemo, cfg.initial, grid, times=times)
        flow = FlowMap(cfg.chemo, cfg.verify.dt_flow)
        gamma0 = interface_from_initial(cfg.initial, cfg.verify.n_markers)
        drifted = drift_interface(flow, gamma0, params.t_gen,
                                  domain=params.domain)
        dt_front = cfg.verify.dt_front or None
        traj = track_front_markers(cfg.chemo, drifted, wave.c, 0.0, params.T,
                                   dt=dt_front, domain=params.domain)
        d0 = cfg.d0()
        dfn = CutoffDistanceFn(traj, d0)
        D = cutoff_distance(traj, 0.5 * params.T, grid, d0).sup_grad_plus_lap()
        _, lap_sup = cfg.chemo.sup_bounds((0.0, params.T / 2, params.T),
                                          grid, params.epsilon)
        return cls(cfg, params, grid, wave, sim, traj, dfn, d0, D, lap_sup)


def prop_comparator(setup: PropagationSetup, pc: PropComparators, sign: int):
    """u_pm(t, x) as a callable; exposes smooth_mask marking the loci the
    finite-difference residual must avoid (support edge, clamp joins)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    eps = setup.params.epsilon
    wave, dfn = setup.wave, setup.dfn

    def u(t, pts):
        d = dfn(t, np.asarray(pts, dtype=float))
        z = (d - sign * eps * pc.p(t, eps)) / eps
        U, _, _ = wave.eval(z)
        return (1.0 + sign * pc.q(t, eps)) * U

    def smooth_mask(t, pts, guard: float = 1e-3):
        pts = np.asarray(pts, dtype=float)
        raw = dfn.raw(t, pts)
        edge = dfn(t, pts) - sign * eps * pc.p(t, eps)
        ok = np.abs(edge) > guard
        for s0 in (dfn.d0, 2.0 * dfn.d0):
            ok &= np.abs(np.abs(raw) - s0) > guard
        return ok

    u.smooth_mask = smooth_mask
    u.pc, u.sign = pc, sign
    return u


# ---------------------------------------------------------------------------
# pointwise PDE residual by Richardson finite differences
# ---------------------------------------------------------------------------

class PdeResidual:
    """L_eps[u] = u_t - eps lap(u^m) + div(u grad v_eps) - u(1-u)/eps
    evaluated pointwise with Richardson-extrapolated central differences of
    the supplied space-time function and exact chemo derivatives."""

    def __init__(self, u_fn, params: Params, chemo: ChemoFieldSpec,
                 h: float = 1e-5):
        self.u_fn = u_fn
        self.params = params
        self.chemo = chemo
        self.h = h

    def __call__(self, t: float, pts: np.ndarray) -> np.ndarray:
        return self.flagged(t, pts)[0]

    def flagged(self, t: float, pts: np.ndarray):
        """(residual values, usable mask) at one time, many points."""
        p, ch, h = self.params, self.chemo, self.h
        eps, m = p.epsilon, p.m
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        nd = pts.shape[1]
        u = lambda tt, pp: np.asarray(self.u_fn(tt, pp), dtype=float)

        def richardson1(f_of_step):
            return (4.0 * f_of_step(h / 2) - f_of_step(h)) / 3.0

        u0 = u(t, pts)
        ut = richardson1(lambda s: (u(t + s, pts) - u(t - s, pts)) / (2 * s))
        w0 = u0**m
        lap_w = np.zeros_like(u0)
        grad_u = []
        for ax in range(nd):
            e = np.zeros(nd)
            e[ax] = 1.0

            def probes(s):
                return u(t, pts + s * e), u(t, pts - s * e)

            up1, um1 = probes(h)
            up2, um2 = probes(h / 2)
            d_h = (up1 - um1) / (2 * h)
            d_h2 = (up2 - um2) / h
            grad_u.append((4.0 * d_h2 - d_h) / 3.0)
            s_h = (up1**m - 2 * w0 + um1**m) / h**2
            s_h2 = (up2**m - 2 * w0 + um2**m) / (h / 2)**2
            lap_w += (4.0 * s_h2 - s_h) / 3.0
        _, gv, hv = ch.eval_eps(t, pts, eps)
        adv = sum(grad_u[ax] * gv[..., ax] for ax in range(nd)) \
            + u0 * np.trace(hv, axis1=-2, axis2=-1)
        resid = ut - eps * lap_w + adv - u0 * (1.0 - u0) / eps
        if hasattr(self.u_fn, "smooth_mask"):
            ok = self.u_fn.smooth_mask(t, pts)
        else:
            ok = np.ones(resid.shape, dtype=bool)
        return resid, ok


def residual_pde(u_fn, params: Params, chemo: ChemoFieldSpec,
                 h: float = 1e-5) -> PdeResidual:
    return PdeResidual(u_fn, params, chemo, h)


# ---------------------------------------------------------------------------
# propagation checks
# ---------------------------------------------------------------------------

def _sample_times_points(setup: PropagationSetup, n: int,
                         rng: np.random.Generator, n_times: int = 20):
    """Sample times in the front window and points enriched near the front."""
    T, tg = setup.params.T, setup.params.t_gen
    t_hi = max(T - tg, 2e-3) * 0.98
    ts = rng.uniform(2e-3, t_hi, n_times)
    lo = np.array(setup.params.domain.lo)
    hi = np.array(setup.params.domain.hi)
    per = max(2, n // n_times)
    out = []
    for t in ts:
        pts = rng.uniform(lo, hi, (per, len(lo)))
        # enrich odd rows toward the band |d| < 2.5 d0 by rejection
        for i in range(1, per, 2):
            for _ in range(50):
                cand = rng.uniform(lo, hi, (1, len(lo)))
                if abs(float(setup.dfn.raw(t, cand)[0])) < 2.5 * setup.d0:
                    pts[i] = cand[0]
                    break
        out.append((float(t), pts))
    return out


@dataclass
class PropReport:
    pc: PropComparators | None
    min_plus: float
    max_minus: float
    tol: float
    n_used: int
    passed: bool
    tried: int = 1
    details: str = ""

    def summary(self) -> list[str]:
        head = "propagation residual signs: " \
            + ("pass" if self.passed else "FAIL")
        body = (f"  witness sigma={getattr(self.pc, 'sigma', None)}, "
                f"K={getattr(self.pc, 'K', None)}, "
                f"L={getattr(self.pc, 'L', None)}; "
                f"min L[u+]={self.min_plus:+.2e}, "
                f"max L[u-]={self.max_minus:+.2e} "
                f"(tol {self.tol:g}, {self.n_used} samples, "
                f"{self.tried} lattice points){self.details}")
        return [head, body]


def _lattice(cfg: RunConfig, setup: PropagationSetup):
    """Feasible (sigma, K, L) triples, strongest sigma first."""
    out = []
    p = setup.params
    for sg in sorted(cfg.verify.sigma_ladder, reverse=True):
        for K in cfg.verify.K_ladder:
            for L in cfg.verify.L_ladder:
                pc = PropComparators(sg, K, L)
                try:
                    pc.validate(setup.D, p.eta, setup.wave.c, p.m)
                except ValueError:
                    continue
                out.append(pc)
    return out


def check_propagation_residuals(cfg: RunConfig, eps: float | None = None,
                                pc: PropComparators | None = None,
                                n_samples: int | None = None,
                                seed: int | None = None,
                                setup: PropagationSetup | None = None
                                ) -> PropReport:
    """Search the comparator lattice until both residual signs hold."""
    if setup is None:
        setup = PropagationSetup.build(cfg, eps)
    rng = np.random.default_rng(cfg.verify.seed if seed is None else seed)
    n = n_samples or cfg.verify.n_samples
    samples = _sample_times_points(setup, n, rng)
    tol = cfg.verify.tol_num
    lattice = [pc] if pc is not None else _lattice(cfg, setup)
    if not lattice:
        return PropReport(None, np.nan, np.nan, tol, 0, False, 0,
                          "; no feasible (sigma, K, L) on the ladders")
    best = None
    for tried, cand in enumerate(lattice, start=1):
        mn_p, mx_m, used = np.inf, -np.inf, 0
        for sign in (+1, -1):
            res = residual_pde(prop_comparator(setup, cand, sign),
                               setup.params, cfg.chemo)
            for t, pts in samples:
                vals, ok = res.flagged(t, pts)
                if not ok.any():
                    continue
                used += int(ok.sum())
                if sign > 0:
                    mn_p = min(mn_p, float(vals[ok].min()))
                else:
                    mx_m = max(mx_m, float(vals[ok].max()))
        rep = PropReport(cand, mn_p, mx_m, tol, used,
                         mn_p >= -tol and mx_m <= tol, tried)
        if rep.passed:
            return rep
        if best is None or (max(-rep.min_plus, rep.max_minus)
                            < max(-best.min_plus, best.max_minus)):
            best = rep
    best.details = "; smallest violation shown"
    return best


@dataclass
class OrderingReport:
    K: float | None
    worst_low: float
    worst_high: float
    where_low: tuple
    where_high: tuple
    passed: bool

    def summary(self) -> list[str]:
        tag = "pass" if self.passed else "FAIL"
        return [f"initial ordering: {tag} (K={self.K}, lower excess "
                f"{self.worst_low:+.2e} at {self.where_low}, upper excess "
                f"{self.worst_high:+.2e} at {self.where_high})"]


def check_ordering(cfg: RunConfig, eps: float | None = None,
                   sigma: float | None = None, L: float | None = None,
                   setup: PropagationSetup | None = None) -> OrderingReport:
    """u_-(0,.) <= u(t_gen,.) <= u_+(0,.) with K raised along the ladder."""
    if setup is None:
        setup = PropagationSetup.build(cfg, eps)
    params, grid = setup.params, setup.grid
    u = setup.sim.at(params.t_gen).field.values
    pts = grid.centers_flat()
    lattice = _lattice(cfg, setup)
    if sigma is None:
        sigma = lattice[0].sigma if lattice else cfg.verify.sigma_ladder[-1]
    if L is None:
        L = min(cfg.verify.L_ladder)
    worst = None
    for K in cfg.verify.K_ladder:
        pc = PropComparators(sigma, K, L)
        up = prop_comparator(setup, pc, +1)(0.0, pts).reshape(grid.shape)
        um = prop_comparator(setup, pc, -1)(0.0, pts).reshape(grid.shape)
        lo_exc = um - u - _interp_tolerance(um, grid)
        hi_exc = u - up - _interp_tolerance(up, grid)
        i_lo = np.unravel_index(np.argmax(lo_exc), lo_exc.shape)
        i_hi = np.unravel_index(np.argmax(hi_exc), hi_exc.shape)
        rep = OrderingReport(K, float(lo_exc[i_lo]), float(hi_exc[i_hi]),
                             tuple(np.round(grid.centers()[i_lo], 4)),
                             tuple(np.round(grid.centers()[i_hi], 4)),
                             float(lo_exc[i_lo]) <= 0.0
                             and float(hi_exc[i_hi]) <= 0.0)
        if rep.passed:
            return rep
        if worst is None or (max(rep.worst_low, rep.worst_high)
                             < max(worst.worst_low, worst.worst_high)):
            worst = rep
    return worst


def check_propagation_sandwich(cfg: RunConfig, eps: float | None = None,
                               pc: PropComparators | None = None,
                               setup: PropagationSetup | None = None
                               ) -> SandwichReport:
    """u_-(t,.) <= u(t + t_gen,.) <= u_+(t,.) at the checkpoint times."""
    if setup is None:
        setup = PropagationSetup.build(cfg, eps)
    params, grid = setup.params, setup.grid
    if pc is None:
        lattice = _lattice(cfg, setup)
        if not lattice:
            return SandwichReport("propagation sandwich", [], False)
        pc = PropComparators(lattice[0].sigma, max(cfg.verify.K_ladder),
                             min(cfg.verify.L_ladder))
    pts = grid.centers_flat()
    rows, ok = [], True
    for t_pde in cfg.checkpoint_times(params):
        t = t_pde - params.t_gen
        if t < 0:
            continue
        try:
            u = setup.sim.at(t_pde).field.values
        except KeyError:
            continue
        up = prop_comparator(setup, pc, +1)(t, pts).reshape(grid.shape)
        um = prop_comparator(setup, pc, -1)(t, pts).reshape(grid.shape)
        lo = float((um - u - _interp_tolerance(um, grid)).max())
        hi = float((u - up - _interp_tolerance(up, grid)).max())
        rows.append((t_pde, lo, hi))
        ok &= lo <= 0.0 and hi <= 0.0
    label = (f"propagation sandwich eps={params.epsilon:g} "
             f"(sigma={pc.sigma:g}, K={pc.K:g}, L={pc.L:g})")
    return SandwichReport(label, rows, ok)


# ---------------------------------------------------------------------------
# convergence sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    eps: float
    t: float
    thickness: float
    hausdorff: float
    m0_witness: float = np.nan
    sigma: float = np.nan
    K: float = np.nan
    L: float = np.nan
    pass_flags: str = ""


@dataclass
class ConvergenceReport:
    rows: list
    thickness_slopes: dict = field(default_factory=dict)
    hausdorff_slopes: dict = field(default_factory=dict)

    def set_witnesses(self, m0=None, sigma=None, K=None, L=None):
        for r in self.rows:
            if m0 is not None:
                r.m0_witness = m0
            if sigma is not None:
                r.sigma = sigma
            if K is not None:
                r.K = K
            if L is not None:
                r.L = L

    def summary(self) -> list[str]:
        out = ["convergence sweep:"]
        for t, s in sorted(self.thickness_slopes.items()):
            out.append(f"  thickness slope at t={t:g}: {s:.3f}")
        for t, s in sorted(self.hausdorff_slopes.items()):
            out.append(f"  hausdorff slope at t={t:g}: {s:.3f}")
        return out


def _hausdorff_to_interface(points: np.ndarray, iface: Interface) -> float:
    if points.shape[1] == 1:
        return geometry.hausdorff(points, iface.points)
    return geometry.hausdorff_points_curve(points, iface.points, closed=True)


def run_sweep(cfg: RunConfig, eps_list=None,
              max_workers: int | None = None) -> ConvergenceReport:
    """Per-eps simulation vs drifted free boundary; slopes of the layer
    thickness and of the 1/2-level Hausdorff distance against eps."""
    eps_list = tuple(eps_list if eps_list is not None else cfg.sweep.eps)
    if len(eps_list) < 3:
        raise ValueError("the sweep needs at least 3 eps values")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must decrease strictly")

    def one(eps: float) -> list[SweepRow]:
        params = cfg.params(eps)
        grid = cfg.grid(eps)
        checkpoints = cfg.checkpoint_times(params)
        sim = simulate(params, cfg.chemo, cfg.initial, grid,
                       times=list(checkpoints))
        wave = compute_wave(params.m)
        flow = FlowMap(cfg.chemo, cfg.verify.dt_flow)
        gamma0 = interface_from_initial(cfg.initial, cfg.verify.n_markers)
        drifted = drift_interface(flow, gamma0, params.t_gen,
                                  domain=params.domain)
        traj = track_front_markers(cfg.chemo, drifted, wave.c, 0.0, params.T,
                                   dt=cfg.verify.dt_front or None,
                                   domain=params.domain)
        rows = []
        for t in checkpoints:
            snap = sim.at(t).field
            th = layer_thickness(snap, params.eta)
            level = extract_level_set(snap, 0.5)
            hd = _hausdorff_to_interface(
                level, traj.interface(max(t - params.t_gen, 0.0)))
            rows.append(SweepRow(eps, t, th, hd, pass_flags="ok"))
        return rows

    workers = max_workers or min(4, len(eps_list))
    with ThreadPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(one, eps_list))
    rows = [r for chunk in results for r in chunk]

    report = ConvergenceReport(rows)
    le = np.log(np.asarray(eps_list))
    for t in {r.t for r in rows}:
        th = np.array([r.thickness for r in rows if r.t == t])
        hd = np.array([r.hausdorff for r in rows if r.t == t])
        if np.all(th > 0):
            report.thickness_slopes[t] = float(np.polyfit(le, np.log(th), 1)[0])
        if np.all(hd > 0):
            report.hausdorff_slopes[t] = float(np.polyfit(le, np.log(hd), 1)[0])
    return report


# ---------------------------------------------------------------------------
# building-block property suites (CLI `verify ode|wave|flow`)
# ---------------------------------------------------------------------------

@dataclass
class PropertyReport:
    label: str
    checks: list                 # (name, value, bound, ok)
    passed: bool

    def summary(self) -> list[str]:
        out = [f"{self.label}: {'pass' if self.passed else 'FAIL'}"]
        for name, value, bound, ok in self.checks:
            out.append(f"  {'ok  ' if ok else 'FAIL'} {name}: {value:.3e} "
                       f"(bound {bound:g})")
        return out


def check_reaction_properties(seed: int = 0, n: int = 200) -> PropertyReport:
    """Perturbed-logistic flow: zeros, monotonicity, closed-form match."""
    rng = np.random.default_rng(seed)
    checks = []

    z = reaction_zeros(0.0)
    checks.append(("unperturbed zeros (a-, a, a+) vs (-1, 0, 1)",
                   max(abs(z.a_minus + 1), abs(z.a), abs(z.a_plus - 1)),
                   1e-12, max(abs(z.a_minus + 1), abs(z.a),
                              abs(z.a_plus - 1)) <= 1e-12))
    from .reaction import logistic_exact
    xi = rng.uniform(0.05, 0.95, n)
    tau = rng.uniform(0.0, 5.0)
    y_num, _, _ = solve_Y(tau, xi, 0.0)
    err = float(np.abs(y_num - logistic_exact(tau, xi)).max())
    checks.append(("delta=0 flow vs logistic closed form", err, 1e-8,
                   err <= 1e-8))
    xi_s = np.sort(rng.uniform(-0.2, 1.1, n))
    for delta in (-0.004, 0.0, 0.004):
        y, _, _ = solve_Y(2.5, xi_s, delta)
        worst = float(np.diff(y).min())
        checks.append((f"monotone in xi (delta={delta:+g})", worst, 0.0,
                       worst >= -1e-12))
    y_lo, _, _ = solve_Y(2.5, xi, -0.004)
    y_hi, _, _ = solve_Y(2.5, xi, +0.004)
    worst = float((y_lo - y_hi).max())
    checks.append(("monotone in delta", worst, 0.0, worst <= 1e-12))
    return PropertyReport("reaction flow properties", checks,
                          all(c[3] for c in checks))


def check_wave_properties(m: float, tol: float = 1e-6) -> PropertyReport:
    """Wave speed/profile sanity for a given exponent."""
    checks = []
    wave = compute_wave(m, tol=tol)
    z = np.linspace(-30.0, -1e-3, 2000)
    U, dU, _ = wave.eval(z)
    mono = float(np.diff(U).max())
    checks.append(("profile monotone decreasing in z", mono, 0.0,
                   mono <= 1e-10))
    res = float(np.abs(wave.residual(np.linspace(-20, -0.5, 800))).max())
    checks.append(("ODE residual on interior", res, 1e-5, res <= 1e-5))
    rng_bounds = float(min(U.min(), 1.0 - U.max()))
    checks.append(("0 < U < 1 on interior", rng_bounds, 0.0,
                   U.min() > 0 and U.max() < 1))
    if abs(m - 2.0) < 1e-12:
        cerr = abs(wave.c - 1.0)
        checks.append(("m=2 speed vs exact", cerr, 1e-3, cerr <= 1e-3))
        exact = np.where(z < 0, (1.0 - np.exp(z / 2.0)), 0.0)
        perr = float(np.abs(U - exact).max())
        checks.append(("m=2 profile vs exact", perr, 1e-3, perr <= 1e-3))
    return PropertyReport(f"travelling wave properties (m={m:g})", checks,
                          all(c[3] for c in checks))


def check_flow_properties(cfg: RunConfig, seed: int | None = None,
                          n: int = 1000) -> PropertyReport:
    """Round-trip, the t2-derivative identity, and the group property."""
    rng = np.random.default_rng(cfg.verify.seed if seed is None else seed)
    flow = FlowMap(cfg.chemo, cfg.verify.dt_flow)
    lo = np.array(cfg.domain.lo)
    hi = np.array(cfg.domain.hi)
    x = rng.uniform(lo, hi, (n, cfg.domain.ndim))
    t0, t1, t2 = 0.0, 0.6 * cfg.T, cfg.T
    checks = []

    fwd, _ = advance_flow(flow, t1, t0, x)
    back, _ = advance_flow(flow, t0, t1, fwd)
    rt = float(np.linalg.norm(back - x, axis=-1).max())
    checks.append(("round trip", rt, 1e-8, rt <= 1e-8))

    h = 1e-4
    xp, _ = advance_flow(flow, t1, t0 + h, x)
    xm, _ = advance_flow(flow, t1, t0 - h, x)
    dphi_dt2 = (xp - xm) / (2 * h)
    _, jac = advance_flow(flow, t1, t0, x)
    gv = cfg.chemo.grad_base(t0, x)
    ident = dphi_dt2 + np.einsum("pij,pj->pi", jac, gv)
    ie = float(np.linalg.norm(ident, axis=-1).max())
    checks.append(("t2-derivative identity", ie, 1e-6, ie <= 1e-6))

    mid, _ = advance_flow(flow, t1, t0, x)
    two, _ = advance_flow(flow, t2, t1, mid)
    one_, _ = advance_flow(flow, t2, t0, x)
    gp = float(np.linalg.norm(two - one_, axis=-1).max())
    checks.append(("group property", gp, 1e-8, gp <= 1e-8))

    _, jac = advance_flow(flow, t2, t0, x)
    det = np.linalg.det(jac) if cfg.domain.ndim > 1 else jac[..., 0, 0]
    dmin = float(np.min(det))
    checks.append(("Jacobian determinant positive", dmin, 0.0, dmin > 0))
    return PropertyReport("flow properties", checks,
                          all(c[3] for c in checks))
