"""Finite-volume solver: stability bound, conservation, monotonicity,
equilibria, front speed, level-set extraction, and layer thickness."""
import numpy as np
import pytest

from kpp_sharp.model import (Bump, ChemoFieldSpec, Domain, Grid,
                             InitialDataSpec, Params, ScalarField)
from kpp_sharp.pde import (CflError, PdeState, extract_level_set,
                           layer_thickness, mass, simulate, stable_dt, step)


def empty_chemo_1d():
    return ChemoFieldSpec(base_terms=(), perturbation_terms=(),
                          ball_center=(0.0,), ball_radius=0.5)


def make_state(values, *, eps=0.02, m=2.0, chemo=None, domain=(-1.0, 1.0),
               reaction=True):
    dom = Domain(lo=(domain[0],), hi=(domain[1],))
    params = Params(epsilon=eps, m=m, T=1.0, eta=0.1, domain=dom)
    grid = Grid(dom, (len(values),))
    field = ScalarField(grid, np.asarray(values, dtype=float))
    return PdeState(params, chemo or empty_chemo_1d(), field,
                    reaction=reaction)


def test_stable_dt_diffusion_bound_closed_form():
    # h = 2/400, u == 1, v == 0, m = 2: dt = h^2 / (2 * eps * m) = 3.125e-4
    st = make_state(np.ones(400), eps=0.02, m=2.0)
    assert stable_dt(st) == pytest.approx(3.125e-4, rel=1e-12)


def test_stable_dt_zero_field_splitting_cap():
    st = make_state(np.zeros(400), eps=0.02)
    assert stable_dt(st) == pytest.approx(0.5 * 0.02, rel=1e-12)


def test_stable_dt_harmonic_combination():
    chemo = ChemoFieldSpec(
        base_terms=(Bump(amplitude=0.05, center=(0.0,), radius=0.3),),
        perturbation_terms=(), ball_center=(0.0,), ball_radius=0.5)
    st = make_state(np.ones(256), eps=0.02, chemo=chemo)
    h = st.field.grid.min_dx()
    vmax = max(np.abs(v).max() for v in st.face_velocities(0.0))
    assert vmax > 0.0
    inv = 2.0 * 0.02 * 2.0 / h**2 + 2.0 * vmax / h
    assert stable_dt(st) == pytest.approx(1.0 / inv, rel=1e-12)
    # strictly below each single-mechanism bound
    assert stable_dt(st) < h**2 / (2.0 * 0.02 * 2.0)
    assert stable_dt(st) < h / (2.0 * vmax)


def test_zero_is_equilibrium():
    st = make_state(np.zeros(128))
    for _ in range(20):
        step(st, stable_dt(st))
    assert np.array_equal(st.field.values, np.zeros(128))


def test_one_is_equilibrium_without_drift():
    st = make_state(np.ones(128))
    for _ in range(20):
        step(st, stable_dt(st))
    assert np.abs(st.field.values - 1.0).max() <= 1e-14


def test_mass_function_is_cell_sum():
    st = make_state(np.linspace(0.0, 1.0, 64))
    h = 2.0 / 64
    assert mass(st.field) == pytest.approx(np.linspace(0, 1, 64).sum() * h,
                                           rel=1e-14)


def test_mass_conserved_without_reaction():
    chemo = ChemoFieldSpec(
        base_terms=(Bump(amplitude=0.02, center=(0.1,), radius=0.3),),
        perturbation_terms=(), ball_center=(0.0,), ball_radius=0.5)
    x = np.linspace(-1.0, 1.0, 128, endpoint=False) + 1.0 / 128
    u0 = np.where(np.abs(x) < 0.4, 0.8 * (1.0 - (x / 0.4) ** 2), 0.0)
    st = make_state(u0, chemo=chemo, reaction=False)
    m0 = mass(st.field)
    worst_step = 0.0
    prev = m0
    for _ in range(1000):
        step(st, stable_dt(st))
        cur = mass(st.field)
        worst_step = max(worst_step, abs(cur - prev))
        prev = cur
    assert worst_step <= 1e-12
    assert abs(mass(st.field) - m0) <= 1e-8


def test_comparison_principle_small(rng):
    chemo = ChemoFieldSpec(
        base_terms=(Bump(amplitude=0.02, center=(-0.1,), radius=0.25),),
        perturbation_terms=(), ball_center=(0.0,), ball_radius=0.5)
    x = np.linspace(-1.0, 1.0, 96, endpoint=False)
    for _ in range(10):
        base = 0.6 * rng.random() * (1.0 + np.sin(np.pi * x * rng.integers(1, 4)))
        gap = 0.3 * rng.random(96)
        lo = make_state(base, chemo=chemo)
        hi = make_state(base + gap, chemo=chemo)
        for _ in range(50):
            dt = min(stable_dt(lo), stable_dt(hi))
            step(lo, dt)
            step(hi, dt)
        assert (hi.field.values - lo.field.values).min() >= -1e-12


def test_bounds_hold_with_overshooting_datum():
    chemo = ChemoFieldSpec(
        base_terms=(Bump(amplitude=0.03, center=(0.0,), radius=0.3),),
        perturbation_terms=(), ball_center=(0.0,), ball_radius=0.5)
    x = np.linspace(-1.0, 1.0, 128, endpoint=False)
    u0 = np.where(np.abs(x) < 0.5, 1.5 * (1.0 - (x / 0.5) ** 2), 0.0)
    st = make_state(u0, chemo=chemo)
    for _ in range(200):
        step(st, stable_dt(st))     # step() itself asserts the bounds
        assert st.field.values.min() >= 0.0
        assert st.field.values.max() <= st.bound_cap
    # the logistic sink has pulled the overshoot down to the steady excess
    # of order eps |lap v| that drift focusing sustains above 1
    assert st.field.values.max() <= 1.0 + 1.5 * 0.02 * st.lap_sup
    assert st.field.values.max() < 1.1


def run_1d(eps, cells, T, *, m=2.0, domain=(-2.0, 2.0), times=None,
           radius=0.4, center=0.0, t_end=None):
    dom = Domain(lo=(domain[0],), hi=(domain[1],))
    params = Params(epsilon=eps, m=m, T=T, eta=0.1, domain=dom)
    grid = Grid(dom, (cells,))
    chemo = ChemoFieldSpec(base_terms=(), perturbation_terms=(),
                           ball_center=(0.0,), ball_radius=0.5)
    init = InitialDataSpec(shape="interval", center=(center,),
                           radii=(radius,), height=1.0)
    return simulate(params, chemo, init, grid, times=times, t_end=t_end)


def test_simulate_t_end_zero_returns_initial_datum():
    res = run_1d(0.02, 128, 1.0, t_end=0.0)
    assert len(res.snapshots) == 1
    snap = res.snapshots[0]
    assert snap.t == 0.0
    init = InitialDataSpec(shape="interval", center=(0.0,), radii=(0.4,),
                           height=1.0)
    assert np.array_equal(snap.field.values,
                          init.eval(res.grid.centers()))


def test_snapshots_include_generation_time():
    res = run_1d(0.02, 128, 0.5)
    t_gen = res.params.t_gen
    assert res.at(t_gen).t == pytest.approx(t_gen)
    with pytest.raises(KeyError):
        res.at(0.123456)


def test_front_speed_matches_minimal_wave_speed(wave2):
    eps = 0.02
    res = run_1d(eps, 512, 1.0, times=[0.5, 1.0])
    xs = []
    for t in (0.5, 1.0):
        pts = extract_level_set(res.at(t).field, 0.5)
        assert len(pts) >= 2
        xs.append(pts[:, 0].max())
    speed = (xs[1] - xs[0]) / 0.5
    assert speed == pytest.approx(wave2.c, abs=0.1)


def test_finite_propagation_no_reaction():
    dom = Domain(lo=(-2.0,), hi=(2.0,))
    grid = Grid(dom, (256,))
    x = grid.axis_centers(0)
    u0 = np.where(np.abs(x) < 0.3, 1.0 - (x / 0.3) ** 2, 0.0)
    st = make_state(u0, domain=(-2.0, 2.0), reaction=False)
    h = grid.dx[0]
    n = 100
    for _ in range(n):
        step(st, stable_dt(st))
    u = st.field.values
    outside = np.abs(x) > 0.3 + (n + 1) * h
    assert np.array_equal(u[outside], np.zeros(outside.sum()))
    assert (u[np.abs(x) > 0.31] > 0).any()      # the support did spread


def test_grid_convergence_first_order_or_better():
    probes = np.linspace(-1.5, 1.5, 301)[:, None]
    sols = {}
    for cells in (128, 256, 512):
        res = run_1d(0.04, cells, 0.25)
        sols[cells] = res.at(0.25).field.interp(probes)
    d1 = np.abs(sols[128] - sols[256]).max()
    d2 = np.abs(sols[256] - sols[512]).max()
    order = np.log2(d1 / d2)
    assert order >= 0.8


def test_cfl_error_names_the_binding_bound():
    st = make_state(np.ones(400), eps=0.02)
    with pytest.raises(CflError, match="diffusion"):
        step(st, 2.0 * stable_dt(st))

    st = make_state(np.zeros(400), eps=0.02)
    with pytest.raises(CflError, match="splitting"):
        step(st, 2.0 * stable_dt(st))

    chemo = ChemoFieldSpec(
        base_terms=(Bump(amplitude=0.5, center=(0.0,), radius=0.3),),
        perturbation_terms=(), ball_center=(0.0,), ball_radius=0.5)
    st = make_state(np.full(400, 1e-3), eps=0.02, chemo=chemo)
    with pytest.raises(CflError, match="advection"):
        step(st, 2.0 * stable_dt(st))


def test_negative_initial_field_rejected():
    with pytest.raises(ValueError, match="nonnegative"):
        make_state(np.full(64, -0.1))


def test_extract_level_set_linear_ramp_exact():
    dom = Domain(lo=(0.0,), hi=(1.0,))
    grid = Grid(dom, (50,))
    x = grid.axis_centers(0)
    field = ScalarField(grid, 2.0 * x)          # crosses 0.7 at x = 0.35
    pts = extract_level_set(field, 0.7)
    assert pts.shape == (1, 1)
    assert pts[0, 0] == pytest.approx(0.35, abs=1e-12)


def test_extract_level_set_constant_field_empty():
    dom = Domain(lo=(0.0,), hi=(1.0,))
    grid = Grid(dom, (32,))
    pts = extract_level_set(ScalarField(grid, np.full(32, 0.3)), 0.5)
    assert pts.shape == (0, 1)


def test_extract_level_set_circle():
    dom = Domain(lo=(-1.0, -1.0), hi=(1.0, 1.0))
    grid = Grid(dom, (128, 128))
    c = grid.centers()
    r = np.hypot(c[..., 0], c[..., 1])
    field = ScalarField(grid, np.exp(-(r ** 2)))
    pts = extract_level_set(field, np.exp(-0.25))      # circle of radius 0.5
    assert len(pts) > 100
    radii = np.hypot(pts[:, 0], pts[:, 1])
    h = grid.min_dx()
    assert np.abs(radii - 0.5).max() <= h


def test_layer_thickness_of_analytic_wave(wave2):
    # U((x - x0)/eps): the eta = 0.1 layer has width 2 eps ln 9
    dom = Domain(lo=(-1.0,), hi=(1.0,))
    grid = Grid(dom, (2000,))
    x = grid.axis_centers(0)
    h = grid.dx[0]
    for eps in (0.04, 0.02):
        U, _, _ = wave2.eval((x - 0.5) / eps)
        thick = layer_thickness(ScalarField(grid, U), 0.1)
        assert abs(thick - 2.0 * eps * np.log(9.0)) <= 2.0 * h
    t4 = layer_thickness(ScalarField(grid, wave2.eval((x - 0.5) / 0.04)[0]), 0.1)
    t2 = layer_thickness(ScalarField(grid, wave2.eval((x - 0.5) / 0.02)[0]), 0.1)
    assert t4 / t2 == pytest.approx(2.0, abs=0.1)


def test_layer_thickness_sharp_step_resolution_limited():
    dom = Domain(lo=(-1.0,), hi=(1.0,))
    grid = Grid(dom, (400,))
    x = grid.axis_centers(0)
    u = np.where(x < 0.2, 1.0, 0.0)
    thick = layer_thickness(ScalarField(grid, u), 0.1)
    assert thick <= 2.0 * grid.dx[0]


def test_layer_thickness_error_paths():
    dom = Domain(lo=(-1.0,), hi=(1.0,))
    grid = Grid(dom, (64,))
    flat = ScalarField(grid, np.full(64, 0.5))
    with pytest.raises(ValueError, match="eta"):
        layer_thickness(flat, 0.7)
    with pytest.raises(ValueError, match="not developed"):
        layer_thickness(flat, 0.1)
