"""Analytic chemo fields, initial caps, grids: exact derivatives, exact
compact support, and input validation."""
import numpy as np
import pytest

from kpp_sharp.model import (Bump, ChemoFieldSpec, Domain, Grid,
                             InitialDataSpec, Params, ScalarField,
                             eval_chemo, eval_initial)


def bump_spec():
    return ChemoFieldSpec(
        base_terms=(Bump(amplitude=0.3, center=(0.1, -0.2), radius=0.5),),
        ball_center=(0.0, 0.0), ball_radius=1.5)


def test_empty_spec_is_identically_zero():
    spec = ChemoFieldSpec()
    v, g, lap = eval_chemo(spec, 0.3, np.array([[0.2], [5.0]]))
    assert np.all(v == 0.0) and np.all(g == 0.0) and np.all(lap == 0.0)


def test_gradient_vanishes_at_bump_center():
    spec = bump_spec()
    v, g, lap = eval_chemo(spec, 0.0, np.array([0.1, -0.2]))
    assert v == pytest.approx(0.3)
    assert np.all(g == 0.0)
    assert lap < 0.0          # local maximum


def test_chemo_derivatives_match_finite_differences():
    spec = bump_spec()
    rng = np.random.default_rng(1)
    pts = rng.uniform(-0.2, 0.35, size=(10, 2))   # inside the bump support
    h = 1e-4
    v, g, lap = eval_chemo(spec, 0.2, pts)
    scale = np.abs(v) + 1e-3
    for ax in range(2):
        e = np.zeros(2)
        e[ax] = h
        vp, _, _ = eval_chemo(spec, 0.2, pts + e)
        vm, _, _ = eval_chemo(spec, 0.2, pts - e)
        fd = (vp - vm) / (2 * h)
        assert np.all(np.abs(fd - g[:, ax]) <= 1e-6 * (np.abs(g[:, ax]) + scale))
    fd_lap = np.zeros(len(pts))
    for ax in range(2):
        e = np.zeros(2)
        e[ax] = h
        vp, _, _ = eval_chemo(spec, 0.2, pts + e)
        vm, _, _ = eval_chemo(spec, 0.2, pts - e)
        fd_lap += (vp - 2 * v + vm) / h**2
    assert np.all(np.abs(fd_lap - lap) <= 1e-5 * (np.abs(lap) + scale))


def test_chemo_exactly_zero_outside_support():
    spec = bump_spec()
    far = np.array([[0.1 + 0.51, -0.2], [0.1, -0.2 - 0.6], [1.4, 1.4]])
    v, g, lap = eval_chemo(spec, 0.0, far)
    assert np.all(v == 0.0) and np.all(g == 0.0) and np.all(lap == 0.0)


def test_gauss_envelope_modulates_in_time():
    b = Bump(amplitude=1.0, center=(0.0,), radius=1.0,
             envelope="gauss", t_center=0.0, t_width=0.5)
    spec = ChemoFieldSpec(base_terms=(b,), ball_center=(0.0,),
                          ball_radius=2.0)
    v0, _, _ = eval_chemo(spec, 0.0, np.array([0.0]))
    v1, _, _ = eval_chemo(spec, 1.0, np.array([0.0]))
    assert v1 == pytest.approx(v0 * np.exp(-4.0))


def test_bump_outside_declared_ball_rejected():
    with pytest.raises(ValueError, match="inside the declared ball"):
        ChemoFieldSpec(
            base_terms=(Bump(amplitude=1.0, center=(0.8,), radius=0.5),),
            ball_center=(0.0,), ball_radius=1.0)


def test_perturbation_bounds_independent_of_eps():
    pert = Bump(amplitude=0.05, center=(0.0,), radius=0.4)
    spec = ChemoFieldSpec(perturbation_terms=(pert,), ball_center=(0.0,),
                          ball_radius=1.0)
    grid = Grid(Domain((-1.0,), (1.0,)), (64,))
    sups = [spec.sup_bounds((0.0, 0.5), grid, eps) for eps in (0.04, 0.01)]
    # the eps factor scales the contribution of v1 linearly
    assert sups[0][0] == pytest.approx(4.0 * sups[1][0], rel=1e-9)


def test_initial_zero_outside_and_on_boundary():
    spec = InitialDataSpec(shape="disk", center=(0.0, 0.0),
                           radii=(0.4, 0.4), height=1.2)
    outside = np.array([[0.41, 0.0], [0.0, -0.5], [3.0, 3.0]])
    assert np.all(eval_initial(spec, outside) == 0.0)
    boundary = spec.boundary_points(17)
    assert np.all(np.abs(eval_initial(spec, boundary)) <= 1e-14)
    assert eval_initial(spec, np.array([0.0, 0.0])) == pytest.approx(1.2)


def test_initial_normal_slope_bounded_below():
    spec = InitialDataSpec(shape="ellipse", center=(0.1, 0.0),
                           radii=(0.5, 0.3), height=1.0)
    # |grad u0| on the boundary of an ellipse cap h(1-s): 2h/r along the
    # short axis is the maximum, 2h/r_long the minimum
    slope = spec.min_boundary_slope(360)
    assert slope == pytest.approx(2.0 * 1.0 / 0.5, rel=1e-3)
    assert slope > 0


def test_initial_validation_errors():
    with pytest.raises(ValueError):
        InitialDataSpec(shape="disk", center=(0.0, 0.0), radii=(0.4, 0.3),
                        height=1.0)                       # unequal disk radii
    with pytest.raises(ValueError):
        InitialDataSpec(shape="interval", center=(0.0, 0.0), radii=(0.4, 0.4),
                        height=1.0)                       # interval is 1D
    with pytest.raises(ValueError):
        InitialDataSpec(shape="disk", center=(0.0, 0.0), radii=(0.4, 0.4),
                        height=-1.0)
    spec = InitialDataSpec(shape="interval", center=(0.6,), radii=(0.5,),
                           height=1.0, margin=0.1)
    with pytest.raises(ValueError, match="margin"):
        spec.validate_inside(Domain((-1.0,), (1.0,)))


def test_support_distance_disk_and_interval():
    disk = InitialDataSpec(shape="disk", center=(0.0, 0.0), radii=(0.4, 0.4),
                           height=1.0)
    pts = np.array([[0.0, 0.0], [0.9, 0.0], [0.0, -1.4]])
    assert np.allclose(disk.support_distance(pts), [0.0, 0.5, 1.0])
    seg = InitialDataSpec(shape="interval", center=(0.2,), radii=(0.3,),
                          height=1.0)
    pts1 = np.array([[0.3], [0.6], [-0.4]])
    assert np.allclose(seg.support_distance(pts1), [0.0, 0.1, 0.3])


def test_params_validation():
    dom = Domain((-1.0,), (1.0,))
    Params(0.02, 2.0, 1.0, 0.1, dom)
    with pytest.raises(ValueError):
        Params(0.0, 2.0, 1.0, 0.1, dom)
    with pytest.raises(ValueError):
        Params(0.02, 1.5, 1.0, 0.1, dom)
    with pytest.raises(ValueError):
        Params(0.02, 2.0, -1.0, 0.1, dom)
    with pytest.raises(ValueError):
        Params(0.02, 2.0, 1.0, 0.6, dom)
    with pytest.raises(ValueError):
        Domain((-1.0,), (-2.0,))
    with pytest.raises(ValueError):
        Domain((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))


def test_generation_time_formula():
    p = Params(0.02, 2.0, 1.0, 0.1, Domain((-1.0,), (1.0,)))
    assert p.t_gen == pytest.approx(0.02 * abs(np.log(0.02)), rel=1e-12)


def test_grid_centers_and_field_shape():
    g = Grid(Domain((-1.0, 0.0), (1.0, 1.0)), (50, 100))   # (ny, nx)
    assert g.dx == pytest.approx((0.02, 0.02))
    xs = g.axis_centers(0)
    assert xs[0] == pytest.approx(-1.0 + 0.01)
    assert xs[-1] == pytest.approx(1.0 - 0.01)
    assert g.centers().shape == (50, 100, 2)
    with pytest.raises(ValueError):
        ScalarField(g, np.zeros((100, 50)))
    with pytest.raises(ValueError):
        Grid(Domain((-1.0,), (1.0,)), (3,))


def test_scalarfield_interp_linear_exact():
    g = Grid(Domain((0.0,), (1.0,)), (64,))
    f = ScalarField(g, 2.0 * g.axis_centers(0) + 0.5)
    q = np.array([[0.25], [0.7113]])
    assert np.allclose(f.interp(q), 2.0 * q[:, 0] + 0.5, atol=1e-12)
