"""TOML run configuration: loading, validation, and derived objects."""
import numpy as np
import pytest

from kpp_sharp.config import (ConfigError, RunConfig, SweepSettings,
                              VerifySettings, load_preset)
from kpp_sharp.verify import interface_from_initial

PRESETS = [f"a{i}" for i in range(1, 10)]


def base_dict():
    return {
        "params": {"m": 2.0, "epsilon": 0.02, "T": 0.2, "eta": 0.1,
                   "domain_lo": [-1.0], "domain_hi": [1.0]},
        "grid": {"cells": [256]},
        "initial": {"shape": "interval", "center": [0.0], "radii": [0.5],
                    "height": 1.0, "margin": 0.1},
        "chemo": {"ball_center": [0.0], "ball_radius": 0.8,
                  "base": [{"amplitude": 0.02, "center": [0.0],
                            "radius": 0.4}]},
    }


@pytest.mark.parametrize("name", PRESETS)
def test_preset_loads_and_is_consistent(name):
    cfg = load_preset(name)
    params = cfg.params()
    grid = cfg.grid()
    assert grid.ndim == params.domain.ndim
    assert cfg.d0() > 0.0
    times = cfg.checkpoint_times(params)
    assert len(times) >= 1
    assert all(0.0 < t <= params.T + 1e-12 for t in times)
    assert all(b < a for a, b in zip(cfg.sweep.eps, cfg.sweep.eps[1:]))
    # the drifted-interface construction must be admissible for every preset
    iface = interface_from_initial(cfg.initial, cfg.verify.n_markers)
    assert iface.ndim == params.domain.ndim


def test_unknown_preset_lists_available():
    with pytest.raises(ConfigError, match="available"):
        load_preset("b1")


def test_missing_sections_reported_together():
    with pytest.raises(ConfigError) as exc:
        RunConfig.from_dict({}, origin="<t>")
    msg = str(exc.value)
    for name in ("params", "grid", "initial", "chemo"):
        assert f"missing [{name}]" in msg


def test_unknown_keys_rejected():
    d = base_dict()
    d["params"]["zeta"] = 1.0
    with pytest.raises(ConfigError, match="unknown keys"):
        RunConfig.from_dict(d, origin="<t>")
    d = base_dict()
    d["sweeps"] = {"eps": [0.1]}
    with pytest.raises(ConfigError, match="sweeps"):
        RunConfig.from_dict(d, origin="<t>")
    d = base_dict()
    d["chemo"]["base"][0]["width"] = 2.0
    with pytest.raises(ConfigError, match=r"chemo.base\[0\]"):
        RunConfig.from_dict(d, origin="<t>")


@pytest.mark.parametrize("patch,needle", [
    ({"params": {"m": 1.5}}, "m must be >= 2"),
    ({"params": {"epsilon": 0.0}}, "epsilon"),
    ({"params": {"eta": 0.6}}, "eta"),
    ({"grid": {"cells": [4]}}, ">= 8"),
    ({"grid": {"cells": [32, 32]}}, "rank"),
    ({"initial": {"radii": [0.95]}}, "margin"),
    ({"sweep": {"eps": [0.04, 0.04, 0.01]}}, "decrease strictly"),
    ({"sweep": {"eps": [1.5, 0.4, 0.1]}}, r"\(0, 1\]"),
    ({"chemo": {"ball_radius": 1.5}}, "strictly inside"),
    ({"chemo": {"ball_radius": 0.3}}, "ball"),
])
def test_invalid_values_rejected(patch, needle):
    d = base_dict()
    for section, vals in patch.items():
        d.setdefault(section, {}).update(vals)
    with pytest.raises(ConfigError, match=needle):
        RunConfig.from_dict(d, origin="<t>")


def test_from_file_roundtrip(tmp_path):
    text = """
[params]
m = 2.0
epsilon = 0.02
T = 0.4
eta = 0.1
domain_lo = [-1.0, -1.0]
domain_hi = [1.0, 1.0]

[grid]
cells = [96, 64]

[initial]
shape = "disk"
center = [0.0, 0.1]
radii = [0.3, 0.3]
height = 1.0
margin = 0.05

[chemo]
ball_center = [0.0, 0.0]
ball_radius = 0.9

[[chemo.base]]
amplitude = 0.01
center = [0.2, 0.0]
radius = 0.3

[sweep]
eps = [0.08, 0.04, 0.02]
times = [0.1, 0.4]

[verify]
seed = 7
d0 = 0.12
"""
    path = tmp_path / "run.toml"
    path.write_text(text)
    cfg = RunConfig.from_file(path)
    assert cfg.m == 2.0 and cfg.T == 0.4
    assert cfg.cells == (96, 64)
    assert cfg.grid().shape == (64, 96)          # array layout is (ny, nx)
    assert cfg.sweep.eps == (0.08, 0.04, 0.02)
    assert cfg.checkpoint_times(cfg.params()) == (0.1, 0.4)
    assert cfg.verify.seed == 7
    assert cfg.d0() == 0.12
    assert cfg.chemo.base_terms[0].amplitude == 0.01
    assert cfg.initial.height == 1.0


def test_missing_file_and_bad_syntax(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        RunConfig.from_file(tmp_path / "nope.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("= =")
    with pytest.raises(ConfigError):
        RunConfig.from_file(bad)


def test_cells_per_eps_refines_grid():
    d = base_dict()
    d["sweep"] = {"eps": [0.04, 0.02, 0.01], "cells_per_eps": 4.0}
    cfg = RunConfig.from_dict(d, origin="<t>")
    assert cfg.grid().shape == (256,)
    # ceil(side * cpe / eps) = ceil(2 * 4 / 0.02) = 400 > 256
    assert cfg.grid(0.02).shape == (400,)
    assert cfg.grid(0.08).shape == (256,)        # floor at the base cells


def test_default_checkpoints_and_d0():
    cfg = RunConfig.from_dict(base_dict(), origin="<t>")
    params = cfg.params()
    assert cfg.checkpoint_times(params) == (0.05, 0.1, 0.2)
    assert cfg.d0() == pytest.approx(0.2)


def test_interface_from_initial_shapes():
    cfg = RunConfig.from_dict(base_dict(), origin="<t>")
    iface = interface_from_initial(cfg.initial, 64)
    assert iface.points.shape == (2, 1)
    assert np.allclose(iface.points[:, 0], [-0.5, 0.5])

    d = base_dict()
    d["params"].update(domain_lo=[-1.0, -1.0], domain_hi=[1.0, 1.0])
    d["grid"]["cells"] = [64, 64]
    d["initial"].update(shape="disk", center=[0.0, 0.0], radii=[0.4, 0.4])
    d["chemo"].update(ball_center=[0.0, 0.0])
    d["chemo"]["base"][0]["center"] = [0.0, 0.0]
    cfg2 = RunConfig.from_dict(d, origin="<t>")
    iface2 = interface_from_initial(cfg2.initial, 64)
    assert iface2.points.shape == (64, 2)
    assert np.allclose(np.hypot(*iface2.points.T), 0.4)
    assert iface2.is_simple()


def test_settings_defaults():
    sw = SweepSettings()
    assert sw.eps == (0.04, 0.02, 0.01)
    vf = VerifySettings()
    assert vf.m0_ladder[-1] == 40.0
    assert vf.tol_num == 1e-3
    cfg = RunConfig.from_dict(base_dict(), origin="<t>")
    assert cfg.verify.n_markers == 512
    assert cfg.sweep.times == ()
