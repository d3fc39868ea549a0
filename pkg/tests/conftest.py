"""Shared fixtures: cached wave profiles and small ready-made configs.

compute_wave memoizes per (m, tol) in-process, so the session fixtures are
cheap after first use; the config helpers build throwaway RunConfig objects
from plain dicts to keep individual tests short.
"""
import numpy as np
import pytest

from kpp_sharp.config import RunConfig
from kpp_sharp.wave import compute_wave


@pytest.fixture(scope="session")
def wave2():
    return compute_wave(2.0, tol=1e-6)


@pytest.fixture(scope="session")
def wave3():
    return compute_wave(3.0, tol=1e-6)


def make_config(**overrides):
    """A small 1D bump-drift configuration; override sections by dict."""
    data = {
        "params": {
            "m": 2.0, "epsilon": 0.02, "T": 0.2, "eta": 0.1,
            "domain_lo": [-1.0], "domain_hi": [1.0],
        },
        "grid": {"cells": [256]},
        "initial": {
            "shape": "interval", "center": [0.0], "radii": [0.5],
            "height": 1.0, "margin": 0.1,
        },
        "chemo": {
            "ball_center": [0.0], "ball_radius": 0.8,
            "base": [{"amplitude": 0.02, "center": [0.0], "radius": 0.4}],
        },
        "sweep": {"eps": [0.04, 0.02, 0.01]},
        "verify": {"seed": 0},
    }
    for key, val in overrides.items():
        if isinstance(val, dict):
            data.setdefault(key, {}).update(val)
        else:
            data[key] = val
    return RunConfig.from_dict(data)


@pytest.fixture()
def small_cfg():
    return make_config()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0)


# One line per acceptance criterion, echoed after the test report so the
# pass/fail ledger is visible without -s (test_acceptance.py appends).
CRITERION_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
