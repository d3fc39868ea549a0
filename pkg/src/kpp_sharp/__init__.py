"""Sharp-interface limit of a degenerate reaction-diffusion-drift model.

The package simulates

    u_t = eps * lap(u^m) - div(u grad v_eps) + (1/eps) u (1 - u)

with no-flux boundaries, tracks the limiting free boundary moving with
normal speed c* + dv/dn, and verifies the sharp-interface asymptotics
quantitatively: emergence of the O(eps)-thick transition layer by
t_gen = eps|ln eps|, propagation bracketed between explicit comparator
profiles, and convergence of the simulated half-level set to the tracked
front as eps -> 0.
"""

from .config import ConfigError, RunConfig, SweepSettings, VerifySettings, \
    load_preset
from .flow import FlowMap, Interface, advance_flow, drift_interface
from .front import CutoffDistance, CutoffDistanceFn, FrontTrajectory, \
    cutoff_distance, evolve_levelset, motion_residual, \
    mvt_surrogate_constant, track_front_markers, zeta, zeta_prime
from .model import Bump, ChemoFieldSpec, Domain, Grid, InitialDataSpec, \
    Params, ScalarField
from .pde import CflError, PdeState, SimResult, Snapshot, \
    extract_level_set, layer_thickness, mass, simulate, stable_dt, step
from .reaction import logistic_exact, reaction_zeros, solve_Y
from .verify import ConvergenceReport, GenComparators, PropComparators, \
    PropagationSetup, check_flow_properties, check_generation, \
    check_generation_sandwich, check_ordering, check_propagation_residuals, \
    check_propagation_sandwich, check_reaction_properties, \
    check_wave_properties, default_gen_comparators, eval_gen_comparator, \
    interface_from_initial, prop_comparator, residual_pde, run_sweep
from .wave import WaveProfile, compute_wave, edge_coefficient, tail_rate

__version__ = "0.1.0"

__all__ = [
    "Bump", "CflError", "ChemoFieldSpec", "ConfigError",
    "ConvergenceReport", "CutoffDistance", "CutoffDistanceFn", "Domain",
    "FlowMap", "FrontTrajectory", "GenComparators", "Grid",
    "InitialDataSpec", "Interface", "Params", "PdeState",
    "PropComparators", "PropagationSetup", "RunConfig", "ScalarField",
    "SimResult", "Snapshot", "SweepSettings", "VerifySettings",
    "WaveProfile", "advance_flow", "check_flow_properties",
    "check_generation", "check_generation_sandwich", "check_ordering",
    "check_propagation_residuals", "check_propagation_sandwich",
    "check_reaction_properties", "check_wave_properties", "compute_wave",
    "cutoff_distance", "default_gen_comparators", "drift_interface",
    "edge_coefficient", "eval_gen_comparator", "evolve_levelset",
    "extract_level_set", "interface_from_initial", "layer_thickness",
    "load_preset", "logistic_exact", "mass", "motion_residual",
    "mvt_surrogate_constant", "prop_comparator", "reaction_zeros",
    "residual_pde", "run_sweep", "simulate", "solve_Y", "stable_dt",
    "step", "tail_rate", "track_front_markers", "zeta", "zeta_prime",
]
