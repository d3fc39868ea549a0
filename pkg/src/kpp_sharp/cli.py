"""Command-line entry point.

Subcommands
    wave      compute the sharp traveling wave, print c*, write the profile
    flow      drift the initial interface along grad v up to t_gen
    simulate  run the PDE scheme, dump snapshot summaries and fields
    front     track the limit free boundary (markers or level set)
    sweep     eps-convergence study of layer thickness and front error
    verify    property suites: ode | wave | flow | generation |
              propagation | ordering | all

Outputs are CSV files plus rendered PNG figures of the same data; given
the same (config, seed) every CSV is byte-identical between runs.  Exit
status: 0 when all requested checks pass, 1 when a check fails, 2 for
usage or configuration errors.  KPP_SHARP_OUT overrides the default
output directory.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import report as rep
from .config import ConfigError, RunConfig, load_preset
from .flow import FlowMap, drift_interface
from .front import evolve_levelset, track_front_markers
from .pde import extract_level_set, simulate
from .verify import (PropagationSetup, PropComparators,
                     check_flow_properties, check_generation,
                     check_generation_sandwich, check_ordering,
                     check_propagation_residuals, check_propagation_sandwich,
                     check_reaction_properties, check_wave_properties,
                     interface_from_initial, run_sweep)
from .wave import compute_wave


def _default_out() -> str:
    return os.environ.get("KPP_SHARP_OUT", "out")


def _load(args) -> RunConfig:
    if getattr(args, "config", None):
        return RunConfig.from_file(args.config)
    if getattr(args, "preset", None):
        return load_preset(args.preset)
    raise ConfigError("this command needs --config FILE or --preset NAME")


def _outfile(args, default_name: str) -> Path:
    if args.out:
        path = Path(args.out)
        if path.suffix:                      # looks like a file
            rep.ensure_dir(path.parent)
            return path
        return rep.ensure_dir(path) / default_name
    return rep.ensure_dir(_default_out()) / default_name


def _outdir(args) -> Path:
    return rep.ensure_dir(args.out or _default_out())


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_wave(args) -> int:
    m = args.m
    if m is None:
        try:
            m = _load(args).m
        except ConfigError:
            m = 2.0
    profile = compute_wave(m, tol=args.tol)
    path = _outfile(args, f"wave_m{m:g}.csv")
    rep.write_wave(path, profile)
    rep.fig_wave(path.with_suffix(".png"), profile)
    print(f"m = {m:g}")
    print(f"c* = {profile.c:.10f}")
    print(f"tail rate beta = {profile.beta:.10f}")
    print(f"profile written to {path}")
    return 0


def cmd_flow(args) -> int:
    cfg = _load(args)
    params = cfg.params(args.eps)
    flow = FlowMap(cfg.chemo, cfg.verify.dt_flow)
    gamma0 = interface_from_initial(cfg.initial, cfg.verify.n_markers)
    drifted = drift_interface(flow, gamma0, params.t_gen,
                              domain=params.domain)
    path = _outfile(args, "gamma.csv")
    rep.write_interface(path, drifted.points)
    shift = np.linalg.norm(drifted.points - gamma0.points, axis=1)
    print(f"t_gen = {params.t_gen:.6f}")
    print(f"max marker displacement = {shift.max():.3e}")
    print(f"drifted interface written to {path}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load(args)
    params = cfg.params(args.eps)
    grid = cfg.grid(args.eps)
    times = cfg.checkpoint_times(params)
    result = simulate(params, cfg.chemo, cfg.initial, grid, times=list(times))
    out = _outdir(args)
    rep.write_snapshots(out / "snapshots.csv", result)
    for snap in result.snapshots:
        tag = f"{snap.t:.6f}".replace(".", "p")
        rep.write_field(out / f"u_t{tag}.dat", snap.field, snap.t)
    last = result.snapshots[-1]
    fig = out / f"u_final_eps{params.epsilon:g}.png"
    rep.fig_field(fig, last.field, last.t,
                  interface=extract_level_set(last.field, 0.5))
    print(f"eps = {params.epsilon:g}, grid = {grid.shape}, "
          f"{len(result.snapshots)} snapshots")
    print(f"final mass = {last.mass:.8f}, u in [{last.u_min:.3e}, "
          f"{last.u_max:.6f}]")
    print(f"outputs in {out}")
    return 0


def cmd_front(args) -> int:
    cfg = _load(args)
    params = cfg.params(args.eps)
    wave = compute_wave(params.m)
    flow = FlowMap(cfg.chemo, cfg.verify.dt_flow)
    gamma0 = interface_from_initial(cfg.initial, cfg.verify.n_markers)
    drifted = drift_interface(flow, gamma0, params.t_gen,
                              domain=params.domain)
    if args.method == "markers":
        traj = track_front_markers(cfg.chemo, drifted, wave.c, 0.0, params.T,
                                   dt=cfg.verify.dt_front or None,
                                   domain=params.domain)
    else:
        traj = evolve_levelset(cfg.chemo, drifted, cfg.grid(args.eps),
                               wave.c, 0.0, params.T,
                               n_markers=cfg.verify.n_markers)
    path = _outfile(args, f"traj_{args.method}.csv")
    rep.write_trajectory(path, traj)
    rep.fig_fronts(path.with_suffix(".png"), {args.method: traj},
                   np.linspace(0.0, params.T, 5))
    print(f"{args.method} front: {len(traj.times)} stored times on "
          f"[0, {params.T:g}]")
    print(f"trajectory written to {path}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    reportc = run_sweep(cfg)
    out = _outdir(args)
    rep.write_sweep(out / "sweep.csv", reportc)
    rep.fig_sweep(out / "sweep.png", reportc)
    for line in reportc.summary():
        print(line)
    print(f"outputs in {out}")
    return 0


def _emit(out: Path, name: str, header, rows, lines) -> None:
    rep.write_csv(out / name, header, rows)
    for line in lines:
        print(line)


def _verify_ode(args, out: Path) -> bool:
    r = check_reaction_properties(seed=args.seed or 0)
    _emit(out, "verify_ode.csv", ["check", "value", "bound", "ok"],
          r.checks, r.summary())
    return r.passed


def _verify_wave(args, out: Path) -> bool:
    m = args.m
    if m is None:
        try:
            m = _load(args).m
        except ConfigError:
            m = 2.0
    r = check_wave_properties(m, tol=args.tol)
    _emit(out, f"verify_wave_m{m:g}.csv", ["check", "value", "bound", "ok"],
          r.checks, r.summary())
    return r.passed


def _verify_flow(args, out: Path) -> bool:
    cfg = _load(args)
    r = check_flow_properties(cfg, seed=args.seed)
    _emit(out, "verify_flow.csv", ["check", "value", "bound", "ok"],
          r.checks, r.summary())
    return r.passed


def _generation_reports(args, cfg: RunConfig, out: Path):
    reports = check_generation(cfg)
    rows = [(r.eps, r.eta, np.nan if r.m0_witness is None else r.m0_witness,
             r.bound_margin, r.inner_worst, r.outer_worst,
             int(r.passed)) for r in reports]
    lines = [ln for r in reports for ln in r.summary()]
    _emit(out, "generation.csv",
          ["eps", "eta", "m0_witness", "bound_margin", "inner_min_u",
           "outer_max_u", "ok"], rows, lines)
    sw = check_generation_sandwich(cfg, args.eps)
    _emit(out, "generation_sandwich.csv",
          ["t", "lower_excess", "upper_excess"], sw.rows, sw.summary())
    return all(r.passed for r in reports) and sw.passed, reports


def _verify_generation(args, out: Path) -> bool:
    cfg = _load(args)
    ok, _ = _generation_reports(args, cfg, out)
    return ok


def _propagation_reports(args, cfg: RunConfig):
    setup = PropagationSetup.build(cfg, args.eps)
    res = check_propagation_residuals(cfg, args.eps, seed=args.seed,
                                      setup=setup)
    sigma = res.pc.sigma if res.pc is not None else None
    L = res.pc.L if res.pc is not None else None
    ord_rep = check_ordering(cfg, args.eps, sigma=sigma, L=L, setup=setup)
    pc = None
    if res.pc is not None and ord_rep.K is not None:
        pc = PropComparators(res.pc.sigma, ord_rep.K, res.pc.L)
    sand = check_propagation_sandwich(cfg, args.eps, pc=pc, setup=setup)
    return setup, res, ord_rep, sand


def _propagation_emit(args, cfg: RunConfig, out: Path):
    setup, res, ord_rep, sand = _propagation_reports(args, cfg)
    pc = res.pc
    rows = [(setup.params.epsilon,
             np.nan if pc is None else pc.sigma,
             np.nan if ord_rep.K is None else ord_rep.K,
             np.nan if pc is None else pc.L,
             res.min_plus, res.max_minus, res.tol, res.n_used,
             int(res.passed), int(ord_rep.passed), int(sand.passed))]
    lines = res.summary() + ord_rep.summary() + sand.summary()
    _emit(out, "propagation.csv",
          ["eps", "sigma", "K", "L", "min_res_plus", "max_res_minus",
           "tol", "n_samples", "residuals_ok", "ordering_ok",
           "sandwich_ok"], rows, lines)
    rep.write_csv(out / "propagation_sandwich.csv",
                  ["t", "lower_excess", "upper_excess"], sand.rows)
    ok = res.passed and ord_rep.passed and sand.passed
    return ok, res, ord_rep


def _verify_propagation(args, out: Path) -> bool:
    cfg = _load(args)
    ok, _, _ = _propagation_emit(args, cfg, out)
    return ok


def _verify_ordering(args, out: Path) -> bool:
    cfg = _load(args)
    setup = PropagationSetup.build(cfg, args.eps)
    r = check_ordering(cfg, args.eps, setup=setup)
    rows = [(setup.params.epsilon, np.nan if r.K is None else r.K,
             r.worst_low, r.worst_high, int(r.passed))]
    _emit(out, "ordering.csv",
          ["eps", "K", "lower_excess", "upper_excess", "ok"],
          rows, r.summary())
    return r.passed


def _verify_all(args, out: Path) -> bool:
    cfg = _load(args)
    ok = _verify_ode(args, out)
    ok &= _verify_wave(args, out)
    ok &= _verify_flow(args, out)
    gen_ok, cfg_gen = _generation_reports(args, cfg, out)
    ok &= gen_ok
    prop_ok, res, ord_rep = _propagation_emit(args, cfg, out)
    ok &= prop_ok
    sweep_rep = run_sweep(cfg)
    witnesses = [r.m0_witness for r in cfg_gen if r.m0_witness is not None]
    sweep_rep.set_witnesses(
        m0=max(witnesses) if witnesses else None,
        sigma=None if res.pc is None else res.pc.sigma,
        K=ord_rep.K, L=None if res.pc is None else res.pc.L)
    rep.write_sweep(out / "sweep.csv", sweep_rep)
    rep.fig_sweep(out / "sweep.png", sweep_rep)
    for line in sweep_rep.summary():
        print(line)
    return bool(ok)


def cmd_verify(args) -> int:
    out = _outdir(args)
    suites = {"ode": _verify_ode, "wave": _verify_wave,
              "flow": _verify_flow, "generation": _verify_generation,
              "propagation": _verify_propagation,
              "ordering": _verify_ordering, "all": _verify_all}
    passed = suites[args.suite](args, out)
    print("verify %s: %s" % (args.suite, "PASS" if passed else "FAIL"))
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p, config=True):
    if config:
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--preset", help="packaged scenario preset name "
                       "(a1 .. a9)")
        p.add_argument("--eps", type=float, default=None,
                       help="override the configured epsilon")
    p.add_argument("--out", default=None,
                   help="output file or directory (default: "
                   "$KPP_SHARP_OUT or ./out)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the configured sampling seed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kpp-sharp",
        description="Simulator and verification harness for the "
        "sharp-interface limit of a degenerate reaction-diffusion "
        "equation with drift.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("wave", help="sharp traveling wave profile and speed")
    p.add_argument("--m", type=float, default=None,
                   help="degeneracy exponent (default 2, or the config's)")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="bisection tolerance on c*")
    _add_common(p)
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("flow", help="drift the initial interface to t_gen")
    _add_common(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("simulate", help="run the PDE scheme")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("front", help="track the limit free boundary")
    p.add_argument("--method", choices=("markers", "levelset"),
                   default="markers")
    _add_common(p)
    p.set_defaults(func=cmd_front)

    p = sub.add_parser("sweep", help="eps-convergence sweep")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=("ode", "wave", "flow", "generation",
                                     "propagation", "ordering", "all"))
    p.add_argument("--m", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
