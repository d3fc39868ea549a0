"""TOML run configuration.

A run file has sections [params], [grid], [initial], [chemo] (with
[[chemo.base]] / [[chemo.perturbation]] bump tables), and optional [sweep]
and [verify] sections.  All cross-field constraints are validated at load
time and reported together; loaders raise ConfigError, which the CLI maps
to exit code 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:                      # Python < 3.11
    import tomli as tomllib

from .model import Bump, ChemoFieldSpec, Domain, Grid, InitialDataSpec, Params


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def _take(section: dict, name: str, keys: set, issues: list):
    unknown = set(section) - keys
    if unknown:
        issues.append(f"[{name}] unknown keys: {sorted(unknown)}")


@dataclass
class SweepSettings:
    eps: tuple = (0.04, 0.02, 0.01)
    times: tuple = ()                 # checkpoint times; default T/4, T/2, T
    cells_per_eps: float = 0.0        # >0: resolve h = eps / cells_per_eps


@dataclass
class VerifySettings:
    seed: int = 0
    d0: float = 0.0                   # 0 -> 10% of the smallest domain side
    n_markers: int = 512
    dt_flow: float = 1e-3
    dt_front: float = 0.0             # 0 -> solver default
    n_samples: int = 400
    tol_num: float = 1e-3
    C0: float = 2.0
    C_G: float = 1.0
    M: float = 0.0                    # 0 -> C0 * measured sup|lap v_eps|
    m0_ladder: tuple = (5.0, 10.0, 20.0, 40.0)
    K_ladder: tuple = (4.0, 8.0, 16.0, 32.0, 64.0)
    sigma_ladder: tuple = (0.004, 0.002, 0.001)
    L_ladder: tuple = (5.0, 8.0)


@dataclass
class RunConfig:
    m: float
    epsilon: float
    T: float
    eta: float
    domain: Domain
    cells: tuple
    chemo: ChemoFieldSpec
    initial: InitialDataSpec
    sweep: SweepSettings = field(default_factory=SweepSettings)
    verify: VerifySettings = field(default_factory=VerifySettings)

    # -- derived objects ----------------------------------------------------
    def params(self, eps: float | None = None) -> Params:
        return Params(self.epsilon if eps is None else eps,
                      self.m, self.T, self.eta, self.domain)

    def grid(self, eps: float | None = None) -> Grid:
        cpe = self.sweep.cells_per_eps
        if eps is not None and cpe > 0:
            shape = tuple(max(n, int(-(-side * cpe // eps)))
                          for n, side in zip(self.cells, self.domain.sides))
        else:
            shape = self.cells
        if len(shape) == 2:
            shape = (shape[1], shape[0])       # array layout is (ny, nx)
        return Grid(self.domain, shape)

    def d0(self) -> float:
        return self.verify.d0 or 0.1 * min(self.domain.sides)

    def checkpoint_times(self, params: Params) -> tuple:
        if self.sweep.times:
            return tuple(self.sweep.times)
        return (params.T / 4, params.T / 2, params.T)

    # -- loading ------------------------------------------------------------
    @classmethod
    def from_dict(cls, data: dict, origin: str = "<dict>") -> "RunConfig":
        issues: list[str] = []

        def sec(name, required=True):
            s = data.get(name)
            if s is None and required:
                issues.append(f"missing [{name}] section")
                return {}
            return dict(s or {})

        _take(data, "top level", {"params", "grid", "initial", "chemo",
                                  "sweep", "verify"}, issues)
        p = sec("params")
        g = sec("grid")
        ini = sec("initial")
        ch = sec("chemo")
        sw = sec("sweep", required=False)
        vf = sec("verify", required=False)
        _take(p, "params", {"m", "epsilon", "T", "eta",
                            "domain_lo", "domain_hi"}, issues)
        _take(g, "grid", {"cells"}, issues)
        _take(ini, "initial", {"shape", "center", "radii", "height",
                               "margin"}, issues)
        _take(ch, "chemo", {"ball_center", "ball_radius", "base",
                            "perturbation"}, issues)
        _take(sw, "sweep", {"eps", "times", "cells_per_eps"}, issues)
        _take(vf, "verify", {f.name for f in
                             VerifySettings.__dataclass_fields__.values()},
              issues)

        def bump_list(rows, label):
            out = []
            for i, row in enumerate(rows or []):
                row = dict(row)
                _take(row, f"chemo.{label}[{i}]",
                      {"amplitude", "center", "radius", "envelope",
                       "t_center", "t_width"}, issues)
                try:
                    out.append(Bump(amplitude=float(row["amplitude"]),
                                    center=tuple(row["center"]),
                                    radius=float(row["radius"]),
                                    envelope=row.get("envelope", "const"),
                                    t_center=float(row.get("t_center", 0.0)),
                                    t_width=float(row.get("t_width", 1.0))))
                except (KeyError, TypeError, ValueError) as exc:
                    issues.append(f"chemo.{label}[{i}]: {exc}")
            return tuple(out)

        base_terms = bump_list(ch.get("base"), "base")
        pert_terms = bump_list(ch.get("perturbation"), "perturbation")
        if issues:
            raise ConfigError(f"{origin}: " + "; ".join(issues))

        try:
            domain = Domain(tuple(float(x) for x in p["domain_lo"]),
                            tuple(float(x) for x in p["domain_hi"]))
            chemo = ChemoFieldSpec(
                base_terms=base_terms,
                perturbation_terms=pert_terms,
                ball_center=tuple(ch.get("ball_center",
                                         (0.0,) * domain.ndim)),
                ball_radius=float(ch.get("ball_radius", float("inf"))))
            initial = InitialDataSpec(shape=ini["shape"],
                                      center=tuple(ini["center"]),
                                      radii=tuple(ini["radii"]),
                                      height=float(ini["height"]),
                                      margin=float(ini.get("margin", 0.0)))
            cfg = cls(m=float(p["m"]), epsilon=float(p["epsilon"]),
                      T=float(p["T"]), eta=float(p["eta"]), domain=domain,
                      cells=tuple(int(n) for n in g["cells"]),
                      chemo=chemo, initial=initial,
                      sweep=SweepSettings(**{k: tuple(v) if
                                             isinstance(v, list) else v
                                             for k, v in sw.items()}),
                      verify=VerifySettings(**{k: tuple(v) if
                                               isinstance(v, list) else v
                                               for k, v in vf.items()}))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{origin}: {exc}") from exc

        cls._cross_validate(cfg, origin)
        return cfg

    @staticmethod
    def _cross_validate(cfg: "RunConfig", origin: str) -> None:
        issues = []
        if len(cfg.cells) != cfg.domain.ndim:
            issues.append("grid.cells rank must match the domain dimension")
        if any(n < 8 for n in cfg.cells):
            issues.append("grid.cells entries must be >= 8")
        try:
            cfg.params()
        except ValueError as exc:
            issues.append(str(exc))
        try:
            cfg.initial.validate_inside(cfg.domain)
        except ValueError as exc:
            issues.append(str(exc))
        eps = cfg.sweep.eps
        if len(eps) and any(b >= a for a, b in zip(eps, eps[1:])):
            issues.append("sweep.eps must decrease strictly")
        if any(e <= 0 or e > 1 for e in eps):
            issues.append("sweep.eps entries must lie in (0, 1]")
        terms = cfg.chemo.base_terms + cfg.chemo.perturbation_terms
        if terms:
            c = cfg.chemo.ball_center
            r = cfg.chemo.ball_radius
            if len(c) != cfg.domain.ndim:
                issues.append("chemo.ball_center rank mismatch")
            elif not all(lo < ci - r and ci + r < hi for lo, ci, hi in
                         zip(cfg.domain.lo, c, cfg.domain.hi)):
                issues.append("chemo support ball must sit strictly inside "
                              "the domain")
        if issues:
            raise ConfigError(f"{origin}: " + "; ".join(issues))

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}")
        return cls.from_dict(data, origin=str(path))


def load_preset(name: str) -> RunConfig:
    """Load one of the packaged scenario presets by name (e.g. 'a3')."""
    root = Path(__file__).parent / "presets"
    path = root / f"{name}.toml"
    if not path.exists():
        known = sorted(q.stem for q in root.glob("*.toml"))
        raise ConfigError(f"unknown preset '{name}'; available: {known}")
    return RunConfig.from_file(path)
