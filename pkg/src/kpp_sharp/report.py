"""Deterministic output writers: CSV tables, field dumps and figures.

All numeric output is routed through one fixed format so a given
(config, seed) pair produces byte-identical files on every run.  Figures
are rendered with the Agg backend straight to disk; they carry the same
data as the CSVs and exist purely for eyeballing.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np

from .model import ScalarField
from .pde import SimResult, extract_level_set

_FMT = "%.12g"


def fmt(x) -> str:
    """Fixed-width-free but reproducible representation of one number."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if np.isnan(x):
        return "nan"
    return _FMT % x


def ensure_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path, header, rows) -> Path:
    """Write rows (iterables of numbers/strings) under a header line."""
    path = Path(path)
    ensure_dir(path.parent)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


# ---------------------------------------------------------------------------
# field dumps
# ---------------------------------------------------------------------------

def write_field(path, field: ScalarField, t: float) -> Path:
    """Plain-text dump: header "N nx [ny] dx [dy] t", then row-major values."""
    path = Path(path)
    ensure_dir(path.parent)
    grid = field.grid
    vals = np.asarray(field.values)
    head = [str(vals.size)]
    if grid.ndim == 1:
        head += [str(grid.shape[0]), _FMT % grid.dx[0]]
    else:
        ny, nx = grid.shape
        head += [str(nx), str(ny), _FMT % grid.dx[1], _FMT % grid.dx[0]]
    head.append(_FMT % t)
    lines = [" ".join(head)]
    lines += ["%.17g" % v for v in vals.ravel(order="C")]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_field(path) -> tuple[np.ndarray, dict]:
    """Inverse of write_field; returns (values, header metadata)."""
    with open(path) as fh:
        head = fh.readline().split()
        vals = np.array([float(line) for line in fh])
    if len(head) == 4:
        meta = {"N": int(head[0]), "nx": int(head[1]),
                "dx": float(head[2]), "t": float(head[3])}
        shape = (meta["nx"],)
    else:
        meta = {"N": int(head[0]), "nx": int(head[1]), "ny": int(head[2]),
                "dx": float(head[3]), "dy": float(head[4]),
                "t": float(head[5])}
        shape = (meta["ny"], meta["nx"])
    if meta["N"] != vals.size:
        raise ValueError(f"{path}: header count does not match data")
    return vals.reshape(shape), meta


# ---------------------------------------------------------------------------
# CSV tables
# ---------------------------------------------------------------------------

def _extent(field: ScalarField, level: float = 0.5) -> float:
    """Diameter of the level set (0 when the level is not attained)."""
    pts = extract_level_set(field, level)
    if len(pts) < 2:
        return 0.0
    if field.grid.ndim == 1:
        return float(pts[:, 0].max() - pts[:, 0].min())
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def write_snapshots(path, result: SimResult) -> Path:
    rows = [(s.t, s.mass, s.u_min, s.u_max, _extent(s.field))
            for s in result.snapshots]
    return write_csv(path, ["t", "mass", "u_min", "u_max", "extent"], rows)


def write_trajectory(path, traj, max_times: int = 101) -> Path:
    """Marker positions over time: columns t, marker_index, x, y."""
    n = len(traj.times)
    keep = (range(n) if n <= max_times else
            sorted({int(round(i)) for i in
                    np.linspace(0, n - 1, max_times)}))
    rows = []
    for i in keep:
        t, curve = traj.times[i], traj.curves[i]
        for j, p in enumerate(curve):
            x = p[0]
            y = p[1] if traj.ndim == 2 else 0.0
            rows.append((t, j, x, y))
    return write_csv(path, ["t", "marker_index", "x", "y"], rows)


def write_interface(path, points: np.ndarray) -> Path:
    points = np.asarray(points, dtype=float)
    rows = [(j, p[0], p[1] if points.shape[1] == 2 else 0.0)
            for j, p in enumerate(points)]
    return write_csv(path, ["marker_index", "x", "y"], rows)


def write_sweep(path, report) -> Path:
    header = ["eps", "t", "thickness", "hausdorff",
              "m0_witness", "sigma", "K", "L", "pass_flags"]
    rows = [(r.eps, r.t, r.thickness, r.hausdorff,
             r.m0_witness, r.sigma, r.K, r.L, r.pass_flags)
            for r in report.rows]
    return write_csv(path, header, rows)


def write_wave(path, profile, n: int = 2001) -> Path:
    """Tabulate the wave: z, U, dU/dz and the flux slope d(U^m)/dz."""
    z = np.linspace(profile.z[0], 0.5, n)
    u, du, dw = profile.eval(z)
    rows = zip(z, u, du, dw)
    return write_csv(path, ["z", "U", "dU", "dUm"], rows)


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def fig_wave(path, profile) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    z = np.linspace(max(profile.z[0], -20.0), 1.0, 1200)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(z, profile.eval(z)[0], lw=1.5)
    ax.axhline(0.0, color="0.6", lw=0.5)
    ax.axvline(0.0, color="0.6", lw=0.5)
    ax.set_xlabel("z")
    ax.set_ylabel("U")
    ax.set_title(f"traveling wave, m={profile.m:g}, c*={profile.c:.6f}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_field(path, field: ScalarField, t: float, interface=None) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    grid = field.grid
    fig, ax = plt.subplots(figsize=(6, 4))
    if grid.ndim == 1:
        x = grid.centers()[:, 0]
        ax.plot(x, field.values, lw=1.2)
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        if interface is not None:
            for xi in np.atleast_2d(interface)[:, 0]:
                ax.axvline(xi, color="tab:red", lw=0.8, ls="--")
    else:
        lo, hi = grid.domain.lo, grid.domain.hi
        im = ax.imshow(field.values, origin="lower",
                       extent=(lo[0], hi[0], lo[1], hi[1]),
                       vmin=0.0, cmap="viridis")
        fig.colorbar(im, ax=ax, label="u")
        if interface is not None:
            pts = np.asarray(interface)
            closed = np.vstack([pts, pts[:1]])
            ax.plot(closed[:, 0], closed[:, 1], color="tab:red", lw=1.0)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    ax.set_title(f"u at t={t:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_fronts(path, trajs: dict, times) -> Path:
    """Overlay interface curves of one or more trajectories at given times."""
    path = Path(path)
    ensure_dir(path.parent)
    fig, ax = plt.subplots(figsize=(6, 5))
    styles = ["-", "--", ":", "-."]
    for k, (label, traj) in enumerate(trajs.items()):
        ls = styles[k % len(styles)]
        for i, t in enumerate(times):
            pts = traj.interface(t).points
            if traj.ndim == 1:
                for x in pts[:, 0]:
                    ax.axvline(x, ls=ls, lw=0.9,
                               label=label if i == 0 and x == pts[0, 0]
                               else None)
            else:
                closed = np.vstack([pts, pts[:1]])
                ax.plot(closed[:, 0], closed[:, 1], ls=ls, lw=0.9,
                        label=label if i == 0 else None)
    ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title("front positions")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def fig_sweep(path, report) -> Path:
    """Log-log thickness and interface-error curves against eps."""
    path = Path(path)
    ensure_dir(path.parent)
    times = sorted({r.t for r in report.rows})
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for t in times:
        rows = sorted((r for r in report.rows if r.t == t),
                      key=lambda r: -r.eps)
        eps = [r.eps for r in rows]
        axes[0].loglog(eps, [r.thickness for r in rows],
                       "o-", label=f"t={t:g}")
        axes[1].loglog(eps, [max(r.hausdorff, 1e-16) for r in rows],
                       "s-", label=f"t={t:g}")
    guide = np.array([max(r.eps for r in report.rows),
                      min(r.eps for r in report.rows)])
    axes[0].loglog(guide, 4.0 * guide, "k--", lw=0.7, label="slope 1")
    axes[1].loglog(guide, 1.5 * guide, "k--", lw=0.7, label="slope 1")
    axes[0].set_xlabel("eps")
    axes[0].set_ylabel("layer thickness")
    axes[1].set_xlabel("eps")
    axes[1].set_ylabel("interface Hausdorff error")
    for ax in axes:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
