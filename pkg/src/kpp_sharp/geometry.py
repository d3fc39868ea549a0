"""Polyline geometry helpers for closed interface curves.

Closed curves are stored as (n, 2) vertex arrays in counterclockwise
order without a repeated endpoint.  1D interfaces are the degenerate case
of two boundary points and are handled by the callers directly.
"""
from __future__ import annotations

import numpy as np
from matplotlib.path import Path as _MplPath
from scipy.interpolate import CubicSpline


def signed_area(points: np.ndarray) -> float:
    """Shoelace area; positive for counterclockwise orientation."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def ensure_ccw(points: np.ndarray) -> np.ndarray:
    return points if signed_area(points) > 0 else points[::-1].copy()


def outward_normals(points: np.ndarray) -> np.ndarray:
    """Unit outward normals of a CCW closed polyline via central differences."""
    tang = np.roll(points, -1, axis=0) - np.roll(points, 1, axis=0)
    n = np.stack([tang[:, 1], -tang[:, 0]], axis=1)
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def resample_closed(points: np.ndarray, n: int) -> np.ndarray:
    """Resample a closed curve at n uniform arc-length stations.

    A periodic cubic spline through the vertices keeps resampling errors at
    fourth order in the vertex spacing, so repeated per-step resampling does
    not erode smooth curves.
    """
    closed = np.vstack([points, points[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    if s[-1] <= 0:
        raise ValueError("degenerate curve cannot be resampled")
    spl = CubicSpline(s, closed, axis=0, bc_type="periodic")
    return spl(np.linspace(0.0, s[-1], n, endpoint=False))


def is_simple(points: np.ndarray) -> bool:
    """True when no two non-adjacent edges of the closed polyline intersect."""
    n = len(points)
    a = points
    b = np.roll(points, -1, axis=0)
    d = b - a
    # pairwise segment intersection via orientation tests, vectorized
    for i in range(n - 2):
        js = np.arange(i + 2, n if i > 0 else n - 1)
        p, r = a[i], d[i]
        q, s = a[js], d[js]
        rxs = r[0] * s[:, 1] - r[1] * s[:, 0]
        qp = q - p
        t_num = qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]
        u_num = qp[:, 0] * r[1] - qp[:, 1] * r[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = t_num / rxs
            u = u_num / rxs
        hit = (np.abs(rxs) > 1e-300) & (t > 1e-12) & (t < 1 - 1e-12) \
            & (u > 1e-12) & (u < 1 - 1e-12)
        if np.any(hit):
            return False
    return True


def contains(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Boolean inside test of query points against a closed polyline."""
    return _MplPath(points, closed=True).contains_points(queries)


def distance_to_polyline(queries: np.ndarray, points: np.ndarray,
                         closed: bool = True) -> np.ndarray:
    """Exact unsigned distance from query points to a polyline, chunked."""
    a = points
    b = np.roll(points, -1, axis=0) if closed else points[1:]
    if not closed:
        a = points[:-1]
    ab = b - a
    ab2 = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
    out = np.empty(len(queries))
    step = max(1, 4_000_000 // max(len(a), 1))
    for i in range(0, len(queries), step):
        q = queries[i:i + step]
        ap = q[:, None, :] - a[None, :, :]
        t = np.clip(np.sum(ap * ab[None, :, :], axis=2) / ab2[None, :], 0.0, 1.0)
        proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
        d2 = np.sum((q[:, None, :] - proj) ** 2, axis=2)
        out[i:i + step] = np.sqrt(d2.min(axis=1))
    return out


def signed_distance(queries: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Signed distance to a closed CCW polyline: negative inside."""
    d = distance_to_polyline(queries, points, closed=True)
    inside = contains(points, queries)
    return np.where(inside, -d, d)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two point sets."""
    from scipy.spatial import cKDTree

    ta, tb = cKDTree(a), cKDTree(b)
    return float(max(tb.query(a)[0].max(), ta.query(b)[0].max()))


def hausdorff_points_curve(pts: np.ndarray, curve: np.ndarray,
                           closed: bool = True, n_dense: int = 4096) -> float:
    """Symmetric Hausdorff distance between a point cloud and a polyline.

    The forward direction uses exact point-to-segment distances; the
    reverse direction samples the polyline densely.
    """
    from scipy.spatial import cKDTree

    fwd = distance_to_polyline(pts, curve, closed=closed).max()
    if closed:
        dense = resample_closed(curve, n_dense)
    else:
        seg = np.linalg.norm(np.diff(curve, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        su = np.linspace(0.0, s[-1], n_dense)
        dense = np.stack([np.interp(su, s, curve[:, k]) for k in range(curve.shape[1])], axis=1)
    rev = cKDTree(pts).query(dense)[0].max()
    return float(max(fwd, rev))
