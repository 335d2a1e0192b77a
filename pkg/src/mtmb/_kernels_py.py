"""Pure-Python planted-disks kernels.

Reference implementation and import-time fallback for ``_kernels``. Every
floating point expression is written in the same order as the compiled
version so both backends agree bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

HIT_EPS = 1e-9


def _cell(x: float, h: float, ncell: int) -> int:
    i = int(math.floor(x / h))
    return ncell - 1 if i >= ncell else i


def _disk_distance(px: float, py: float, centers, r: float) -> float:
    best = math.inf
    for cx, cy in centers:
        dx = px - cx
        dy = py - cy
        d = math.sqrt(dx * dx + dy * dy) - r
        if d < best:
            best = d
    return best if best > 0.0 else 0.0


def _plateau(d: float, lam: float, f_max: float) -> float:
    if d == 0.0:
        return f_max
    v = 1.0 - d / lam
    return f_max * v if v > 0.0 else 0.0


def planted_evaluate(c, dual: bool, g1, g2, r: float, lam: float, delta: float,
                     h: float, ncell: int, f_max: float):
    """Return ``(behavior_key, fitness)`` for one command in ``[0, 1]^4``."""
    x1, y1, x2, y2 = (float(v) for v in c)
    for v in (x1, y1, x2, y2):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"command component {v!r} outside [0, 1]")
    c1 = _centers(g1)
    if not dual:
        key = (_cell(x1, h, ncell), _cell(y1, h, ncell))
        return key, _plateau(_disk_distance(x1, y1, c1, r), lam, f_max)
    key = (_cell(x1, h, ncell), _cell(y1, h, ncell), _cell(x2, h, ncell), _cell(y2, h, ncell))
    sx = x1 - x2
    sy = y1 - y2
    if math.sqrt(sx * sx + sy * sy) < delta:
        return key, 0.0
    d1 = _disk_distance(x1, y1, c1, r)
    d2 = _disk_distance(x2, y2, _centers(g2), r)
    return key, _plateau(d1 if d1 > d2 else d2, lam, f_max)


def _centers(g):
    if isinstance(g, np.ndarray):
        return g.tolist()
    return g


def probe_coordinates(h: float, ncell: int, k: int) -> np.ndarray:
    q = np.arange(ncell * k, dtype=float)
    return (q + 0.5) * h / k


def hit_grid(centers, r: float, lam: float, f_max: float, h: float, ncell: int,
             k: int) -> np.ndarray:
    """Solution mask on the cell-centered probe lattice, indexed ``[ix, iy]``.

    Probes past 1.0 (partial last cell) are outside the command box and
    never hit.
    """
    xs = probe_coordinates(h, ncell, k)
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    best = np.full((xs.size, xs.size), np.inf)
    for cx, cy in centers:
        dx = (xs - cx)[:, None]
        dy = (xs - cy)[None, :]
        best = np.minimum(best, np.sqrt(dx * dx + dy * dy) - r)
    d = np.where(best > 0.0, best, 0.0)
    v = 1.0 - d / lam
    fit = np.where(d == 0.0, f_max, np.where(v > 0.0, f_max * v, 0.0))
    inside = xs <= 1.0
    hits = (fit >= f_max - HIT_EPS) & inside[:, None] & inside[None, :]
    return hits.astype(np.uint8)


def _extreme_points(hits: np.ndarray, xs: np.ndarray, i: int, j: int, k: int):
    block = hits[i * k:(i + 1) * k, j * k:(j + 1) * k]
    pts = []
    for b in range(k):
        col = np.flatnonzero(block[:, b])
        if col.size:
            y = xs[j * k + b]
            pts.append((xs[i * k + col[0]], y))
            if col.size > 1:
                pts.append((xs[i * k + col[-1]], y))
    return np.array(pts, dtype=float).reshape(-1, 2)


def solved_cells(hits: np.ndarray, ncell: int, k: int) -> list[tuple[int, int]]:
    blocks = hits.reshape(ncell, k, ncell, k).any(axis=(1, 3))
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(blocks))]


def dual_pair_count(hits1: np.ndarray, hits2: np.ndarray, h: float, ncell: int, k: int,
                    delta: float) -> int:
    """Count 4-D cells ``(c1, c2)`` holding a lattice solution.

    A pair counts when some hit probe of ``c1`` and some hit probe of ``c2``
    are at least ``delta`` apart. The farthest pair of two point sets lies on
    their hull vertices, and every hull vertex of a lattice set is extreme in
    its row, so only row extremes are compared.
    """
    xs = probe_coordinates(h, ncell, k)
    cells1 = solved_cells(hits1, ncell, k)
    cells2 = solved_cells(hits2, ncell, k)
    if not cells1 or not cells2:
        return 0
    ext2 = [_extreme_points(hits2, xs, i, j, k) for i, j in cells2]
    owners = np.repeat(np.arange(len(ext2)), [e.shape[0] for e in ext2])
    all2 = np.concatenate(ext2)
    count = 0
    for i, j in cells1:
        e1 = _extreme_points(hits1, xs, i, j, k)
        dx = e1[:, 0][:, None] - all2[:, 0][None, :]
        dy = e1[:, 1][:, None] - all2[:, 1][None, :]
        ok = (np.sqrt(dx * dx + dy * dy) >= delta).any(axis=0)
        count += int(np.bincount(owners, weights=ok, minlength=len(ext2)).astype(bool).sum())
    return count
