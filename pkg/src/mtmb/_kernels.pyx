# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled planted-disks kernels; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, INFINITY

cnp.import_array()

HIT_EPS = 1e-9


cdef inline Py_ssize_t _cell(double x, double h, Py_ssize_t ncell) noexcept nogil:
    cdef Py_ssize_t i = <Py_ssize_t>floor(x / h)
    if i >= ncell:
        return ncell - 1
    return i


cdef inline double _disk_distance(double px, double py, const double[:, ::1] centers,
                                  double r) noexcept nogil:
    cdef double best = INFINITY
    cdef double dx, dy, d
    cdef Py_ssize_t m
    for m in range(centers.shape[0]):
        dx = px - centers[m, 0]
        dy = py - centers[m, 1]
        d = sqrt(dx * dx + dy * dy) - r
        if d < best:
            best = d
    if best > 0.0:
        return best
    return 0.0


cdef inline double _plateau(double d, double lam, double f_max) noexcept nogil:
    cdef double v
    if d == 0.0:
        return f_max
    v = 1.0 - d / lam
    if v > 0.0:
        return f_max * v
    return 0.0


def planted_evaluate(c, bint dual, const double[:, ::1] g1, const double[:, ::1] g2,
                     double r, double lam, double delta, double h, Py_ssize_t ncell,
                     double f_max):
    cdef double x1, y1, x2, y2, sx, sy, d1, d2
    x1, y1, x2, y2 = c
    if not (0.0 <= x1 <= 1.0 and 0.0 <= y1 <= 1.0 and 0.0 <= x2 <= 1.0 and 0.0 <= y2 <= 1.0):
        raise ValueError(f"command {list(c)!r} outside [0, 1]^4")
    if not dual:
        return (_cell(x1, h, ncell), _cell(y1, h, ncell)), _plateau(
            _disk_distance(x1, y1, g1, r), lam, f_max)
    key = (_cell(x1, h, ncell), _cell(y1, h, ncell), _cell(x2, h, ncell), _cell(y2, h, ncell))
    sx = x1 - x2
    sy = y1 - y2
    if sqrt(sx * sx + sy * sy) < delta:
        return key, 0.0
    d1 = _disk_distance(x1, y1, g1, r)
    d2 = _disk_distance(x2, y2, g2, r)
    return key, _plateau(d1 if d1 > d2 else d2, lam, f_max)


def probe_coordinates(double h, Py_ssize_t ncell, Py_ssize_t k):
    cdef Py_ssize_t n = ncell * k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t q
    for q in range(n):
        xs[q] = (q + 0.5) * h / k
    return xs


def hit_grid(centers, double r, double lam, double f_max, double h, Py_ssize_t ncell,
             Py_ssize_t k):
    cdef const double[:, ::1] cs = np.ascontiguousarray(centers, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t n = ncell * k
    cdef double[::1] xs = probe_coordinates(h, ncell, k)
    hits_arr = np.zeros((n, n), dtype=np.uint8)
    cdef unsigned char[:, ::1] hits = hits_arr
    cdef Py_ssize_t a, b
    cdef double thr = f_max - HIT_EPS
    with nogil:
        for a in range(n):
            if xs[a] > 1.0:
                continue
            for b in range(n):
                if xs[b] > 1.0:
                    continue
                if _plateau(_disk_distance(xs[a], xs[b], cs, r), lam, f_max) >= thr:
                    hits[a, b] = 1
    return hits_arr


def solved_cells(hits, Py_ssize_t ncell, Py_ssize_t k):
    blocks = np.asarray(hits).reshape(ncell, k, ncell, k).any(axis=(1, 3))
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(blocks))]


cdef Py_ssize_t _extremes(const unsigned char[:, ::1] hits, double[::1] xs, Py_ssize_t i,
                          Py_ssize_t j, Py_ssize_t k, double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t b, a, lo, hi, m = 0
    for b in range(k):
        lo = -1
        hi = -1
        for a in range(k):
            if hits[i * k + a, j * k + b]:
                if lo < 0:
                    lo = a
                hi = a
        if lo >= 0:
            out[m, 0] = xs[i * k + lo]
            out[m, 1] = xs[j * k + b]
            m += 1
            if hi != lo:
                out[m, 0] = xs[i * k + hi]
                out[m, 1] = xs[j * k + b]
                m += 1
    return m


def dual_pair_count(hits1, hits2, double h, Py_ssize_t ncell, Py_ssize_t k, double delta):
    cdef const unsigned char[:, ::1] H1 = np.ascontiguousarray(hits1, dtype=np.uint8)
    cdef const unsigned char[:, ::1] H2 = np.ascontiguousarray(hits2, dtype=np.uint8)
    cdef double[::1] xs = probe_coordinates(h, ncell, k)
    cells1 = solved_cells(hits1, ncell, k)
    cells2 = solved_cells(hits2, ncell, k)
    cdef Py_ssize_t n1 = len(cells1), n2 = len(cells2)
    if n1 == 0 or n2 == 0:
        return 0
    cdef double[:, :, ::1] e2 = np.empty((n2, 2 * k, 2), dtype=np.float64)
    cdef Py_ssize_t[::1] m2 = np.empty(n2, dtype=np.intp)
    cdef double[:, ::1] e1 = np.empty((2 * k, 2), dtype=np.float64)
    cdef Py_ssize_t p, q, u, v, m1, count = 0
    cdef double dx, dy
    cdef bint ok
    for q in range(n2):
        m2[q] = _extremes(H2, xs, cells2[q][0], cells2[q][1], k, e2[q])
    for p in range(n1):
        m1 = _extremes(H1, xs, cells1[p][0], cells1[p][1], k, e1)
        with nogil:
            for q in range(n2):
                ok = False
                for u in range(m1):
                    for v in range(m2[q]):
                        dx = e1[u, 0] - e2[q, v, 0]
                        dy = e1[u, 1] - e2[q, v, 1]
                        if sqrt(dx * dx + dy * dy) >= delta:
                            ok = True
                            break
                    if ok:
                        break
                if ok:
                    count += 1
    return count
