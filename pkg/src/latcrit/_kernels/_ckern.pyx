# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the hot kernels.

Operation-for-operation mirror of ``_npkern``: the same multiply/add
association, the same fold arithmetic (fma here equals the Dekker product
there, both are the exact residual of q*x), the same record logic.  Results
are bit-comparable for the Euclidean, sup and max-functional gauges.  The
scan and box loops run without the GIL so thread pools parallelize.
"""

from libc.math cimport fabs, sqrt, pow, rint, fma, INFINITY
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy

import numpy as np

from ..errors import CapacityError

BACKEND_NAME = "c"

CODE_EUCLIDEAN = 0
CODE_PNORM = 1
CODE_MAXDOT = 2


cdef struct GaugeC:
    int code
    double p
    double pre00, pre01, pre10, pre11
    const double* nrm
    int nn


cdef inline double _g(const GaugeC* gc, double vx, double vy) noexcept nogil:
    cdef double acc, t, tx, ty
    cdef int k
    if gc.code == 2:
        acc = fabs(gc.nrm[0] * vx + gc.nrm[1] * vy)
        for k in range(1, gc.nn):
            t = fabs(gc.nrm[2 * k] * vx + gc.nrm[2 * k + 1] * vy)
            if t > acc:
                acc = t
        return acc
    tx = gc.pre00 * vx + gc.pre01 * vy
    ty = gc.pre10 * vx + gc.pre11 * vy
    if gc.code == 0:
        return sqrt(tx * tx + ty * ty)
    return pow(pow(fabs(tx), gc.p) + pow(fabs(ty), gc.p), 1.0 / gc.p)


cdef inline double _fold1(double q, double x) noexcept nogil:
    # exact two-product residual, then exact subtraction of the nearest integer
    cdef double hi = q * x
    cdef double err = fma(q, x, -hi)
    cdef double a = hi - rint(hi)
    return a + err


cdef double _cert1(const GaugeC* gc, double rmax, double y1, double y2) noexcept nogil:
    # grow the block until best <= (k + 1/2) / rmax certifies the minimum
    cdef double c1 = 1.0 / rmax
    cdef double best, g
    cdef int k = 2
    cdef int i, j
    while True:
        best = INFINITY
        for i in range(-k, k + 1):
            for j in range(-k, k + 1):
                g = _g(gc, y1 - i, y2 - j)
                if g < best:
                    best = g
        if best <= (k + 0.5) * c1 or k >= 64:
            return best
        k += 1


def _as_arrays(pre, normals):
    pre_a = np.ascontiguousarray(pre if pre is not None else np.eye(2), dtype=np.float64)
    nrm_a = np.ascontiguousarray(normals if normals is not None else np.zeros((1, 2)),
                                 dtype=np.float64)
    if nrm_a.shape[0] == 0:
        nrm_a = np.zeros((1, 2))
    return pre_a, nrm_a


def _box_guard(bounds, limit):
    total = 1
    for b in bounds:
        total *= 2 * int(b) + 1
    if total > limit:
        raise CapacityError(f"coefficient box of {total} points exceeds the limit of {limit}")


def scan_best_approx(x1, x2, q_max, code, p, pre, normals, rmax, separable,
                     rational_eps=1e-12, chunk=0):
    """Best-approximation records of (x1, x2) for denominators 1..q_max.

    Same contract as the numpy backend; ``chunk`` is accepted and ignored.
    """
    pre_a, nrm_a = _as_arrays(pre, normals)
    cdef double[:, ::1] pre_mv = pre_a
    cdef double[:, ::1] nrm_mv = nrm_a
    cdef GaugeC gc
    gc.code = int(code)
    gc.p = float(p)
    gc.pre00 = pre_mv[0, 0]; gc.pre01 = pre_mv[0, 1]
    gc.pre10 = pre_mv[1, 0]; gc.pre11 = pre_mv[1, 1]
    gc.nrm = &nrm_mv[0, 0]
    gc.nn = nrm_mv.shape[0]
    cdef double cx1 = float(x1), cx2 = float(x2)
    cdef double crmax = float(rmax), reps = float(rational_eps)
    cdef long long qmax = int(q_max)
    cdef int sep = 1 if separable else 0
    qs: list = []
    ms: list = []
    cdef double best = INFINITY
    cdef double q, y1, y2, m, t
    cdef long long qi
    cdef int dx, dy, stop = 0
    with nogil:
        for qi in range(1, qmax + 1):
            q = <double>qi
            y1 = _fold1(q, cx1)
            y2 = _fold1(q, cx2)
            if sep:
                m = _g(&gc, y1, y2)
            else:
                m = INFINITY
                for dx in range(-2, 3):
                    for dy in range(-2, 3):
                        t = _g(&gc, y1 - dx, y2 - dy)
                        if t < m:
                            m = t
                if m * crmax > 2.5:
                    m = _cert1(&gc, crmax, y1, y2)
            if m < best:
                best = m
                if m < reps:
                    stop = 1
                with gil:
                    qs.append(qi)
                    ms.append(0.0 if stop else m)
            if stop:
                break
    return np.asarray(qs, dtype=np.int64), np.asarray(ms, dtype=np.float64)


cdef struct BoxC:
    double b00, b01, b02, b10, b11, b12, b20, b21, b22
    long long n0, n1, n2
    int d
    int cylinder
    GaugeC gc


cdef int _setup_box(BoxC* bx, basis, bounds, code, p, pre, normals, cylinder,
                    keep) except -1:
    b_a = np.ascontiguousarray(basis, dtype=np.float64)
    pre_a, nrm_a = _as_arrays(pre, normals)
    keep.extend((b_a, pre_a, nrm_a))
    cdef double[:, ::1] bm = b_a
    cdef double[:, ::1] pre_mv = pre_a
    cdef double[:, ::1] nrm_mv = nrm_a
    bx.d = bm.shape[0]
    bx.b00 = bm[0, 0]; bx.b01 = bm[0, 1]
    bx.b10 = bm[1, 0]; bx.b11 = bm[1, 1]
    if bx.d == 3:
        bx.b02 = bm[0, 2]; bx.b12 = bm[1, 2]
        bx.b20 = bm[2, 0]; bx.b21 = bm[2, 1]; bx.b22 = bm[2, 2]
    else:
        bx.b02 = 0.0; bx.b12 = 0.0; bx.b20 = 0.0; bx.b21 = 0.0; bx.b22 = 0.0
    bx.n0 = int(bounds[0])
    bx.n1 = int(bounds[1])
    bx.n2 = int(bounds[2]) if bx.d == 3 else 0
    bx.cylinder = 1 if cylinder else 0
    bx.gc.code = int(code)
    bx.gc.p = float(p)
    bx.gc.pre00 = pre_mv[0, 0]; bx.gc.pre01 = pre_mv[0, 1]
    bx.gc.pre10 = pre_mv[1, 0]; bx.gc.pre11 = pre_mv[1, 1]
    bx.gc.nrm = &nrm_mv[0, 0]
    bx.gc.nn = nrm_mv.shape[0]
    return 0


cdef inline double _point_gauge(const BoxC* bx, double f0, double f1, double f2) noexcept nogil:
    cdef double vx, vy, vz, g
    if bx.d == 2:
        vx = bx.b00 * f0 + bx.b01 * f1
        vy = bx.b10 * f0 + bx.b11 * f1
        return _g(&bx.gc, vx, vy)
    vx = bx.b00 * f0 + bx.b01 * f1 + bx.b02 * f2
    vy = bx.b10 * f0 + bx.b11 * f1 + bx.b12 * f2
    g = _g(&bx.gc, vx, vy)
    if bx.cylinder:
        vz = bx.b20 * f0 + bx.b21 * f1 + bx.b22 * f2
        if fabs(vz) > g:
            g = fabs(vz)
    return g


def collect_in_ball(basis, bounds, code, p, pre, normals, cylinder, cutoff, cap):
    """All nonzero coefficient vectors n with gauge(basis @ n) < cutoff.

    Rows come out in lexicographic coefficient order; CapacityError past cap.
    """
    _box_guard(bounds, max(2 * int(cap), 1 << 27))
    keep: list = []
    cdef BoxC bx
    _setup_box(&bx, basis, bounds, code, p, pre, normals, cylinder, keep)
    cdef double cut = float(cutoff)
    cdef long long capc = int(cap)
    cdef long long alloc = 4096
    cdef int d = bx.d
    cdef long long* buf = <long long*>malloc(alloc * d * sizeof(long long))
    if buf == NULL:
        raise MemoryError()
    cdef long long cnt = 0
    cdef int overflow = 0, nomem = 0
    cdef long long i0, i1, i2
    cdef double g
    cdef long long* nbuf
    cdef long long[:, ::1] out_mv
    with nogil:
        for i0 in range(-bx.n0, bx.n0 + 1):
            if overflow or nomem:
                break
            for i1 in range(-bx.n1, bx.n1 + 1):
                if overflow or nomem:
                    break
                for i2 in range(-bx.n2, bx.n2 + 1):
                    if i0 == 0 and i1 == 0 and i2 == 0:
                        continue
                    g = _point_gauge(&bx, <double>i0, <double>i1, <double>i2)
                    if g < cut:
                        if cnt >= capc:
                            overflow = 1
                            break
                        if cnt == alloc:
                            alloc = alloc * 2
                            nbuf = <long long*>realloc(buf, alloc * d * sizeof(long long))
                            if nbuf == NULL:
                                nomem = 1
                                break
                            buf = nbuf
                        buf[cnt * d] = i0
                        buf[cnt * d + 1] = i1
                        if d == 3:
                            buf[cnt * d + 2] = i2
                        cnt += 1
    try:
        if nomem:
            raise MemoryError()
        if overflow:
            raise CapacityError(f"enumeration exceeds the cap of {capc} points")
        out = np.zeros((cnt, d), dtype=np.int64)
        if cnt:
            out_mv = out
            memcpy(&out_mv[0, 0], buf, <size_t>(cnt * d) * sizeof(long long))
        return out
    finally:
        free(buf)


def first_below(basis, bounds, code, p, pre, normals, cylinder, cutoff):
    """First (lexicographic) nonzero coefficient vector below the cutoff, or None."""
    _box_guard(bounds, 1 << 27)
    keep: list = []
    cdef BoxC bx
    _setup_box(&bx, basis, bounds, code, p, pre, normals, cylinder, keep)
    cdef double cut = float(cutoff)
    cdef long long i0, i1, i2
    cdef long long h0 = 0, h1 = 0, h2 = 0
    cdef int found = 0
    cdef int d = bx.d
    with nogil:
        for i0 in range(-bx.n0, bx.n0 + 1):
            if found:
                break
            for i1 in range(-bx.n1, bx.n1 + 1):
                if found:
                    break
                for i2 in range(-bx.n2, bx.n2 + 1):
                    if i0 == 0 and i1 == 0 and i2 == 0:
                        continue
                    if _point_gauge(&bx, <double>i0, <double>i1, <double>i2) < cut:
                        h0 = i0; h1 = i1; h2 = i2
                        found = 1
                        break
    if not found:
        return None
    if d == 2:
        return np.array([h0, h1], dtype=np.int64)
    return np.array([h0, h1, h2], dtype=np.int64)


def _canon(c0, c1, c2, d):
    coeff = (c0, c1) if d == 2 else (c0, c1, c2)
    for c in coeff:
        if c != 0:
            return coeff if c > 0 else tuple(-x for x in coeff)
    return coeff


def min_gauge(basis, bounds, code, p, pre, normals, cylinder):
    """Minimum gauge over nonzero coefficients in the box, with its coefficient.

    Same tie rule as the numpy backend: sign-canonicalized lexicographic
    minimum among exact-value ties.
    """
    _box_guard(bounds, 1 << 27)
    keep: list = []
    cdef BoxC bx
    _setup_box(&bx, basis, bounds, code, p, pre, normals, cylinder, keep)
    cdef double best = INFINITY
    cdef double g
    cdef long long i0, i1, i2
    cdef int d = bx.d
    ties: list = []
    with nogil:
        for i0 in range(-bx.n0, bx.n0 + 1):
            for i1 in range(-bx.n1, bx.n1 + 1):
                for i2 in range(-bx.n2, bx.n2 + 1):
                    if i0 == 0 and i1 == 0 and i2 == 0:
                        continue
                    g = _point_gauge(&bx, <double>i0, <double>i1, <double>i2)
                    if g <= best:
                        with gil:
                            if g < best:
                                best = g
                                ties = [_canon(i0, i1, i2, d)]
                            else:
                                ties.append(_canon(i0, i1, i2, d))
    if best == INFINITY:
        return np.inf, None
    return float(best), np.array(min(ties), dtype=np.int64)
