"""Vectorized numpy backend for the hot kernels.

Mirrors ``_ckern`` operation for operation.  Both backends keep the exact
same floating-point formulas (explicit multiply/add order, no BLAS reductions)
so results stay bit-comparable for the Euclidean, sup and max-functional
gauges; p-norm evaluations may differ by an ulp between libm and numpy.
"""

from __future__ import annotations

import numpy as np

from ..errors import CapacityError

BACKEND_NAME = "numpy"

CODE_EUCLIDEAN = 0
CODE_PNORM = 1
CODE_MAXDOT = 2

_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _gauge_vals(code, p, pre, normals, vx, vy):
    """Planar gauge on component arrays; operation order matches the C backend."""
    if code == CODE_MAXDOT:
        acc = np.abs(normals[0, 0] * vx + normals[0, 1] * vy)
        for k in range(1, normals.shape[0]):
            acc = np.maximum(acc, np.abs(normals[k, 0] * vx + normals[k, 1] * vy))
        return acc
    tx = pre[0, 0] * vx + pre[0, 1] * vy
    ty = pre[1, 0] * vx + pre[1, 1] * vy
    if code == CODE_EUCLIDEAN:
        return np.sqrt(tx * tx + ty * ty)
    return (np.abs(tx) ** p + np.abs(ty) ** p) ** (1.0 / p)


def _fold(q, x):
    """Fractional part of q*x folded into [-1/2, 1/2], exact to one rounding.

    Uses a Dekker two-product so the result is the correctly rounded value of
    q*x minus its nearest integer even when q*x has far more magnitude than
    precision headroom.
    """
    hi = q * x
    qc = q * _SPLIT
    q_h = qc - (qc - q)
    q_l = q - q_h
    xc = x * _SPLIT
    x_h = xc - (xc - x)
    x_l = x - x_h
    err = ((q_h * x_h - hi) + q_h * x_l + q_l * x_h) + q_l * x_l
    a = hi - np.rint(hi)  # exact: |hi - rint(hi)| <= 1/2 and same binade
    return a + err


def _certified_dist(code, p, pre, normals, rmax, y1, y2):
    """Scalar gauge distance from (y1, y2) to Z^2 with a certified search block."""
    c1 = 1.0 / rmax
    k = 2
    while True:
        offs = np.arange(-k, k + 1, dtype=float)
        ox, oy = np.meshgrid(offs, offs, indexing="ij")
        g = _gauge_vals(code, p, pre, normals, y1 - ox.ravel(), y2 - oy.ravel())
        best = float(g.min())
        if best <= (k + 0.5) * c1 or k >= 64:
            return best
        k += 1


def scan_best_approx(x1, x2, q_max, code, p, pre, normals, rmax, separable,
                     rational_eps=1e-12, chunk=1 << 19):
    """Best-approximation records of (x1, x2) for denominators 1..q_max.

    Returns (qs, ms): the strictly improving gauge distances
    m_q = dist(q*x, Z^2) together with their denominators.  Stops after the
    first m below rational_eps, which is emitted as an exact zero record.
    """
    qs_out: list[np.ndarray] = []
    ms_out: list[np.ndarray] = []
    best = np.inf
    q0 = 1
    if not separable:
        chunk = min(chunk, 1 << 16)
    while q0 <= q_max:
        q1 = min(int(q_max), q0 + chunk - 1)
        q = np.arange(q0, q1 + 1, dtype=np.float64)
        y1 = _fold(q, x1)
        y2 = _fold(q, x2)
        if separable:
            m = _gauge_vals(code, p, pre, normals, y1, y2)
        else:
            m = np.full(q.shape, np.inf)
            for dx in range(-2, 3):
                for dy in range(-2, 3):
                    m = np.minimum(m, _gauge_vals(code, p, pre, normals, y1 - dx, y2 - dy))
            need = m * rmax > 2.5  # 5x5 block not certified for this gauge
            if need.any():
                for i in np.nonzero(need)[0]:
                    m[i] = _certified_dist(code, p, pre, normals, rmax, y1[i], y2[i])
        run = np.minimum.accumulate(np.concatenate(([best], m)))
        rec = np.nonzero(m < run[:-1])[0]
        if rec.size:
            mr = m[rec]
            cut = np.nonzero(mr < rational_eps)[0]
            if cut.size:
                stop = cut[0]
                mr = mr[: stop + 1].copy()
                mr[stop] = 0.0
                qs_out.append(rec[: stop + 1].astype(np.int64) + q0)
                ms_out.append(mr)
                break
            qs_out.append(rec.astype(np.int64) + q0)
            ms_out.append(mr)
        best = float(run[-1])
        q0 = q1 + 1
    if qs_out:
        return np.concatenate(qs_out), np.concatenate(ms_out)
    return np.zeros(0, dtype=np.int64), np.zeros(0)


def _iter_blocks(basis, bounds, max_pts=1 << 22):
    """Yield (coefficient arrays, point components) covering the bounded box.

    Traversal is lexicographic in the coefficients; 3-D boxes are emitted in
    memory-bounded chunks.  Point components use explicit multiply/add with
    the same association as the compiled backend.
    """
    d = basis.shape[0]
    b = [int(x) for x in bounds]
    if d == 2:
        n1 = np.arange(-b[1], b[1] + 1, dtype=np.int64)
        for n0 in range(-b[0], b[0] + 1):
            f0 = float(n0)
            vx = basis[0, 0] * f0 + basis[0, 1] * n1
            vy = basis[1, 0] * f0 + basis[1, 1] * n1
            yield (np.full(n1.shape, n0, dtype=np.int64), n1), (vx, vy, None)
        return
    n2 = np.arange(-b[2], b[2] + 1, dtype=np.int64)[None, :]
    width2 = 2 * b[2] + 1
    step = max(1, max_pts // max(width2, 1))
    for n0 in range(-b[0], b[0] + 1):
        f0 = float(n0)
        for lo in range(-b[1], b[1] + 1, step):
            hi = min(lo + step - 1, b[1])
            n1 = np.arange(lo, hi + 1, dtype=np.int64)[:, None]
            vx = basis[0, 0] * f0 + basis[0, 1] * n1 + basis[0, 2] * n2
            vy = basis[1, 0] * f0 + basis[1, 1] * n1 + basis[1, 2] * n2
            vz = basis[2, 0] * f0 + basis[2, 1] * n1 + basis[2, 2] * n2
            shape = (n1.shape[0], width2)
            yield (np.full(shape, n0, dtype=np.int64),
                   np.broadcast_to(n1, shape),
                   np.broadcast_to(n2, shape)), (vx, vy, vz)


def _origin_mask(coeffs):
    m = coeffs[0] == 0
    for c in coeffs[1:]:
        m = m & (c == 0)
    return m


def _slice_gauge(code, p, pre, normals, cylinder, comps):
    vx, vy, vz = comps
    g = _gauge_vals(code, p, pre, normals, vx, vy)
    if cylinder:
        g = np.maximum(g, np.abs(vz))
    return g


def _box_guard(bounds, limit):
    total = 1
    for b in bounds:
        total *= 2 * int(b) + 1
    if total > limit:
        raise CapacityError(f"coefficient box of {total} points exceeds the limit of {limit}")


def collect_in_ball(basis, bounds, code, p, pre, normals, cylinder, cutoff, cap):
    """All nonzero coefficient vectors n with gauge(basis @ n) < cutoff.

    Output rows are in lexicographic coefficient order.  Raises CapacityError
    when more than ``cap`` points qualify or the search box itself is absurd.
    """
    _box_guard(bounds, max(2 * cap, 1 << 27))
    d = basis.shape[0]
    out: list[np.ndarray] = []
    count = 0
    for coeffs, comps in _iter_blocks(basis, bounds):
        g = _slice_gauge(code, p, pre, normals, cylinder, comps)
        mask = (g < cutoff) & ~_origin_mask(coeffs)
        idx = np.nonzero(mask)
        if idx[0].size:
            count += idx[0].size
            if count > cap:
                raise CapacityError(f"enumeration exceeds the cap of {cap} points")
            out.append(np.stack([c[idx] for c in coeffs], axis=1))
    if out:
        return np.concatenate(out, axis=0)
    return np.zeros((0, d), dtype=np.int64)


def first_below(basis, bounds, code, p, pre, normals, cylinder, cutoff):
    """First (lexicographic) nonzero coefficient vector below the cutoff, or None."""
    _box_guard(bounds, 1 << 27)
    for coeffs, comps in _iter_blocks(basis, bounds):
        g = _slice_gauge(code, p, pre, normals, cylinder, comps)
        mask = (g < cutoff) & ~_origin_mask(coeffs)
        idx = np.nonzero(mask)
        if idx[0].size:
            pos = tuple(ix[0] for ix in idx)  # row-major: lexicographic in the block
            return np.array([int(c[pos]) for c in coeffs], dtype=np.int64)
    return None


def _canonical(coeff):
    for c in coeff:
        if c != 0:
            return tuple(coeff) if c > 0 else tuple(-c2 for c2 in coeff)
    return tuple(coeff)


def min_gauge(basis, bounds, code, p, pre, normals, cylinder):
    """Minimum gauge over nonzero coefficients in the box, with its coefficient.

    Exact value ties resolve to the sign-canonicalized lexicographically
    smallest coefficient vector, independent of traversal order.
    """
    _box_guard(bounds, 1 << 27)
    best = np.inf
    ties: list[tuple] = []
    for coeffs, comps in _iter_blocks(basis, bounds):
        g = _slice_gauge(code, p, pre, normals, cylinder, comps)
        g = np.where(_origin_mask(coeffs), np.inf, g)
        local = float(g.min())
        if not np.isfinite(local) or local > best:
            continue
        idx = np.nonzero(g == local)
        cand = [_canonical([int(c[pos]) for c in coeffs]) for pos in zip(*idx)]
        if local < best:
            best = local
            ties = cand
        else:
            ties.extend(cand)
    if not np.isfinite(best):
        return np.inf, None
    return best, np.array(min(ties), dtype=np.int64)
