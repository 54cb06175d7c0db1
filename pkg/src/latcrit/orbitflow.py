"""Flow side of the Dani correspondence.

The target x embeds as the unimodular lattice u_x Z^3; the diagonal flow
a_s = diag(e^{s/2}, e^{s/2}, e^{-s}) expands the plane and contracts the
last axis.  Peaks of the shortest cylinder-gauge value lambda1 along the
orbit encode the best-approximation transitions of x: the cube of the tail
limsup of lambda1 estimates the Dirichlet constant.

Shortest vectors are computed from a working-precision sweep: flow times are
visited in ascending order, a unimodular integer transform is carried from
step to step and re-reduced (LLL) in mpmath arithmetic, and the minimum is
taken over a certified coefficient box of the reduced columns in float64.
Plain float64 composition of a_s u_x loses the cancellation q*x - p once
e^{1.5 s} exceeds 2^53, so precision is scaled with the largest |s|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .dirichlet import XPair, as_xpair
from .errors import CapacityError, FlowRangeError, LatcritError
from .norms import CylinderGauge

_S_CAP = 300.0
_LLL_DELTA = 0.99


def u_matrix(x) -> np.ndarray:
    """[[1,0,x1],[0,1,x2],[0,0,1]]; columns generate the lattice of x."""
    xp = as_xpair(x)
    return np.array([[1.0, 0.0, xp.x1],
                     [0.0, 1.0, xp.x2],
                     [0.0, 0.0, 1.0]])


def flow_matrix(s: float) -> np.ndarray:
    """diag(e^{s/2}, e^{s/2}, e^{-s}), unit determinant."""
    s = float(s)
    if not math.isfinite(s) or abs(s) > _S_CAP:
        raise FlowRangeError(f"|s| = {abs(s):g} exceeds {_S_CAP:g}; "
                             "flow entries overflow")
    h = math.exp(0.5 * s)
    return np.diag([h, h, math.exp(-s)])


@dataclass(frozen=True)
class OrbitSample:
    """Shortest cylinder-gauge value lambda1 of the flowed lattice at time s."""

    s: float
    lambda1: float

    def in_K(self, r: float) -> bool:
        """Membership in the compact part K(r) = {lattice: lambda1 >= r}."""
        return self.lambda1 >= r


def _mp_coord(token, frac, val):
    if token is not None:
        if token.startswith("cbrt:"):
            return mp.cbrt(mp.mpf(token[5:]))
        if token.startswith("sqrt:"):
            return mp.sqrt(mp.mpf(token[5:]))
    if frac is not None:
        return mp.mpf(frac.numerator) / frac.denominator
    return mp.mpf(val)


def _mp_pair(xp: XPair):
    toks = xp.tokens if xp.tokens is not None else (None, None)
    exact = xp.exact if xp.exact is not None else (None, None)
    return (_mp_coord(toks[0], exact[0], xp.x1),
            _mp_coord(toks[1], exact[1], xp.x2))


def _dot3(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _gso3(cols, upto):
    bstar = [list(cols[0])]
    n2 = [_dot3(bstar[0], bstar[0])]
    mu = [[mp.mpf(0)] * 3 for _ in range(3)]
    for i in range(1, upto + 1):
        v = list(cols[i])
        for j in range(i):
            mu[i][j] = _dot3(cols[i], bstar[j]) / n2[j]
            for t in range(3):
                v[t] -= mu[i][j] * bstar[j][t]
        bstar.append(v)
        n2.append(_dot3(v, v))
    return n2, mu


def _mp_lll(cols, ucols, max_iter: int = 4000) -> None:
    """In-place LLL of three mp columns, mirroring ops on integer columns.

    Warm starts converge in a handful of iterations; the iteration cap only
    trips on degenerate input.
    """
    it = 0
    k = 1
    while k < 3:
        it += 1
        if it > max_iter:
            raise CapacityError("lattice reduction failed to converge")
        n2, mu = _gso3(cols, k)
        changed = False
        for j in range(k - 1, -1, -1):
            q = int(mp.nint(mu[k][j]))
            if q:
                for t in range(3):
                    cols[k][t] -= q * cols[j][t]
                ucols[k][0] -= q * ucols[j][0]
                ucols[k][1] -= q * ucols[j][1]
                ucols[k][2] -= q * ucols[j][2]
                changed = True
        if changed:
            n2, mu = _gso3(cols, k)
        if n2[k] >= (_LLL_DELTA - mu[k][k - 1] ** 2) * n2[k - 1]:
            k += 1
        else:
            cols[k], cols[k - 1] = cols[k - 1], cols[k]
            ucols[k], ucols[k - 1] = ucols[k - 1], ucols[k]
            k = max(k - 1, 1)


def _mp_columns(x1, x2, es2, em, ucols):
    # column j of a_s u_x U: the t-values keep q*x - p cancellation exact
    cols = []
    for u in ucols:
        t0 = u[0] + x1 * u[2]
        t1 = u[1] + x2 * u[2]
        cols.append([t0 * es2, t1 * es2, mp.mpf(u[2]) * em])
    return cols


def _lambda1_from_cols(cols, gauge, rmax3: float) -> float:
    bf = np.array([[float(c[t]) for c in cols] for t in range(3)])
    k = 4
    while True:
        rng = np.arange(-k, k + 1)
        cx, cy, cz = np.meshgrid(rng, rng, rng, indexing="ij")
        coeffs = np.stack([cx.ravel(), cy.ravel(), cz.ravel()])
        coeffs = coeffs[:, np.any(coeffs != 0, axis=0)]
        vals = gauge.gauge((bf @ coeffs).T)
        gmin = float(vals.min())
        # any vector of gauge < gmin has euclidean norm < gmin * rmax3, so
        # its coefficients are bounded row-wise by the inverse basis
        bound = np.linalg.norm(np.linalg.inv(bf), axis=1) * (gmin * rmax3)
        if np.all(bound <= k + 1e-9):
            return gmin
        k = int(max(np.ceil(bound.max()), k + 1))
        if k > 64:
            raise CapacityError("coefficient box for shortest vector exceeds 64")


def orbit_min_gauge(x, gauge: CylinderGauge, s_grid) -> list[OrbitSample]:
    """lambda1 along the flow at the given times, in the given order.

    Times are processed in ascending order internally so the carried integer
    transform stays near-reduced from step to step.
    """
    xp = as_xpair(x)
    s_arr = np.asarray(list(s_grid), dtype=float).ravel()
    if s_arr.size == 0:
        return []
    if not np.all(np.isfinite(s_arr)):
        raise FlowRangeError("flow times must be finite")
    s_abs = float(np.max(np.abs(s_arr)))
    if s_abs > _S_CAP:
        raise FlowRangeError(f"|s| = {s_abs:g} exceeds {_S_CAP:g}; "
                             "flow entries overflow")
    rmax3 = math.hypot(gauge.base.rmax, 1.0)
    prec = 96 + int(math.ceil(2.2 * s_abs))
    lam = np.empty(s_arr.size)
    with mp.workprec(prec):
        x1, x2 = _mp_pair(xp)
        ucols = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        for idx in np.argsort(s_arr, kind="stable"):
            s = mp.mpf(float(s_arr[idx]))
            cols = _mp_columns(x1, x2, mp.exp(s / 2), mp.exp(-s), ucols)
            _mp_lll(cols, ucols)
            lam[idx] = _lambda1_from_cols(cols, gauge, rmax3)
    return [OrbitSample(float(s_arr[i]), float(lam[i]))
            for i in range(s_arr.size)]


def dynamical_constant(x, gauge: CylinderGauge, s_max: float,
                       s_step: float = 0.05) -> tuple[float, float]:
    """(r_estimate, c = r_estimate^3) from the orbit tail s >= s_max / 2.

    Matched to dirichlet_constant at horizon q_max = round(e^{s_max}).
    """
    s_max = float(s_max)
    s_step = float(s_step)
    if s_max <= 0.0 or s_step <= 0.0:
        raise LatcritError("s_max and s_step must be positive")
    n = int(math.floor(s_max / s_step + 1e-9))
    grid = [i * s_step for i in range(n + 1)]
    if grid[-1] < s_max - 1e-12:
        grid.append(s_max)
    samples = orbit_min_gauge(x, gauge, grid)
    r = max(smp.lambda1 for smp in samples if smp.s >= 0.5 * s_max - 1e-12)
    return float(r), float(r ** 3)
