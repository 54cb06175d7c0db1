"""Best-approximation records and the Dirichlet constant c_nu(x).

For a planar gauge nu and a target pair x, the records are the denominators
q at which dist_nu(q x, Z^2) strictly improves.  Since the inner minimum of
the defining limsup is constant between consecutive records, the limsup of
t * min^2 reduces to the record transitions q_{k+1} * m_k^2; the constant is
estimated from the transitions in a tail window plus the partial term at the
horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import LatcritError, NormSpecError
from .norms import ConvexDomain2

_RATIONAL_EPS = 1e-12


@dataclass(frozen=True)
class XPair:
    """Approximation target; optional exact and symbolic forms.

    ``exact`` holds Fractions when both entries are known rationals (every
    float is one); ``tokens`` holds textual forms like ``cbrt:2`` that
    high-precision consumers re-evaluate at their working precision.
    """

    x1: float
    x2: float
    exact: tuple[Fraction, Fraction] | None = None
    tokens: tuple[str, str] | None = None

    @classmethod
    def from_floats(cls, x1: float, x2: float) -> "XPair":
        return cls(float(x1), float(x2),
                   exact=(Fraction(float(x1)), Fraction(float(x2))))


def _parse_x_scalar(text: str) -> tuple[float, Fraction | None, str]:
    text = text.strip()
    if text.startswith("cbrt:"):
        v = float(text[5:])
        return v ** (1.0 / 3.0), None, text
    if text.startswith("sqrt:"):
        v = float(text[5:])
        if v < 0:
            raise NormSpecError(f"sqrt of negative value in {text!r}")
        return math.sqrt(v), None, text
    try:
        frac = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise NormSpecError(f"cannot parse coordinate {text!r}") from e
    return float(frac), frac, text


def parse_x(text: str) -> XPair:
    """Parse 'a,b' where each entry is a decimal, fraction, or cbrt:/sqrt: token."""
    parts = text.split(",")
    if len(parts) != 2:
        raise NormSpecError(f"expected two comma-separated coordinates, got {text!r}")
    v1, f1, t1 = _parse_x_scalar(parts[0])
    v2, f2, t2 = _parse_x_scalar(parts[1])
    exact = (f1, f2) if (f1 is not None and f2 is not None) else None
    return XPair(v1, v2, exact=exact, tokens=(t1, t2))


def as_xpair(x) -> XPair:
    if isinstance(x, XPair):
        return x
    if isinstance(x, str):
        return parse_x(x)
    x1, x2 = x
    return XPair.from_floats(x1, x2)


def ba_pair_cubic() -> XPair:
    """(2^{1/3}, 2^{2/3}): a classical badly approximable pair.

    The coordinates span the cubic field Q(2^{1/3}) over Q, which keeps
    q * dist(q x, Z^2)^2 bounded away from zero; this is corroborated
    empirically here, not proved.
    """
    return XPair(2.0 ** (1.0 / 3.0), 2.0 ** (2.0 / 3.0),
                 tokens=("cbrt:2", "cbrt:4"))


# -- integer-lattice distance -------------------------------------------------


def dist_to_integer_lattice(domain: ConvexDomain2, y) -> tuple[float, np.ndarray]:
    """min over p in Z^2 of gauge(y - p) and the achieving p.

    Searches a block around the coordinatewise rounding, growing it until
    points outside cannot beat the current best (their Euclidean distance is
    at least k + 1/2, so their gauge exceeds (k + 1/2) / rmax).  Exact-value
    ties resolve to the lexicographically smallest p.
    """
    y = np.asarray(y, dtype=float)
    p0 = np.rint(y)
    rmax = domain.rmax
    k = 2
    while True:
        offs = np.arange(-k, k + 1, dtype=float)
        ox, oy = np.meshgrid(offs, offs, indexing="ij")
        px = (p0[0] + ox).ravel()
        py = (p0[1] + oy).ravel()
        g = domain.gauge(np.stack([y[0] - px, y[1] - py], axis=-1))
        best = float(g.min())
        if best <= (k + 0.5) / rmax or k >= 64:
            idx = np.nonzero(g == best)[0]
            cand = sorted((px[i], py[i]) for i in idx)
            return best, np.array(cand[0], dtype=np.int64)
        k += 1


# -- record scan ---------------------------------------------------------------


@dataclass(frozen=True)
class BestApproxRecord:
    """A strictly improving denominator: m = dist(q x, Z^2).

    transition_value is q_next * m^2, the supremum of t * min^2 over the
    interval where this record is the minimum; None for the last record.
    """

    q: int
    m: float
    transition_value: float | None


def best_approximations(x, domain: ConvexDomain2, q_max: int) -> list[BestApproxRecord]:
    """Records of the scan q = 1..q_max; a final zero record closes the list
    when a denominator with dist below 1e-12 is hit (rational detection)."""
    xp = as_xpair(x)
    q_max = int(q_max)
    if q_max < 1:
        raise LatcritError(f"q_max must be at least 1, got {q_max}")
    d = domain.descriptor
    qs, ms = _kernels.scan_best_approx(xp.x1, xp.x2, q_max, d.code, d.p, d.pre,
                                       d.normals, d.rmax, d.separable,
                                       rational_eps=_RATIONAL_EPS)
    out = []
    n = len(qs)
    for k in range(n):
        trans = float(qs[k + 1]) * float(ms[k]) ** 2 if k + 1 < n else None
        out.append(BestApproxRecord(int(qs[k]), float(ms[k]), trans))
    return out


def _confirmed_rational(xp: XPair, q: int) -> bool:
    if xp.exact is None:
        return False
    return (xp.exact[0] * q).denominator == 1 and (xp.exact[1] * q).denominator == 1


@dataclass(frozen=True)
class DirichletEstimate:
    """Finite-horizon estimate of c_nu(x) = limsup t * (min_{q<=t} m)^2.

    c_estimate maximizes the transitions reaching into the tail window
    (q_{k+1} >= sqrt(q_max)) together with the partial term q_max * m_last^2;
    tail_sup tracks only completed transitions over the last half of the
    record sequence.  rational means a zero record closed the scan;
    rational_exact that exact arithmetic confirmed it.
    """

    c_estimate: float
    tail_sup: float
    records: list[BestApproxRecord]
    rational: bool
    rational_exact: bool = False


def dirichlet_constant(x, domain: ConvexDomain2, q_max: int) -> DirichletEstimate:
    xp = as_xpair(x)
    q_max = int(q_max)
    records = best_approximations(xp, domain, q_max)
    if records and records[-1].m == 0.0:
        return DirichletEstimate(0.0, 0.0, records, True,
                                 _confirmed_rational(xp, records[-1].q))
    window = math.sqrt(q_max)
    # a transition belongs to the tail when its endpoint q_{k+1} does, so
    # every peak the flow tail sees at matched horizon is counted
    cands = [records[i].transition_value for i in range(len(records) - 1)
             if records[i + 1].q >= window]
    partial = q_max * records[-1].m ** 2
    c_estimate = max(cands + [partial])
    half = records[len(records) // 2:]
    tail = [r.transition_value for r in half if r.transition_value is not None]
    tail_sup = max(tail) if tail else partial
    return DirichletEstimate(float(c_estimate), float(tail_sup), records, False)
