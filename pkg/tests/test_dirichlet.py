import math
from fractions import Fraction

import numpy as np
import pytest

from latcrit.dirichlet import (XPair, as_xpair, ba_pair_cubic, best_approximations,
                               dirichlet_constant, dist_to_integer_lattice,
                               parse_x)
from latcrit.errors import NormSpecError
from latcrit.norms import ConvexDomain2

EUCLID = ConvexDomain2.euclidean()
SUP = ConvexDomain2.sup()


def _exact_fold(q, x):
    """Fold q*x into [-1/2, 1/2] through exact rational arithmetic."""
    t = q * Fraction(x)
    t -= round(t)
    return float(t)


def _dense_min_dist(x1, x2, q_max, domain):
    """Straight fold-and-minimize scan, no record bookkeeping."""
    y1 = np.array([_exact_fold(q, x1) for q in range(1, q_max + 1)])
    y2 = np.array([_exact_fold(q, x2) for q in range(1, q_max + 1)])
    if domain.kind == "euclidean":
        d = np.sqrt(y1 * y1 + y2 * y2)
    elif domain.kind == "sup":
        d = np.maximum(np.abs(y1), np.abs(y2))
    else:
        d = np.array([domain.gauge((a, b)) for a, b in zip(y1, y2)])
    return d


def test_dist_tie_is_canonical():
    m, p = dist_to_integer_lattice(EUCLID, (0.5, 0.0))
    assert m == 0.5
    assert tuple(p) == (0, 0)


def test_dist_sup_values():
    m, p = dist_to_integer_lattice(SUP, (0.3, 0.7))
    assert abs(m - 0.3) < 1e-15
    assert tuple(p) == (0, 1)
    m, p = dist_to_integer_lattice(SUP, (1.0, 2.0))
    assert m == 0.0
    assert tuple(p) == (1, 2)


def test_records_monotone():
    x = parse_x("0.2137,0.5851")
    recs = best_approximations(x, EUCLID, 2000)
    qs = [r.q for r in recs]
    ms = [r.m for r in recs]
    assert qs == sorted(qs) and len(set(qs)) == len(qs)
    assert all(ms[i] > ms[i + 1] for i in range(len(ms) - 1))
    assert qs[0] == 1


def test_records_match_dense_scan():
    rng = np.random.default_rng(8)
    for _ in range(6):
        x1, x2 = rng.uniform(0, 1, size=2)
        d = _dense_min_dist(x1, x2, 3000, EUCLID)
        recs = best_approximations(as_xpair((x1, x2)), EUCLID, 3000)
        run = np.minimum.accumulate(d)
        # a record happens exactly where the running minimum strictly drops
        drops = [1] + [q + 1 for q in range(1, len(d)) if d[q] < run[q - 1]]
        assert [r.q for r in recs] == drops
        for r in recs:
            assert r.m == d[r.q - 1]


def test_reduction_identity_against_dense_oracle():
    # c over a window equals the max of q_{k+1} m_k^2 over the same window,
    # checked against a scan that never builds records at all
    rng = np.random.default_rng(21)
    q_max = 10 ** 4
    for _ in range(8):
        x1, x2 = rng.uniform(0, 1, size=2)
        d = _dense_min_dist(x1, x2, q_max, EUCLID)
        run = np.minimum.accumulate(d)
        q = np.arange(1, q_max + 1, dtype=float)
        vals = np.concatenate([(q[:-1] + 1.0) * run[:-1] ** 2,
                               [q_max * run[-1] ** 2]])
        oracle = float(vals.max())
        recs = best_approximations(as_xpair((x1, x2)), EUCLID, q_max)
        trans = [r.transition_value for r in recs if r.transition_value is not None]
        got = max(trans + [q_max * recs[-1].m ** 2])
        assert abs(got - oracle) <= 1e-9 * max(1.0, oracle)


def test_equivariance_integer_shift():
    # dyadic coordinates so the shifted floats are exact
    rng = np.random.default_rng(5)
    for _ in range(5):
        x1 = round(rng.random() * 2 ** 30) / 2 ** 30
        x2 = round(rng.random() * 2 ** 30) / 2 ** 30
        a = dirichlet_constant(as_xpair((x1, x2)), EUCLID, 10 ** 4)
        b = dirichlet_constant(as_xpair((x1 + 3.0, x2 - 2.0)), EUCLID, 10 ** 4)
        assert a.c_estimate == b.c_estimate
        assert [r.q for r in a.records] == [r.q for r in b.records]


def test_rational_terminates_exactly():
    est = dirichlet_constant(parse_x("1/3,1/3"), EUCLID, 10 ** 5)
    assert est.rational and est.rational_exact
    assert est.c_estimate == 0.0
    assert est.records[-1].q == 3
    assert est.records[-1].m == 0.0


def test_rational_float_not_exact():
    # the float 0.1 is a dyadic near-miss of 1/10: q=10 lands inside the
    # declaration threshold but exact confirmation must stay off
    est = dirichlet_constant(as_xpair((0.1, 0.3)), EUCLID, 10 ** 5)
    assert est.rational
    assert not est.rational_exact
    assert est.c_estimate == 0.0


def test_rational_decimal_literal_is_exact():
    est = dirichlet_constant(parse_x("0.1,0.3"), EUCLID, 10 ** 5)
    assert est.rational and est.rational_exact
    assert est.records[-1].q == 10


def test_origin_single_record():
    recs = best_approximations(parse_x("0,0"), EUCLID, 100)
    assert len(recs) == 1
    assert recs[0].q == 1 and recs[0].m == 0.0


def test_monotone_horizon():
    x = parse_x("0.7548776662466927,0.5698402909980532")
    prev = None
    for q_max in (10 ** 3, 10 ** 4, 10 ** 5):
        recs = best_approximations(x, EUCLID, q_max)
        trans = [r.transition_value for r in recs if r.transition_value is not None]
        peak = max(trans + [q_max * recs[-1].m ** 2])
        if prev is not None:
            assert peak >= prev - 1e-15
        prev = peak


def test_parse_x_tokens():
    x = parse_x("cbrt:2,sqrt:5")
    assert abs(x.x1 - 2 ** (1 / 3)) < 1e-15
    assert abs(x.x2 - math.sqrt(5)) < 1e-15
    assert x.exact is None
    y = parse_x("1/3,2/7")
    assert y.exact == (Fraction(1, 3), Fraction(2, 7))
    z = parse_x("0.25,0.75")
    assert z.exact == (Fraction(1, 4), Fraction(3, 4))


def test_parse_x_rejects_garbage():
    for bad in ("1.0", "a,b", "1,2,3", "sqrt:-1,0"):
        with pytest.raises(NormSpecError):
            parse_x(bad)


def test_ba_pair_values():
    x = ba_pair_cubic()
    assert abs(x.x1 - 2 ** (1 / 3)) < 1e-15
    assert abs(x.x2 - 2 ** (2 / 3)) < 1e-15
    assert x.tokens == ("cbrt:2", "cbrt:4")


def test_badly_approximable_pair_bounded_below():
    est = dirichlet_constant(ba_pair_cubic(), EUCLID, 10 ** 6)
    assert not est.rational
    vals = [r.q * r.m ** 2 for r in est.records[3:]]
    assert min(vals) > 0.01
    assert est.c_estimate > 0.05


def test_bound_random_sample():
    rng = np.random.default_rng(13)
    for _ in range(10):
        x1, x2 = rng.uniform(0, 1, size=2)
        e = dirichlet_constant(as_xpair((x1, x2)), EUCLID, 10 ** 5)
        s = dirichlet_constant(as_xpair((x1, x2)), SUP, 10 ** 5)
        assert e.c_estimate <= 2 / math.sqrt(3) + 1e-6
        assert s.c_estimate <= 1 + 1e-6


def test_estimate_q_max_floor():
    from latcrit.errors import LatcritError
    with pytest.raises(LatcritError):
        dirichlet_constant(parse_x("0.3,0.4"), EUCLID, 0)
