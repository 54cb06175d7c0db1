"""End-to-end acceptance checks, one numbered criterion per test.

Each test prints exactly one ACCEPTANCE line so the run log doubles as a
checklist; the assert carries the same condition.
"""

import itertools
import json
import math
import time
from fractions import Fraction

import numpy as np

from latcrit.cli import main
from latcrit.critical2d import (critical_determinant, critical_locus_2d)
from latcrit.cylinder import (CriticalLatticeDesc, Piece, hajos_sample,
                              realize_critical, shear_to_top)
from latcrit.dirichlet import (as_xpair, best_approximations,
                               dirichlet_constant, parse_x)
from latcrit.lattices import is_admissible, points_in_shell
from latcrit.norms import ConvexDomain2, CylinderGauge
from latcrit.verify import run_battery

EUCLID = ConvexDomain2.euclidean()
DISK_DELTA = math.sqrt(3.0) / 2.0


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def _battery_ok(results) -> tuple[bool, str]:
    ok = all(r.passed for r in results)
    return ok, "; ".join(r.detail for r in results)


def test_criterion_01_disk_critdet(tmp_path, capsys):
    out = tmp_path / "critdet.json"
    t0 = time.perf_counter()
    code = main(["critdet", "--norm", "euclidean", "--grid", "512",
                 "--output", "json", "--out", str(out)])
    dt = time.perf_counter() - t0
    capsys.readouterr()
    delta = json.loads(out.read_text())["delta"]
    err = abs(delta - DISK_DELTA)
    ok = code == 0 and err <= 1e-9 and dt < 5.0
    _report(1, ok, f"delta={delta:.12f} err={err:.3e} (tol 1e-9), {dt:.2f}s (< 5s)")


def test_criterion_02_linear_covariance():
    rng = np.random.default_rng(40)
    worst = 0.0
    count = 0
    while count < 20:
        g = rng.normal(size=(2, 2))
        if abs(np.linalg.det(g)) < 0.1:
            continue
        count += 1
        dom = ConvexDomain2.linear_image(g, EUCLID)
        want = abs(np.linalg.det(g)) * DISK_DELTA
        rel = abs(critical_determinant(dom) - want) / want
        worst = max(worst, rel)
    ok = worst <= 1e-7
    _report(2, ok, f"20 maps, worst relative error {worst:.3e} (tol 1e-7 rel)")


def test_criterion_03_locus_battery():
    t0 = time.perf_counter()
    results = run_battery("locus-structure", n=50, seed=0)
    dt = time.perf_counter() - t0
    ok, detail = _battery_ok(results)
    ok = ok and dt < 60.0
    _report(3, ok, f"{detail}, {dt:.1f}s (< 60s)")


def test_criterion_04_hajos_battery():
    cube = CylinderGauge(ConvexDomain2.sup())
    perms = list(itertools.permutations(range(3)))
    rng = np.random.default_rng(4)
    worst_cov = 0.0
    bad = 0
    for k in range(1000):
        p = np.zeros((3, 3))
        for i, j in enumerate(perms[k % 6]):
            p[i, j] = 1.0
        lat = hajos_sample(p, rng.uniform(-2, 2, size=3))
        worst_cov = max(worst_cov, abs(lat.covolume - 1.0))
        if not is_admissible(lat, cube, 1.0):
            bad += 1
    ok = worst_cov <= 1e-12 and bad == 0
    _report(4, ok, f"1000 lattices over 6 permutations, worst covolume error "
                   f"{worst_cov:.3e} (tol 1e-12), {bad} inadmissible")


def test_criterion_05_delta_equality():
    t0 = time.perf_counter()
    results = run_battery("delta-equality", n_starts=200, seed=0, threads=4)
    dt = time.perf_counter() - t0
    ok, detail = _battery_ok(results)
    ok = ok and dt < 300.0
    _report(5, ok, f"{detail}, {dt:.1f}s (< 300s)")


def test_criterion_06_dirichlet_bound():
    t0 = time.perf_counter()
    results = run_battery("dirichlet-bound", n=100, q_max=10 ** 6, seed=0,
                          threads=4)
    dt = time.perf_counter() - t0
    ok, detail = _battery_ok(results)
    ok = ok and dt < 120.0
    _report(6, ok, f"{detail}, {dt:.1f}s (< 120s)")


def test_criterion_07_rational_degeneracy():
    rng = np.random.default_rng(7)
    bad = []
    for _ in range(20):
        q1, q2 = rng.integers(2, 97, size=2)
        p1 = int(rng.integers(0, q1))
        p2 = int(rng.integers(0, q2))
        est = dirichlet_constant(parse_x(f"{p1}/{q1},{p2}/{q2}"), EUCLID, 10 ** 5)
        if est.c_estimate != 0.0 or not est.rational:
            bad.append((p1, q1, p2, q2))
    ok = not bad
    _report(7, ok, f"20 rational x, c identically zero: {len(bad)} failures")


def test_criterion_08_ba_gap_and_bounded_orbit():
    results = run_battery("ba-orbit", q_max=10 ** 7, s_hi=40.0, s_step=0.05)
    ok, detail = _battery_ok(results)
    _report(8, ok, detail)


def test_criterion_09_dani_consistency():
    results = run_battery("dani-consistency", n=10, s_max=14.0, s_step=0.01,
                          seed=42, tol=0.05)
    ok, detail = _battery_ok(results)
    _report(9, ok, detail)


def test_criterion_10_shear_deformation():
    gauge = CylinderGauge(EUCLID)
    bases = critical_locus_2d(EUCLID, n_samples=20)
    rng = np.random.default_rng(10)
    worst_cov = 0.0
    failures = []
    for i, planar in enumerate(bases):
        shear = tuple(rng.uniform(-2, 2, size=2))
        lat = realize_critical(
            CriticalLatticeDesc(Piece.LowerShear, planar.basis, shear),
            EUCLID, delta=DISK_DELTA)
        path = shear_to_top(lat, gauge, delta=DISK_DELTA)
        final = path.final
        worst_cov = max(worst_cov, abs(final.covolume - lat.covolume))
        pts = points_in_shell(final, gauge, 1.0 - 1e-8, 1.0 + 1e-8)
        tops = pts[np.abs(np.abs(pts[:, 2]) - 1.0) <= 1e-8]
        rank = int(np.linalg.matrix_rank(tops, tol=1e-6)) if len(tops) else 0
        path_ok = True
        for t in np.linspace(0.0, path.tau, 7):
            m = path.path_matrix_at(float(t))
            if not (m[0, 0] == 1.0 and m[1, 1] == 1.0
                    and abs(m[2, 2] - 1.0) <= 1e-9
                    and m[0, 1] == 0.0 and m[0, 2] == 0.0
                    and m[1, 0] == 0.0 and m[1, 2] == 0.0):
                path_ok = False
        if rank < 3 or not is_admissible(final, gauge, 1.0) or not path_ok \
                or abs(final.covolume - lat.covolume) > 1e-8:
            failures.append(i)
    ok = not failures
    _report(10, ok, f"20 shears to top: {len(failures)} failures, worst "
                    f"covolume drift {worst_cov:.3e} (tol 1e-8)")


def test_criterion_11_record_reduction_identity():
    rng = np.random.default_rng(11)
    q_max = 10 ** 4
    worst = 0.0
    for _ in range(20):
        x1, x2 = rng.uniform(0, 1, size=2)
        # dense-grid side, computed without any record machinery
        tgt1 = [float(q * Fraction(x1) - round(q * Fraction(x1)))
                for q in range(1, q_max + 1)]
        tgt2 = [float(q * Fraction(x2) - round(q * Fraction(x2)))
                for q in range(1, q_max + 1)]
        d = np.sqrt(np.array(tgt1) ** 2 + np.array(tgt2) ** 2)
        run = np.minimum.accumulate(d)
        t = np.arange(1, q_max + 1, dtype=float)
        dense = float(np.concatenate([(t[:-1] + 1.0) * run[:-1] ** 2,
                                      [q_max * run[-1] ** 2]]).max())
        recs = best_approximations(as_xpair((x1, x2)), EUCLID, q_max)
        trans = [r.transition_value for r in recs
                 if r.transition_value is not None]
        reduced = max(trans + [q_max * recs[-1].m ** 2])
        worst = max(worst, abs(dense - reduced))
    ok = worst <= 1e-9
    _report(11, ok, f"20 x at q_max=1e4, worst |dense - reduced| = "
                    f"{worst:.3e} (tol 1e-9)")
