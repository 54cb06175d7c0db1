import itertools
import math

import numpy as np
import pytest

from latcrit.critical2d import critical_determinant, critical_locus_2d
from latcrit.cylinder import (CriticalLatticeDesc, Piece, ShearPath, ZClass,
                              classify_z, corroborate_delta_equality,
                              descend_covolume, hajos_sample, realize_critical,
                              shear_to_top)
from latcrit.errors import CriticalityError, LatcritError
from latcrit.lattices import Lattice, is_admissible
from latcrit.norms import ConvexDomain2, CylinderGauge

HEX_M = np.array([[1.0, 0.5], [0.0, math.sqrt(3.0) / 2.0]])
DISK = ConvexDomain2.euclidean()
DISK_DELTA = math.sqrt(3.0) / 2.0


def test_realize_upper_layout():
    lat = realize_critical(CriticalLatticeDesc(Piece.UpperShear, HEX_M, (0.3, -0.7)),
                           DISK, delta=DISK_DELTA)
    want = np.array([[1.0, 0.5, 0.3],
                     [0.0, math.sqrt(3.0) / 2.0, -0.7],
                     [0.0, 0.0, 1.0]])
    assert np.array_equal(lat.basis, want)
    assert classify_z(lat) == ZClass.ZMinus


def test_realize_lower_layout():
    a, b = 0.25, 0.6
    lat = realize_critical(CriticalLatticeDesc(Piece.LowerShear, HEX_M, (a, b)),
                           DISK, delta=DISK_DELTA)
    block = np.zeros((3, 3))
    block[:2, :2] = HEX_M
    block[2, 2] = 1.0
    unip = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [a, b, 1.0]])
    assert np.allclose(lat.basis, unip @ block, atol=0)
    assert classify_z(lat) == ZClass.ZPlus
    assert lat.contains((0.0, 0.0, 1.0))


def test_realize_normalized_unit_covolume():
    lat = realize_critical(CriticalLatticeDesc(Piece.UpperShear, HEX_M, (0.1, 0.2),
                                               normalize=True),
                           DISK, delta=DISK_DELTA)
    assert abs(lat.covolume - 1.0) < 1e-12


def test_realize_is_admissible():
    gauge = CylinderGauge(DISK)
    rng = np.random.default_rng(14)
    for _ in range(10):
        shear = tuple(rng.uniform(-3, 3, size=2))
        piece = Piece.UpperShear if rng.random() < 0.5 else Piece.LowerShear
        lat = realize_critical(CriticalLatticeDesc(piece, HEX_M, shear),
                               DISK, delta=DISK_DELTA)
        assert is_admissible(lat, gauge, 1.0)
        assert abs(lat.covolume - DISK_DELTA) < 1e-12


def test_realize_rejects_wrong_covolume():
    bad = HEX_M * 1.1  # admissible but covolume != Delta
    with pytest.raises(CriticalityError):
        realize_critical(CriticalLatticeDesc(Piece.UpperShear, bad, (0.0, 0.0)),
                         DISK, delta=DISK_DELTA)


def test_realize_rejects_inadmissible_base():
    # right covolume, but the planar lattice meets the open disk
    bad = np.array([[0.9, 0.0], [0.0, DISK_DELTA / 0.9]])
    with pytest.raises(CriticalityError):
        realize_critical(CriticalLatticeDesc(Piece.LowerShear, bad, (0.2, 0.1)),
                         DISK, delta=DISK_DELTA)


def test_classify_z_cases():
    assert classify_z(Lattice(np.eye(3))) == ZClass.Both
    # irrational rotation in the plane with scaled axis: axis point only
    r = math.sqrt(2.0)
    b = np.array([[r, 0.3, 0.0], [0.0, r / 2, 0.0], [0.0, 0.0, 1.0]])
    assert classify_z(Lattice(b)) == ZClass.Both
    # generic GL3 image: neither
    g = np.array([[1.0, 0.31, 0.17], [0.11, 1.2, 0.41], [0.23, 0.05, 1.1]])
    assert classify_z(Lattice(g)) == ZClass.Neither


def test_shear_to_top_on_lower_piece():
    gauge = CylinderGauge(DISK)
    lat = realize_critical(CriticalLatticeDesc(Piece.LowerShear, HEX_M, (0.3, -0.7)),
                           DISK, delta=DISK_DELTA)
    path = shear_to_top(lat, gauge, delta=DISK_DELTA)
    assert isinstance(path, ShearPath)
    assert path.tau > 0.0
    final = path.final
    assert abs(final.covolume - lat.covolume) < 1e-12
    assert is_admissible(final, gauge, 1.0)
    # three independent points on the top/bottom faces
    from latcrit.lattices import points_in_shell
    pts = points_in_shell(final, gauge, 1.0 - 1e-8, 1.0 + 1e-8)
    tops = pts[np.abs(np.abs(pts[:, 2]) - 1.0) <= 1e-8]
    assert np.linalg.matrix_rank(tops, tol=1e-6) == 3
    # path matrix consistency at the endpoint
    end = path.path_matrix_at(path.tau)
    assert np.allclose(end @ lat.basis, final.basis, atol=1e-9)


def test_shear_path_matrices_lower_unipotent():
    gauge = CylinderGauge(DISK)
    lat = realize_critical(CriticalLatticeDesc(Piece.LowerShear, HEX_M, (0.12, 0.55)),
                           DISK, delta=DISK_DELTA)
    path = shear_to_top(lat, gauge, delta=DISK_DELTA)
    for t in np.linspace(0.0, path.tau, 9):
        m = path.path_matrix_at(float(t))
        assert m[0, 0] == 1.0 and m[1, 1] == 1.0
        assert abs(m[2, 2] - 1.0) < 1e-9
        assert m[0, 1] == 0.0 and m[0, 2] == 0.0
        assert m[1, 0] == 0.0 and m[1, 2] == 0.0


def test_shear_to_top_upper_is_fixed_point():
    gauge = CylinderGauge(DISK)
    lat = realize_critical(CriticalLatticeDesc(Piece.UpperShear, HEX_M, (0.4, 0.9)),
                           DISK, delta=DISK_DELTA)
    path = shear_to_top(lat, gauge, delta=DISK_DELTA)
    assert path.tau == 0.0
    assert np.array_equal(path.final.basis, lat.basis)


def test_hajos_sample_cube_admissible():
    cube = CylinderGauge(ConvexDomain2.sup())
    perms = list(itertools.permutations(range(3)))
    rng = np.random.default_rng(3)
    for k in range(30):
        p = np.zeros((3, 3))
        for i, j in enumerate(perms[k % 6]):
            p[i, j] = 1.0
        lat = hajos_sample(p, rng.uniform(-1, 1, size=3))
        assert abs(lat.covolume - 1.0) < 1e-12
        assert is_admissible(lat, cube, 1.0)


def test_hajos_sample_validates_permutation():
    with pytest.raises(LatcritError):
        hajos_sample(np.eye(3) * 2.0, (0.1, 0.2, 0.3))
    with pytest.raises(LatcritError):
        hajos_sample(np.ones((3, 3)), (0.1, 0.2, 0.3))


def test_descend_from_critical_returns_its_covolume():
    lat = realize_critical(CriticalLatticeDesc(Piece.UpperShear, HEX_M, (0.3, -0.7)),
                           DISK, delta=DISK_DELTA)
    got = descend_covolume(DISK, lat.basis, iterations=150, seed=5)
    assert got == lat.covolume


def test_corroborate_never_beats_delta():
    best = corroborate_delta_equality(DISK, 8, delta=DISK_DELTA, seed=1,
                                      iterations=120)
    assert best >= DISK_DELTA - 1e-6


def test_corroborate_threaded_matches_serial():
    a = corroborate_delta_equality(DISK, 6, delta=DISK_DELTA, seed=2,
                                   iterations=80, threads=1)
    b = corroborate_delta_equality(DISK, 6, delta=DISK_DELTA, seed=2,
                                   iterations=80, threads=3)
    assert a == b


def test_shear_on_p4_base():
    dom = ConvexDomain2.pnorm(4)
    delta = critical_determinant(dom)
    gauge = CylinderGauge(dom)
    m2 = critical_locus_2d(dom, n_samples=1)[0].basis
    lat = realize_critical(CriticalLatticeDesc(Piece.LowerShear, m2, (0.21, -0.4)),
                           dom, delta=delta)
    path = shear_to_top(lat, gauge, delta=delta)
    assert abs(path.final.covolume - delta) < 1e-8
    assert is_admissible(path.final, gauge, 1.0)
