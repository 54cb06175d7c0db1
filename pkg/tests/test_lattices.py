import math

import numpy as np
import pytest

from latcrit.errors import CapacityError, NormSpecError
from latcrit.lattices import (Lattice, covolume, enumerate_in_ball, find_violation,
                              gauss_reduce, is_admissible, points_in_shell,
                              shortest_gauge_vector)
from latcrit.norms import ConvexDomain2, CylinderGauge


def _brute_points(basis, gauge, r, kmax):
    """Independent enumeration: scan a big coefficient cube and filter."""
    dim = basis.shape[0]
    axes = [np.arange(-kmax, kmax + 1)] * dim
    grid = np.meshgrid(*axes, indexing="ij")
    coeffs = np.stack([g.ravel() for g in grid], axis=-1)
    pts = coeffs @ basis.T
    vals = gauge.gauge(pts)
    keep = (vals < r) & np.any(coeffs != 0, axis=1)
    got = pts[keep]
    return got[np.lexsort(got.T[::-1])]


def test_lattice_constructor_checks():
    with pytest.raises(NormSpecError):
        Lattice(np.zeros((2, 2)))
    with pytest.raises(NormSpecError):
        Lattice(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(NormSpecError):
        Lattice(np.ones((2, 3)))
    lat = Lattice(np.array([[2.0, 0.0], [0.0, 3.0]]))
    assert lat.covolume == 6.0
    assert covolume(lat) == 6.0


def test_anisotropic_basis_accepted():
    lat = Lattice(np.diag([1e6, 1e-6]))
    assert abs(lat.covolume - 1.0) < 1e-12


def test_contains():
    lat = Lattice(np.array([[1.0, 0.5], [0.0, 0.5]]))
    assert lat.contains((2.0, 1.0))
    assert not lat.contains((0.25, 0.1))


def test_gauss_reduce_invariants():
    rng = np.random.default_rng(2)
    for _ in range(200):
        basis = rng.normal(size=(2, 2)) * rng.uniform(0.1, 10)
        if abs(np.linalg.det(basis)) < 1e-3:
            continue
        lat = Lattice(basis)
        red = gauss_reduce(lat)
        assert abs(red.covolume - lat.covolume) < 1e-9 * lat.covolume
        # same lattice in both directions
        assert lat.contains(red.basis[:, 0]) and lat.contains(red.basis[:, 1])
        assert red.contains(basis[:, 0]) and red.contains(basis[:, 1])
        n1, n2 = np.linalg.norm(red.basis, axis=0)
        assert n1 <= n2 + 1e-12
        assert abs(red.basis[:, 0] @ red.basis[:, 1]) <= 0.5 * n1 * n1 + 1e-9


def test_enumeration_matches_brute_force_2d():
    rng = np.random.default_rng(7)
    domains = [ConvexDomain2.euclidean(), ConvexDomain2.sup(),
               ConvexDomain2.pnorm(3),
               ConvexDomain2.polygon([(1, 0), (0.4, 0.8), (-1, 0), (-0.4, -0.8)])]
    for trial in range(40):
        d = domains[trial % len(domains)]
        basis = rng.normal(size=(2, 2))
        if abs(np.linalg.det(basis)) < 0.05:
            continue
        lat = Lattice(basis)
        r = rng.uniform(0.5, 3.0)
        got = enumerate_in_ball(lat, d, r)
        got = got[np.lexsort(got.T[::-1])]
        want = _brute_points(basis, d, r, 40)
        assert got.shape == want.shape
        assert np.allclose(got, want, atol=1e-12)


def test_enumeration_matches_brute_force_3d():
    rng = np.random.default_rng(19)
    cg = CylinderGauge(ConvexDomain2.euclidean())
    for _ in range(15):
        basis = rng.normal(size=(3, 3))
        if abs(np.linalg.det(basis)) < 0.05:
            continue
        lat = Lattice(basis)
        r = rng.uniform(0.6, 2.0)
        got = enumerate_in_ball(lat, cg, r)
        got = got[np.lexsort(got.T[::-1])]
        want = _brute_points(basis, cg, r, 25)
        assert got.shape == want.shape
        assert np.allclose(got, want, atol=1e-12)


def test_admissibility_and_violation():
    d = ConvexDomain2.euclidean()
    lat = Lattice(np.array([[1.0, 0.5], [0.0, math.sqrt(3) / 2]]))
    # hexagonal lattice of covolume sqrt(3)/2 has minimum distance 1
    assert is_admissible(lat, d, 1.0)
    assert find_violation(lat, d, 1.0) is None
    v = find_violation(lat, d, 1.01)
    assert v is not None
    assert abs(d.gauge(v) - 1.0) < 1e-12


def test_points_in_shell_picks_boundary():
    d = ConvexDomain2.euclidean()
    lat = Lattice(np.eye(2))
    shell = points_in_shell(lat, d, 1.0 - 1e-9, 1.0 + 1e-9)
    assert shell.shape[0] == 4  # (+-1,0),(0,+-1)
    assert np.allclose(np.abs(shell).sum(axis=1), 1.0)


def test_shortest_vector_matches_brute_force():
    rng = np.random.default_rng(23)
    d = ConvexDomain2.pnorm(4)
    cg = CylinderGauge(ConvexDomain2.sup())
    for trial in range(60):
        if trial % 2 == 0:
            basis = rng.normal(size=(2, 2))
            gauge = d
        else:
            basis = rng.normal(size=(3, 3))
            gauge = cg
        if abs(np.linalg.det(basis)) < 0.05:
            continue
        lat = Lattice(basis)
        sv = shortest_gauge_vector(lat, gauge)
        # brute force over a generous box
        dim = basis.shape[0]
        axes = [np.arange(-12, 13)] * dim
        coeffs = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")],
                          axis=-1)
        coeffs = coeffs[np.any(coeffs != 0, axis=1)]
        vals = gauge.gauge(coeffs @ basis.T)
        assert abs(sv.value - vals.min()) < 1e-12
        assert abs(gauge.gauge(sv.point) - sv.value) < 1e-12
        assert lat.contains(sv.point)


def test_shortest_vector_tie_canonical():
    d = ConvexDomain2.euclidean()
    sv = shortest_gauge_vector(Lattice(np.eye(2)), d)
    # four tied minima; canonical pick has positive leading coefficient
    assert sv.value == 1.0
    assert list(sv.coeffs) in ([0, 1], [1, 0])


def test_capacity_error():
    d = ConvexDomain2.euclidean()
    lat = Lattice(np.eye(2) * 1e-4)
    with pytest.raises(CapacityError):
        enumerate_in_ball(lat, d, 50.0, cap=1000)
