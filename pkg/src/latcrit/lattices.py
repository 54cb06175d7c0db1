"""Lattices in R^2 and R^3 with gauge-ball enumeration.

A lattice is the integer span of basis columns.  Enumeration is certified:
the gauge ball is boxed by per-axis half-widths, the box is pulled back
through the inverse of a reduced basis to integer coefficient bounds, and the
whole coefficient box is traversed by a kernel backend.  All reported points
are recomputed from the original basis so reduction never changes values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CapacityError, NormSpecError

_DEFAULT_CAP = 10_000_000


class Lattice:
    """Full-rank lattice given by basis columns (dimension 2 or 3)."""

    __slots__ = ("basis", "dim")

    def __init__(self, basis):
        basis = np.array(basis, dtype=float)
        if basis.shape not in ((2, 2), (3, 3)):
            raise NormSpecError(f"lattice basis must be 2x2 or 3x3, got shape {basis.shape}")
        # Hadamard ratio: scale-free test that also rejects near-dependence
        # that would void the certified coefficient pullback
        hada = float(np.prod(np.linalg.norm(basis, axis=0)))
        det = abs(float(np.linalg.det(basis)))
        if det == 0.0 or det < 1e-12 * hada:
            raise NormSpecError("lattice basis is singular or too ill-conditioned")
        self.basis = basis
        self.dim = basis.shape[0]

    @property
    def covolume(self) -> float:
        return abs(float(np.linalg.det(self.basis)))

    def points(self, coeffs: np.ndarray) -> np.ndarray:
        """Lattice points for integer coefficient rows, from the original basis."""
        coeffs = np.asarray(coeffs, dtype=float)
        pts = coeffs[..., 0, None] * self.basis[:, 0]
        for j in range(1, self.dim):
            pts = pts + coeffs[..., j, None] * self.basis[:, j]
        return pts

    def contains(self, v, tol: float = 1e-9) -> bool:
        """Whether v lies in the lattice, up to absolute residual tol."""
        n = np.linalg.solve(self.basis, np.asarray(v, dtype=float))
        return bool(np.max(np.abs(v - self.points(np.round(n)[None, :])[0])) <= tol)

    def __repr__(self) -> str:
        return f"Lattice({self.basis.tolist()})"


def covolume(lattice: Lattice) -> float:
    return lattice.covolume


# -- basis reduction ---------------------------------------------------------


def _gauss2(basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lagrange-Gauss reduction of a planar basis; returns (reduced, U)."""
    b = basis.copy()
    U = np.eye(2, dtype=np.int64)
    if b[:, 0] @ b[:, 0] > b[:, 1] @ b[:, 1]:
        b = b[:, ::-1].copy()
        U = U[:, ::-1].copy()
    while True:
        mu = int(round((b[:, 0] @ b[:, 1]) / (b[:, 0] @ b[:, 0])))
        if mu:
            b[:, 1] -= mu * b[:, 0]
            U[:, 1] -= mu * U[:, 0]
        if b[:, 1] @ b[:, 1] < b[:, 0] @ b[:, 0]:
            b = b[:, ::-1].copy()
            U = U[:, ::-1].copy()
        else:
            return b, U


def _lll3(basis: np.ndarray, delta: float = 0.99, max_iter: int = 10_000):
    """Floating-point LLL for a 3-column basis; returns (reduced, U)."""

    def gso(b):
        d = b.shape[1]
        bs = b.astype(float).copy()
        mu = np.zeros((d, d))
        norms = np.zeros(d)
        for i in range(d):
            for j in range(i):
                mu[i, j] = (b[:, i] @ bs[:, j]) / norms[j]
                bs[:, i] -= mu[i, j] * bs[:, j]
            norms[i] = bs[:, i] @ bs[:, i]
        return mu, norms

    b = basis.copy()
    U = np.eye(3, dtype=np.int64)
    k = 1
    for _ in range(max_iter):
        if k >= 3:
            break
        mu, norms = gso(b)
        for j in range(k - 1, -1, -1):
            q = round(float(mu[k, j]))
            if q:
                if abs(q) > 2 ** 52:
                    raise CapacityError("basis too ill-conditioned for float reduction")
                b[:, k] -= q * b[:, j]
                U[:, k] -= q * U[:, j]
                mu, norms = gso(b)
        if norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[:, [k - 1, k]] = b[:, [k, k - 1]]
            U[:, [k - 1, k]] = U[:, [k, k - 1]]
            k = max(k - 1, 1)
    return b, U


def _reduced(lattice: Lattice) -> tuple[np.ndarray, np.ndarray]:
    if lattice.dim == 2:
        return _gauss2(lattice.basis)
    return _lll3(lattice.basis)


def gauss_reduce(lattice: Lattice) -> Lattice:
    """Lagrange-Gauss reduced basis of a planar lattice.

    The result generates the same lattice and satisfies |b1| <= |b2| and
    |<b1, b2>| <= |b1|^2 / 2.
    """
    if lattice.dim != 2:
        raise NormSpecError("gauss_reduce applies to planar lattices")
    b, _ = _gauss2(lattice.basis)
    n1 = b[:, 0] @ b[:, 0]
    assert b[:, 1] @ b[:, 1] >= n1 * (1 - 1e-12)
    assert abs(b[:, 0] @ b[:, 1]) <= 0.5 * n1 * (1 + 1e-12)
    return Lattice(b)


# -- enumeration -------------------------------------------------------------


def _desc_args(gauge):
    d = gauge.descriptor
    return d.code, d.p, d.pre, d.normals, d.cylinder


def _coeff_bounds(basis_r: np.ndarray, halfwidths: np.ndarray) -> list[int]:
    s = np.abs(np.linalg.inv(basis_r)) @ np.asarray(halfwidths, dtype=float)
    return [int(np.floor(v + 1e-9)) for v in s]


def enumerate_coeffs(lattice: Lattice, gauge, r: float, eps_adm: float | None = None,
                     cap: int = _DEFAULT_CAP) -> np.ndarray:
    """Original-basis coefficients of all nonzero points with gauge < r - eps_adm."""
    if r <= 0:
        return np.zeros((0, lattice.dim), dtype=np.int64)
    eps = 1e-12 * r if eps_adm is None else eps_adm
    basis_r, U = _reduced(lattice)
    bounds = _coeff_bounds(basis_r, gauge.bounding_halfwidths(r))
    coeffs_r = _kernels.collect_in_ball(basis_r, bounds, *_desc_args(gauge), r - eps, cap)
    coeffs = coeffs_r @ U.T
    if coeffs.shape[0] > 1:
        coeffs = coeffs[np.lexsort(coeffs.T[::-1])]
    return coeffs


def enumerate_in_ball(lattice: Lattice, gauge, r: float, eps_adm: float | None = None,
                      cap: int = _DEFAULT_CAP) -> np.ndarray:
    """All nonzero lattice points in the open gauge ball of radius r.

    Points within eps_adm (default 1e-12 * r) of the boundary are treated as
    boundary contact and excluded, so critical lattices enumerate as empty.
    """
    return lattice.points(enumerate_coeffs(lattice, gauge, r, eps_adm, cap))


def find_violation(lattice: Lattice, gauge, r: float, eps_adm: float | None = None):
    """Some nonzero point with gauge < r - eps_adm, or None when admissible."""
    if r <= 0:
        return None
    eps = 1e-12 * r if eps_adm is None else eps_adm
    basis_r, U = _reduced(lattice)
    bounds = _coeff_bounds(basis_r, gauge.bounding_halfwidths(r))
    coeff_r = _kernels.first_below(basis_r, bounds, *_desc_args(gauge), r - eps)
    if coeff_r is None:
        return None
    return lattice.points((U @ coeff_r)[None, :])[0]


def is_admissible(lattice: Lattice, gauge, r: float, eps_adm: float | None = None) -> bool:
    """Whether the open gauge ball of radius r contains no nonzero lattice point."""
    return find_violation(lattice, gauge, r, eps_adm) is None


def points_in_shell(lattice: Lattice, gauge, r_lo: float, r_hi: float,
                    cap: int = _DEFAULT_CAP) -> np.ndarray:
    """Nonzero points with r_lo <= gauge < r_hi (used to pick up boundary contact)."""
    coeffs = enumerate_coeffs(lattice, gauge, r_hi, eps_adm=0.0, cap=cap)
    pts = lattice.points(coeffs)
    if pts.shape[0] == 0:
        return pts
    return pts[gauge.gauge(pts) >= r_lo]


@dataclass(frozen=True)
class ShortestVector:
    value: float
    point: np.ndarray
    coeffs: np.ndarray


def shortest_gauge_vector(lattice: Lattice, gauge) -> ShortestVector:
    """A nonzero lattice point of minimum gauge.

    Enumerates within twice the upper bound given by the best reduced basis
    vector, so the minimizer is certainly inside the search box.  Exact value
    ties resolve to the sign-canonicalized lexicographically smallest
    coefficient vector of the reduced frame.
    """
    basis_r, U = _reduced(lattice)
    r0 = float(np.min(gauge.gauge(basis_r.T)))
    bounds = _coeff_bounds(basis_r, gauge.bounding_halfwidths(2.0 * r0))
    value, coeff_r = _kernels.min_gauge(basis_r, bounds, *_desc_args(gauge))
    if coeff_r is None:
        raise CapacityError("shortest vector search found no candidates")
    coeff = U @ coeff_r
    for c in coeff:
        if c != 0:
            if c < 0:
                coeff = -coeff
            break
    point = lattice.points(coeff[None, :])[0]
    return ShortestVector(float(gauge.gauge(point)), point, coeff)
