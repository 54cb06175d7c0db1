"""Critical lattices of cylinders over planar domains.

The cylinder over B is C = {(x1, x2, x3) : nu(x1, x2) < 1, |x3| < 1} and
shares its critical determinant with B.  Its critical locus is the union of
two shear families over the planar critical lattices (lower-unipotent and
upper-unipotent pieces); the cube case is the Hajos-Minkowski family over
permutation matrices.  The Chalk-Rogers deformation pushes any critical
lattice onto three independent top boundary points while staying critical.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .critical2d import critical_determinant
from .errors import CriticalityError, DegeneracyError, LatcritError
from .lattices import (
    Lattice,
    _reduced,
    find_violation,
    is_admissible,
    points_in_shell,
    shortest_gauge_vector,
)
from .norms import ConvexDomain2, CylinderGauge

_SHELL = 1e-8  # boundary contact half-width
_T_CAP = 1e3


class Piece(enum.Enum):
    LowerShear = "lower"
    UpperShear = "upper"


class ZClass(enum.Enum):
    ZPlus = "z+"
    ZMinus = "z-"
    Both = "both"
    Neither = "neither"


@dataclass(frozen=True)
class CriticalLatticeDesc:
    """Recipe for one member of the two critical families over M.

    piece selects the shear side: LowerShear multiplies blockdiag(M, 1) by a
    lower unipotent with (a, b) in row 3; UpperShear places (a, b) directly
    in the third column.  normalize rescales to covolume 1.
    """

    piece: Piece
    M: np.ndarray
    shear: tuple[float, float]
    normalize: bool = False


def realize_critical(desc: CriticalLatticeDesc, domain: ConvexDomain2,
                     delta: float | None = None) -> Lattice:
    """Build the critical cylinder lattice described by desc over domain.

    Verifies that M spans a B-critical planar lattice first: covolume within
    1e-9 of Delta(B) and B-admissible.
    """
    M = np.asarray(desc.M, dtype=float)
    if M.shape != (2, 2):
        raise LatcritError(f"M must be 2x2, got shape {M.shape}")
    if delta is None:
        delta = critical_determinant(domain)
    planar = Lattice(M)
    if abs(planar.covolume - delta) > 1e-9:
        raise CriticalityError(
            f"M has covolume {planar.covolume!r}, expected {delta!r} within 1e-9")
    bad = find_violation(planar, domain, 1.0)
    if bad is not None:
        raise CriticalityError(f"M is not admissible: contains {bad.tolist()}")
    a, b = float(desc.shear[0]), float(desc.shear[1])
    block = np.array([[M[0, 0], M[0, 1], 0.0],
                      [M[1, 0], M[1, 1], 0.0],
                      [0.0, 0.0, 1.0]])
    if desc.piece is Piece.LowerShear:
        unip = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [a, b, 1.0]])
        basis = unip @ block
    else:
        basis = block.copy()
        basis[0, 2] = a
        basis[1, 2] = b
    if desc.normalize:
        basis = basis * delta ** (-1.0 / 3.0)
    return Lattice(basis)


def classify_z(lattice: Lattice, tol: float = 1e-9) -> ZClass:
    """Whether the lattice has a nonzero vector on the x3-axis, in the
    (x1, x2)-plane, both, or neither (searched in a bounded box)."""
    if lattice.dim != 3:
        raise LatcritError("classify_z applies to lattices in R^3")
    box = CylinderGauge(ConvexDomain2.sup())
    basis_r, _ = _reduced(lattice)
    radius = 2.0 * float(np.abs(basis_r).max()) + tol
    pts = points_in_shell(lattice, box, 0.0, radius)
    has_axis = False
    has_plane = False
    for v in pts:
        if abs(v[0]) <= tol and abs(v[1]) <= tol:
            has_axis = True
        if abs(v[2]) <= tol:
            has_plane = True
    if has_axis and has_plane:
        return ZClass.Both
    if has_axis:
        return ZClass.ZPlus
    if has_plane:
        return ZClass.ZMinus
    return ZClass.Neither


# -- Chalk-Rogers deformation -------------------------------------------------


@dataclass(frozen=True)
class ShearPath:
    """Deformation record: final = path_matrix_at(tau) applied to the input.

    path_matrix_at(t) for t in [0, tau] is lower-triangular unipotent with
    zero (2,1) entry; covolume along the path never increases.
    """

    tau: float
    final: Lattice
    stages: tuple = field(repr=False, default=())

    def path_matrix_at(self, t: float) -> np.ndarray:
        t = min(max(t, 0.0), self.tau)
        acc = np.eye(3)
        for length, row3 in self.stages:
            u = min(t, length)
            step = np.eye(3)
            step[2, 0] = u * row3[0]
            step[2, 1] = u * row3[1]
            step[2, 2] = 1.0 + u * row3[2]
            acc = step @ acc
            t -= u
            if t <= 0.0:
                break
        return acc


def _independent_rank(points: np.ndarray, tol: float = 1e-8) -> int:
    if len(points) == 0:
        return 0
    s = np.linalg.svd(np.asarray(points, dtype=float), compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def _pick_frame(tops: list, sides: list) -> np.ndarray | None:
    """Columns [p1 p2 p3]: independent boundary points, tops first.  Since
    the caller only deforms when rank(tops) < 3, the deformed point p3 always
    comes off the side wall."""
    chosen: list = []
    for pool in (tops, sides):
        for cand in sorted(pool, key=lambda v: -abs(v[2])):
            if len(chosen) == 3:
                break
            trial = chosen + [cand]
            if _independent_rank(np.array(trial)) == len(trial):
                chosen.append(cand)
        if len(chosen) == 3:
            break
    if len(chosen) < 3:
        return None
    return np.column_stack(chosen)


def _largest_admissible(lattice: Lattice, gauge: CylinderGauge,
                        row3: np.ndarray) -> float | None:
    """Largest u with L(u) lattice C-admissible; None when u reaches _T_CAP."""

    def deformed(u: float) -> Lattice:
        step = np.eye(3)
        step[2, 0] = u * row3[0]
        step[2, 1] = u * row3[1]
        step[2, 2] = 1.0 + u * row3[2]
        return Lattice(step @ lattice.basis)

    u = 1e-3
    lo = 0.0
    while u <= _T_CAP:
        if not is_admissible(deformed(u), gauge, 1.0):
            break
        lo = u
        u *= 2.0
    else:
        return None
    hi = u
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if is_admissible(deformed(mid), gauge, 1.0):
            lo = mid
        else:
            hi = mid
    return lo


def shear_to_top(lattice: Lattice, gauge: CylinderGauge,
                 delta: float | None = None) -> ShearPath:
    """Deform a critical cylinder lattice until three independent points sit
    on the top boundary |x3| = 1.

    Each stage builds P from boundary points (top points first), deforms by
    the lower-unipotent path with row 3 taken from t * (P^-1 row 3), picking
    the sign with nonpositive covolume derivative, and advances to the
    largest admissible t.  When admissibility never breaks (the infinite-tau
    branch), t stops at the first value lifting p3 onto the top.
    """
    if delta is None:
        delta = critical_determinant(gauge.base)
    if abs(lattice.covolume - delta) > 1e-8:
        raise CriticalityError(
            f"covolume {lattice.covolume!r} is not critical ({delta!r})")
    bad = find_violation(lattice, gauge, 1.0)
    if bad is not None:
        raise CriticalityError(f"lattice is not admissible: contains {bad.tolist()}")

    current = lattice
    stages: list = []
    tau = 0.0
    start_cov = lattice.covolume
    for _ in range(4):
        boundary = points_in_shell(current, gauge, 1.0 - _SHELL, 1.0 + _SHELL)
        if _independent_rank(boundary) < 3:
            raise DegeneracyError(
                "critical lattice exposes fewer than three independent "
                f"boundary points ({len(boundary)} found)")
        tops = [v for v in boundary if abs(abs(v[2]) - 1.0) <= _SHELL]
        sides = [v for v in boundary if abs(abs(v[2]) - 1.0) > _SHELL]
        if _independent_rank(np.array(tops) if tops else np.zeros((0, 3))) >= 3:
            break
        if not tops:
            raise DegeneracyError("no boundary point with |x3| = 1; "
                                  "cannot anchor the deformation")
        frame = _pick_frame(tops, sides)
        if frame is None:
            raise DegeneracyError("no independent frame with a side point found")
        pinv = np.linalg.inv(frame)
        row3 = pinv[2].copy()
        if row3[2] > 0.0:
            row3 = -row3  # nonpositive covolume derivative
        u_star = _largest_admissible(current, gauge, row3)
        if u_star is None:
            # infinite-tau branch: stop where p3 reaches |x3| = 1; its height
            # moves at unit rate by construction of P^-1
            p3z = frame[2, 2]
            rate = row3 @ frame[:, 2]
            cands = [(1.0 - p3z) / rate, (-1.0 - p3z) / rate]
            u_star = min(c for c in cands if c > 1e-12)
        step = np.eye(3)
        step[2, 0] = u_star * row3[0]
        step[2, 1] = u_star * row3[1]
        step[2, 2] = 1.0 + u_star * row3[2]
        nxt = Lattice(step @ current.basis)
        assert nxt.covolume <= current.covolume * (1.0 + 1e-9)
        current = nxt
        stages.append((u_star, row3))
        tau += u_star
    else:
        raise DegeneracyError("deformation did not reach three top points")

    assert abs(current.covolume - start_cov) <= 1e-8 * max(1.0, start_cov) or \
        current.covolume < start_cov
    if abs(current.covolume - delta) > 1e-8:
        raise CriticalityError(
            f"deformed covolume {current.covolume!r} drifted from {delta!r}")
    return ShearPath(tau, current, tuple(stages))


# -- falsification harness ----------------------------------------------------


def _descend_one(domain: ConvexDomain2, gauge: CylinderGauge, start_seed,
                 iterations: int, basis0: np.ndarray | None = None) -> float:
    rng = np.random.default_rng(start_seed)
    if basis0 is not None:
        basis = np.asarray(basis0, dtype=float)
    else:
        basis = np.eye(3) + 0.5 * rng.standard_normal((3, 3))
        while abs(np.linalg.det(basis)) < 1e-3:
            basis = np.eye(3) + 0.5 * rng.standard_normal((3, 3))

    def project(b: np.ndarray) -> tuple[np.ndarray, float]:
        # scale so the shortest gauge vector sits on the boundary
        v = shortest_gauge_vector(Lattice(b), gauge).value
        b = b / v
        return b, abs(float(np.linalg.det(b)))

    basis, cov = project(basis)
    step = 1e-2
    sweep_hit = False
    for it in range(iterations):
        i, j = divmod(int(rng.integers(9)), 3)
        sign = 1.0 if rng.integers(2) else -1.0
        scale = float(np.abs(basis[:, j]).max())
        trial = basis.copy()
        trial[i, j] += sign * step * max(scale, 1e-3)
        if abs(np.linalg.det(trial)) < 1e-6:
            continue
        trial, tcov = project(trial)
        if tcov < cov - 1e-15:
            basis, cov = trial, tcov
            sweep_hit = True
        if (it + 1) % 18 == 0:
            if not sweep_hit:
                step *= 0.5
            sweep_hit = False
            if step < 1e-7:
                break
    return cov


def corroborate_delta_equality(domain: ConvexDomain2, n_starts: int,
                               delta: float | None = None, seed: int = 0,
                               iterations: int = 200,
                               threads: int = 1) -> float:
    """Best covolume over random-start admissible-lattice descents.

    Searches for a cylinder-admissible lattice with covolume below Delta(B);
    by the equality Delta(C_B) = Delta(B) none should exist, so the return
    value is expected to stay >= Delta(B) - 1e-6.  This is a falsification
    harness, not a certified optimizer.
    """
    gauge = CylinderGauge(domain)
    if delta is None:
        delta = critical_determinant(domain)
    seeds = [[i, seed] for i in range(n_starts)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            covs = list(pool.map(
                lambda s: _descend_one(domain, gauge, s, iterations), seeds))
    else:
        covs = [_descend_one(domain, gauge, s, iterations) for s in seeds]
    return min(covs)


def descend_covolume(domain: ConvexDomain2, basis, iterations: int = 200,
                     seed: int = 0) -> float:
    """Covolume reached by one projected descent started at the given basis.

    Started at a critical lattice this returns its covolume: every proposal
    projects back to an admissible lattice, whose covolume cannot drop below
    Delta(B), so no strict improvement is ever accepted.
    """
    gauge = CylinderGauge(domain)
    return _descend_one(domain, gauge, [0, seed], iterations, basis0=basis)


def hajos_sample(permutation, uppers) -> Lattice:
    """P times the upper unipotent with entries (u1, u2, u3), applied to Z^3.

    These are exactly the critical lattices of the sup-norm unit cube: each
    is cube-admissible with covolume 1.
    """
    P = np.asarray(permutation, dtype=float)
    if P.shape != (3, 3) or not np.array_equal(P, P.astype(bool).astype(float)) \
            or np.any(P.sum(axis=0) != 1.0) or np.any(P.sum(axis=1) != 1.0):
        raise LatcritError("permutation must be a 3x3 permutation matrix")
    u1, u2, u3 = (float(u) for u in uppers)
    unip = np.array([[1.0, u1, u2], [0.0, 1.0, u3], [0.0, 0.0, 1.0]])
    return Lattice(P @ unip)
