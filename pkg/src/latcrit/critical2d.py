"""Critical determinants of planar domains via inscribed hexagons.

Every critical lattice of a convex symmetric planar domain B that is not a
parallelogram carries three pairs of boundary points +-q, +-r, +-p with
p = q - r (Mahler).  Conversely any such inscribed hexagon spans an
admissible lattice, so the critical determinant is the minimum of
|det [q r]| over hexagon configurations.  This module parametrizes the
configurations by the angle of q and minimizes over it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, CriticalityError, LatcritError, UnsupportedDomainError
from .lattices import Lattice, is_admissible
from .norms import ConvexDomain2

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class HexagonConfig:
    """Inscribed hexagon: q at angle theta, partner r, and p = q - r.

    All three points lie on the unit gauge boundary; det_value is the
    covolume |det [q r]| of the spanned lattice.
    """

    theta: float
    phi: float
    q: np.ndarray
    r: np.ndarray
    p: np.ndarray
    det_value: float

    def lattice(self) -> Lattice:
        return Lattice(np.column_stack([self.q, self.r]))


def _require_hexagonal(domain: ConvexDomain2) -> None:
    if domain.is_parallelogram:
        raise UnsupportedDomainError(
            "parallelogram domains have a degenerate hexagon equation; "
            "their critical determinant is area/4")


def _golden_min(f, a: float, b: float, tol: float) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def hexagon_partner(domain: ConvexDomain2, theta: float) -> HexagonConfig:
    """Hexagon configuration with q on the boundary at angle theta.

    Solves gauge(q - boundary_point(phi)) = 1 for phi in (theta, theta + pi)
    by bisection; the bracket starts at (theta + pi/6, theta + 5pi/6) and is
    widened toward the open interval ends until the chord gauge changes sign.
    """
    _require_hexagonal(domain)
    q = np.asarray(domain.boundary_point(theta))

    def h(phi: float) -> float:
        return float(domain.gauge(q - domain.boundary_point(phi))) - 1.0

    lo = theta + math.pi / 6.0
    hi = theta + 5.0 * math.pi / 6.0
    flo, fhi = h(lo), h(hi)
    widen = 0
    while flo * fhi > 0.0 and widen < 60:
        # chord gauge tends to 0 at theta+ and to gauge(2q) = 2 at (theta+pi)-
        if flo > 0.0:
            lo = theta + 0.5 * (lo - theta)
            flo = h(lo)
        else:
            hi = theta + math.pi - 0.5 * (theta + math.pi - hi)
            fhi = h(hi)
        widen += 1
    if flo * fhi > 0.0:
        raise BracketError(
            f"no sign change for the hexagon chord at theta={theta!r}: "
            f"h({lo!r})={flo!r}, h({hi!r})={fhi!r}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = h(mid)
        if fm <= 0.0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo <= 1e-14:
            break
    phi = lo if abs(flo) <= abs(fhi) else hi
    if abs(h(phi)) > 1e-10:
        raise BracketError(f"hexagon chord residual {h(phi)!r} at theta={theta!r}")
    r = np.asarray(domain.boundary_point(phi))
    p = q - r
    det_value = abs(float(q[0] * r[1] - q[1] * r[0]))
    config = HexagonConfig(theta, phi, q, r, p, det_value)
    if not is_admissible(config.lattice(), domain, 1.0):
        raise CriticalityError(
            f"inscribed hexagon lattice at theta={theta!r} is not admissible")
    return config


def _det_at(domain: ConvexDomain2, theta: float) -> float:
    return hexagon_partner(domain, theta).det_value


def critical_determinant_2d(domain: ConvexDomain2,
                            grid_n: int = 512) -> tuple[float, HexagonConfig]:
    """Critical determinant and a minimizing hexagon configuration.

    Minimizes det_value over a uniform theta grid on [0, pi), then refines
    the best cell by golden-section search to 1e-12 in theta.
    """
    _require_hexagonal(domain)
    if grid_n < 64:
        raise LatcritError(f"grid_n must be at least 64, got {grid_n}")
    thetas = np.linspace(0.0, math.pi, grid_n, endpoint=False)
    dets = [_det_at(domain, t) for t in thetas]
    i = int(np.argmin(dets))
    step = math.pi / grid_n
    theta = _golden_min(lambda t: _det_at(domain, t),
                        thetas[i] - step, thetas[i] + step, 1e-12)
    config = hexagon_partner(domain, theta)
    if config.det_value > dets[i]:
        config = hexagon_partner(domain, float(thetas[i]))
    return config.det_value, config


def critical_determinant(domain: ConvexDomain2, grid_n: int = 512) -> float:
    """Delta(B) for any supported domain; parallelograms get area/4 exactly."""
    if domain.is_parallelogram:
        return domain.area() / 4.0
    return critical_determinant_2d(domain, grid_n)[0]


def critical_locus_2d(domain: ConvexDomain2, n_samples: int,
                      grid_n: int = 512) -> list[Lattice]:
    """Sample n_samples critical lattices (covolume = Delta within 1e-9).

    Sweeps theta and keeps configurations on the numeric minimum plateau
    det <= Delta * (1 + 1e-9); for domains with isolated minima, the local
    grid minima are refined and cycled instead.
    """
    _require_hexagonal(domain)
    if n_samples < 1:
        raise LatcritError(f"n_samples must be positive, got {n_samples}")
    delta, argmin = critical_determinant_2d(domain, grid_n)
    thetas = np.linspace(0.0, math.pi, grid_n, endpoint=False)
    dets = np.array([_det_at(domain, t) for t in thetas])
    plateau = thetas[dets <= delta * (1.0 + 1e-9)]
    if plateau.size >= n_samples:
        picks = plateau[np.linspace(0, plateau.size - 1, n_samples).astype(int)]
        return [hexagon_partner(domain, float(t)).lattice() for t in picks]
    # isolated minima: refine every local grid minimum, keep the critical ones
    minima = []
    step = math.pi / grid_n
    for i in range(grid_n):
        if dets[i] <= dets[i - 1] and dets[i] <= dets[(i + 1) % grid_n]:
            t = _golden_min(lambda t: _det_at(domain, t),
                            thetas[i] - step, thetas[i] + step, 1e-12)
            cfg = hexagon_partner(domain, t)
            if cfg.det_value <= delta * (1.0 + 1e-9):
                minima.append(cfg)
    if not minima:
        minima = [argmin]
    out = []
    k = 0
    while len(out) < n_samples:
        out.append(minima[k % len(minima)].lattice())
        k += 1
    return out
