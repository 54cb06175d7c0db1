"""Symmetric convex planar domains and their gauge (Minkowski) functionals.

A domain B here is open, bounded, convex and symmetric about the origin,
normalized so that its gauge equals 1 exactly on the boundary.  Supported
kinds: the Euclidean disk, the sup-norm square, p-norm balls (p > 1),
centrally symmetric polygons, and nonsingular linear images of any of
these.  A cylinder gauge extends a planar domain to R^3 by
max(planar gauge of (x1, x2), |x3|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NormSpecError

# descriptor codes understood by the enumeration/scan kernels
CODE_EUCLIDEAN = 0
CODE_PNORM = 1
CODE_MAXDOT = 2

_IDENTITY2 = np.eye(2)
_NO_NORMALS = np.zeros((0, 2))


@dataclass(frozen=True)
class GaugeDescriptor:
    """Flattened gauge recipe consumed by the compiled and numpy kernels.

    code 0: gauge(x) = |pre @ x|_2
    code 1: gauge(x) = |pre @ x|_p
    code 2: gauge(x) = max_k |normals[k] . x|

    ``separable`` marks gauges for which the nearest integer point to any y
    is obtained by rounding coordinatewise.  ``rmin``/``rmax`` are certified
    bounds on the Euclidean norm over the gauge unit boundary, so that
    |x|_2 / rmax <= gauge(x) <= |x|_2 / rmin.
    """

    code: int
    p: float
    pre: np.ndarray
    normals: np.ndarray
    separable: bool
    rmin: float
    rmax: float
    cylinder: bool = False


def _canonical_direction(v: np.ndarray) -> np.ndarray:
    # flip sign so the first nonzero component is positive
    for c in v:
        if c != 0.0:
            return v if c > 0.0 else -v
    return v


def _polygon_normals(vertices: np.ndarray) -> np.ndarray:
    """Edge functionals a_k with a_k . x = 1 along edge k (polar vertices)."""
    n = vertices.shape[0]
    normals = []
    for i in range(n):
        vi, vj = vertices[i], vertices[(i + 1) % n]
        mat = np.array([vi, vj])
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        if abs(det) < 1e-14 * max(1.0, np.abs(mat).max() ** 2):
            # consecutive vertices collinear with the origin: not full-dimensional
            raise NormSpecError("degenerate polygon: consecutive vertices are collinear with 0")
        normals.append(np.linalg.solve(mat, np.ones(2)))
    # dedupe up to sign; the gauge uses |a_k . x|
    out: list[np.ndarray] = []
    for a in normals:
        a = _canonical_direction(a)
        if not any(np.allclose(a, b, rtol=0, atol=1e-12 * (1 + np.abs(a).max())) for b in out):
            out.append(a)
    return np.array(out)


def _sorted_symmetric_hull(vertices) -> np.ndarray:
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise NormSpecError("polygon needs at least 4 planar vertices")
    # drop duplicates, order by angle
    uniq: list[np.ndarray] = []
    for v in pts:
        if np.hypot(*v) < 1e-14:
            raise NormSpecError("polygon vertex at the origin")
        if not any(np.allclose(v, u, rtol=0, atol=1e-12 * (1 + np.abs(v).max())) for u in uniq):
            uniq.append(v)
    pts = np.array(uniq)
    if pts.shape[0] % 2 != 0:
        raise NormSpecError("polygon vertex set is not centrally symmetric")
    order = np.argsort(np.arctan2(pts[:, 1], pts[:, 0]))
    pts = pts[order]
    scale = np.abs(pts).max()
    for v in pts:
        if not any(np.allclose(-v, u, rtol=0, atol=1e-9 * scale) for u in pts):
            raise NormSpecError("polygon vertex set is not centrally symmetric")
    m = pts.shape[0]
    for i in range(m):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % m]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross < -1e-12 * scale * scale:
            raise NormSpecError("polygon vertices are not in convex position")
    return pts


class ConvexDomain2:
    """A symmetric convex planar domain, exposed through its gauge functional."""

    dim = 2

    def __init__(self, kind: str, *, p: float = 2.0, vertices=None, matrix=None,
                 inner: "ConvexDomain2 | None" = None, is_parallelogram: bool | None = None):
        self.kind = kind
        self.p = float(p)
        self.vertices = None
        self.matrix = None
        self.inner = inner
        if kind == "euclidean":
            auto_par = False
        elif kind == "sup":
            auto_par = True
        elif kind == "pnorm":
            if not self.p > 1.0 or not math.isfinite(self.p):
                raise NormSpecError(f"p-norm exponent must be finite and > 1, got {p}")
            auto_par = False
        elif kind == "polygon":
            self.vertices = _sorted_symmetric_hull(vertices)
            self._normals = _polygon_normals(self.vertices)
            auto_par = self.vertices.shape[0] == 4
        elif kind == "linear":
            g = np.asarray(matrix, dtype=float)
            if g.shape != (2, 2):
                raise NormSpecError("linear image needs a 2x2 matrix")
            det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
            if abs(det) < 1e-12 * max(1.0, np.abs(g).max() ** 2):
                raise NormSpecError("linear image matrix is singular")
            self.matrix = g
            self._matrix_inv = np.linalg.inv(g)
            auto_par = inner.is_parallelogram
        else:
            raise NormSpecError(f"unknown domain kind {kind!r}")
        # declared flag; auto value only encodes what the construction guarantees
        self.is_parallelogram = auto_par if is_parallelogram is None else bool(is_parallelogram)
        self._descriptor = self._build_descriptor()

    # -- constructors ---------------------------------------------------

    @classmethod
    def euclidean(cls) -> "ConvexDomain2":
        return cls("euclidean")

    @classmethod
    def sup(cls) -> "ConvexDomain2":
        return cls("sup")

    @classmethod
    def pnorm(cls, p: float) -> "ConvexDomain2":
        return cls("pnorm", p=p)

    @classmethod
    def polygon(cls, vertices, is_parallelogram: bool | None = None) -> "ConvexDomain2":
        return cls("polygon", vertices=vertices, is_parallelogram=is_parallelogram)

    @classmethod
    def linear_image(cls, matrix, inner: "ConvexDomain2") -> "ConvexDomain2":
        return cls("linear", matrix=matrix, inner=inner)

    # -- evaluation ------------------------------------------------------

    def gauge(self, x) -> np.ndarray | float:
        """Gauge functional; accepts a pair or an array of shape (..., 2)."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 1
        if self.kind == "euclidean":
            out = np.hypot(x[..., 0], x[..., 1])
        elif self.kind == "sup":
            out = np.maximum(np.abs(x[..., 0]), np.abs(x[..., 1]))
        elif self.kind == "pnorm":
            out = (np.abs(x[..., 0]) ** self.p + np.abs(x[..., 1]) ** self.p) ** (1.0 / self.p)
        elif self.kind == "polygon":
            out = np.abs(x @ self._normals.T).max(axis=-1)
        else:
            out = self.inner.gauge(x @ self._matrix_inv.T)
        return float(out) if scalar else out

    def boundary_point(self, theta) -> np.ndarray:
        """Boundary parametrization: the ray at angle theta scaled onto the boundary."""
        theta = np.asarray(theta, dtype=float)
        unit = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return unit / self.gauge(unit)[..., None] if theta.ndim else unit / self.gauge(unit)

    # -- certified geometry ------------------------------------------------

    def bounding_radii(self) -> tuple[float, float]:
        """Certified (min, max) Euclidean norm over the gauge unit boundary."""
        if self.kind == "euclidean":
            return 1.0, 1.0
        if self.kind == "sup":
            return 1.0, math.sqrt(2.0)
        if self.kind == "pnorm":
            d = 2.0 ** (0.5 - 1.0 / self.p)  # Euclidean norm of the diagonal boundary point
            return min(1.0, d), max(1.0, d)
        if self.kind == "polygon":
            rmax = float(np.hypot(self.vertices[:, 0], self.vertices[:, 1]).max())
            rmin = float(1.0 / np.hypot(self._normals[:, 0], self._normals[:, 1]).max())
            return rmin, rmax
        smin, smax = np.linalg.svd(self.matrix, compute_uv=False)[::-1]
        rmin, rmax = self.inner.bounding_radii()
        return rmin * float(smin), rmax * float(smax)

    def area(self) -> float:
        if self.kind == "euclidean":
            return math.pi
        if self.kind == "sup":
            return 4.0
        if self.kind == "pnorm":
            return 4.0 * math.gamma(1.0 + 1.0 / self.p) ** 2 / math.gamma(1.0 + 2.0 / self.p)
        if self.kind == "polygon":
            v = self.vertices
            return 0.5 * abs(float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])))
        det = self.matrix[0, 0] * self.matrix[1, 1] - self.matrix[0, 1] * self.matrix[1, 0]
        return abs(det) * self.inner.area()

    def bounding_halfwidths(self, r: float) -> np.ndarray:
        """Axis-aligned half-widths of a box containing the gauge ball of radius r."""
        return np.array([r * self.rmax, r * self.rmax])

    # -- kernel plumbing ---------------------------------------------------

    def _build_descriptor(self) -> GaugeDescriptor:
        rmin, rmax = self.bounding_radii()
        if self.kind == "euclidean":
            return GaugeDescriptor(CODE_EUCLIDEAN, 2.0, _IDENTITY2, _NO_NORMALS, True, rmin, rmax)
        if self.kind == "sup":
            return GaugeDescriptor(CODE_MAXDOT, 2.0, _IDENTITY2, _IDENTITY2.copy(), True, rmin, rmax)
        if self.kind == "pnorm":
            return GaugeDescriptor(CODE_PNORM, self.p, _IDENTITY2, _NO_NORMALS, True, rmin, rmax)
        if self.kind == "polygon":
            return GaugeDescriptor(CODE_MAXDOT, 2.0, _IDENTITY2, self._normals, False, rmin, rmax)
        d = self.inner.descriptor
        if d.code == CODE_MAXDOT:
            # a . (g^-1 x) = (a g^-1) . x
            return GaugeDescriptor(CODE_MAXDOT, 2.0, _IDENTITY2, d.normals @ self._matrix_inv,
                                   False, rmin, rmax)
        return GaugeDescriptor(d.code, d.p, d.pre @ self._matrix_inv, _NO_NORMALS, False, rmin, rmax)

    @property
    def descriptor(self) -> GaugeDescriptor:
        return self._descriptor

    @property
    def rmax(self) -> float:
        return self._descriptor.rmax

    @property
    def rmin(self) -> float:
        return self._descriptor.rmin

    def __repr__(self) -> str:
        if self.kind == "pnorm":
            return f"ConvexDomain2.pnorm({self.p})"
        if self.kind == "linear":
            return f"ConvexDomain2.linear_image({self.matrix.tolist()}, {self.inner!r})"
        if self.kind == "polygon":
            return f"ConvexDomain2.polygon({self.vertices.tolist()})"
        return f"ConvexDomain2.{self.kind}()"


class CylinderGauge:
    """Gauge of the open cylinder B x (-1, 1) over a planar domain B."""

    dim = 3

    def __init__(self, base: ConvexDomain2):
        self.base = base
        d = base.descriptor
        self._descriptor = GaugeDescriptor(d.code, d.p, d.pre, d.normals, d.separable,
                                           d.rmin, d.rmax, cylinder=True)

    def gauge(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        out = np.maximum(self.base.gauge(x[..., :2]), np.abs(x[..., 2]))
        return float(out) if x.ndim == 1 else out

    def bounding_halfwidths(self, r: float) -> np.ndarray:
        return np.array([r * self.base.rmax, r * self.base.rmax, r])

    @property
    def descriptor(self) -> GaugeDescriptor:
        return self._descriptor

    def __repr__(self) -> str:
        return f"CylinderGauge({self.base!r})"


# -- norm spec strings ------------------------------------------------------


def _parse_bracket_matrix(text: str, rows: int, cols: int, what: str) -> np.ndarray:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise NormSpecError(f"{what} must be bracketed, e.g. [a,b;c,d], got {text!r}")
    try:
        mat = np.array([[float(v) for v in row.split(",")] for row in text[1:-1].split(";")])
    except ValueError as exc:
        raise NormSpecError(f"bad number in {what}: {exc}") from None
    if mat.shape != (rows, cols):
        raise NormSpecError(f"{what} must be {rows}x{cols}, got shape {mat.shape}")
    return mat


def parse_norm_spec(spec: str) -> ConvexDomain2:
    """Parse a norm spec string.

    Grammar: ``euclidean`` | ``sup`` | ``p:<real>`` | ``poly:[x1,y1;x2,y2;...]``
    | ``lin:[a,b;c,d]:<spec>`` (recursive).
    """
    spec = spec.strip()
    if spec == "euclidean":
        return ConvexDomain2.euclidean()
    if spec == "sup":
        return ConvexDomain2.sup()
    if spec.startswith("p:"):
        try:
            p = float(spec[2:])
        except ValueError:
            raise NormSpecError(f"bad p-norm exponent in {spec!r}") from None
        return ConvexDomain2.pnorm(p)
    if spec.startswith("poly:"):
        body = spec[5:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise NormSpecError(f"polygon spec must be poly:[x1,y1;...], got {spec!r}")
        rows = body[1:-1].split(";")
        verts = _parse_bracket_matrix(body, len(rows), 2, "polygon vertex list")
        return ConvexDomain2.polygon(verts)
    if spec.startswith("lin:"):
        rest = spec[4:]
        depth = 0
        split = -1
        for i, ch in enumerate(rest):
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == ":" and depth == 0:
                split = i
                break
        if split < 0:
            raise NormSpecError(f"linear spec must be lin:[a,b;c,d]:<inner>, got {spec!r}")
        mat = _parse_bracket_matrix(rest[:split], 2, 2, "linear image matrix")
        return ConvexDomain2.linear_image(mat, parse_norm_spec(rest[split + 1:]))
    raise NormSpecError(f"unknown norm spec {spec!r}")
