"""Concrete geodesic model spaces.

Five kinds of space are supported:

* ``euclidean`` -- Euclidean d-space with the norm distance.
* ``hyperbolic2`` -- the hyperbolic plane in the hyperboloid model,
  points ``(x0, x1, x2)`` with ``-x0**2 + x1**2 + x2**2 = -1``.
* ``sphericalTriangle`` -- the filled spherical triangle with vertices
  ``a_n, b, c`` on the unit sphere, carrying the great-circle distance.
* ``gluedPair`` -- two spaces glued at one point of each.
* ``triangleChain`` -- the triangles ``Delta_2, ..., Delta_{N+2}`` glued in
  sequence by identifying ``b`` of one triangle with ``a`` of the next.

All spaces here are uniquely geodesic, so ``geodesic_point`` is a function.
Every public operation works on single :class:`Point` values; the
underscore-prefixed batch kernels operate on arrays and are used by the
samplers in :mod:`geoergodic.convexity`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import CapabilityError, DomainError, ValidationError

EUCLIDEAN = "euclidean"
HYPERBOLIC2 = "hyperbolic2"
SPHERICAL_TRIANGLE = "sphericalTriangle"
GLUED_PAIR = "gluedPair"
TRIANGLE_CHAIN = "triangleChain"

KINDS = (EUCLIDEAN, HYPERBOLIC2, SPHERICAL_TRIANGLE, GLUED_PAIR, TRIANGLE_CHAIN)

# closed-form identities / composed geometric operations
CLOSED_FORM_TOL = 1e-12
GEOMETRIC_TOL = 1e-9

SQRT3 = math.sqrt(3.0)
B_VERTEX = np.array([SQRT3 / 2, 0.5, 0.0])
C_VERTEX = np.array([0.0, 1.0, 0.0])
MID_BC = np.array([0.5, SQRT3 / 2, 0.0])


@dataclass(frozen=True)
class SpaceHandle:
    """Immutable description of a model space.

    Use the factory functions (:func:`euclidean`, :func:`hyperbolic_plane`,
    :func:`spherical_triangle`, :func:`glued_pair`, :func:`triangle_chain`)
    rather than constructing this directly.
    """

    kind: str
    dim: int = 0
    n: int = 0
    length: int = 0
    left: Optional["SpaceHandle"] = None
    right: Optional["SpaceHandle"] = None
    theta: Optional["Point"] = None
    tau: Optional["Point"] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown space kind {self.kind!r}")
        if self.kind == EUCLIDEAN and self.dim < 1:
            raise ValidationError("euclidean space needs dim >= 1")
        if self.kind == SPHERICAL_TRIANGLE and self.n < 2:
            raise DomainError("spherical triangle index must be >= 2")
        if self.kind == TRIANGLE_CHAIN and self.length < 1:
            raise DomainError("triangle chain length must be >= 1")
        if self.kind == GLUED_PAIR:
            for child in (self.left, self.right):
                if child is None or child.kind in (GLUED_PAIR, TRIANGLE_CHAIN):
                    raise ValidationError("glued pair children must be plain model spaces")
            if self.theta is None or self.theta.space != self.left:
                raise ValidationError("theta must be a point of the left space")
            if self.tau is None or self.tau.space != self.right:
                raise ValidationError("tau must be a point of the right space")

    @property
    def width(self) -> int:
        """Number of ambient coordinates used by batch kernels."""
        if self.kind == EUCLIDEAN:
            return self.dim
        if self.kind == GLUED_PAIR:
            return max(self.left.width, self.right.width)
        return 3

    @property
    def components(self) -> range:
        if self.kind == GLUED_PAIR:
            return range(2)
        if self.kind == TRIANGLE_CHAIN:
            return range(1, self.length + 2)
        return range(1)

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == EUCLIDEAN:
            out["dim"] = self.dim
        elif self.kind == SPHERICAL_TRIANGLE:
            out["n"] = self.n
        elif self.kind == TRIANGLE_CHAIN:
            out["length"] = self.length
        elif self.kind == GLUED_PAIR:
            out.update(left=self.left.describe(), right=self.right.describe(),
                       theta=list(self.theta.coords), tau=list(self.tau.coords))
        return out


@dataclass(frozen=True)
class Point:
    """A point of a model space, stored by ambient coordinates.

    ``component`` is 0 for plain spaces, 0/1 for a glued pair (left/right),
    and ``1..N+1`` for a triangle chain, where component ``i`` hosts the
    triangle ``Delta_{i+1}``.
    """

    space: SpaceHandle
    coords: tuple
    component: int = 0
    tol: float = field(default=CLOSED_FORM_TOL, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(v) for v in self.coords))
        _validate(self.space, self.component, np.asarray(self.coords), self.tol)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    def to_record(self) -> dict:
        return {"component": self.component, "coords": list(self.coords)}


@dataclass(frozen=True)
class GeodesicSegment:
    """The unique geodesic ``[p, q]``, parametrised by ``t`` in [0, 1]."""

    p: Point
    q: Point

    @property
    def length(self) -> float:
        return distance(self.p.space, self.p, self.q)

    def __call__(self, t: float) -> Point:
        return geodesic_point(self.p.space, self.p, self.q, t)


@dataclass(frozen=True)
class TriangleData:
    n: int
    a: tuple
    b: tuple
    c: tuple
    mid_bc: tuple
    d_bc: float
    d_ab: float
    d_ac: float
    d_a_mid: float

    def residuals(self) -> dict:
        """Deviation of every stored quantity from its closed form."""
        n = self.n
        a_closed = a_vertex(n)
        return {
            "a": float(np.max(np.abs(np.array(self.a) - a_closed))),
            "unit": float(max(abs(np.linalg.norm(v) - 1.0) for v in (self.a, self.b, self.c))),
            "mid_bc": float(np.max(np.abs(np.array(self.mid_bc) - MID_BC))),
            "d_bc": abs(self.d_bc - math.pi / 3),
            "d_ab": abs(self.d_ab - math.acos(SQRT3 / (2 * n))),
            "d_ac": abs(self.d_ac - math.acos(SQRT3 / (2 * n))),
            "d_a_mid": abs(self.d_a_mid - math.acos(1.0 / n)),
        }


# -- factories -------------------------------------------------------------

def euclidean(dim: int = 2) -> SpaceHandle:
    return SpaceHandle(EUCLIDEAN, dim=dim)


def hyperbolic_plane() -> SpaceHandle:
    return SpaceHandle(HYPERBOLIC2)


def spherical_triangle(n: int) -> SpaceHandle:
    return SpaceHandle(SPHERICAL_TRIANGLE, n=n)


def glued_pair(left: SpaceHandle, right: SpaceHandle, theta: Point, tau: Point) -> SpaceHandle:
    return SpaceHandle(GLUED_PAIR, left=left, right=right, theta=theta, tau=tau)


def triangle_chain(length: int) -> SpaceHandle:
    return SpaceHandle(TRIANGLE_CHAIN, length=length)


def space_from_dict(desc: dict) -> SpaceHandle:
    """Build a space from its :meth:`SpaceHandle.describe` record."""
    kind = desc.get("kind")
    if kind == EUCLIDEAN:
        return euclidean(int(desc.get("dim", 2)))
    if kind == HYPERBOLIC2:
        return hyperbolic_plane()
    if kind == SPHERICAL_TRIANGLE:
        return spherical_triangle(int(desc["n"]))
    if kind == TRIANGLE_CHAIN:
        return triangle_chain(int(desc["length"]))
    if kind == GLUED_PAIR:
        left = space_from_dict(desc["left"])
        right = space_from_dict(desc["right"])
        return glued_pair(left, right, Point(left, desc["theta"]), Point(right, desc["tau"]))
    raise ValidationError(f"unknown space kind {kind!r}")


# -- model-specific constructors ------------------------------------------

def a_vertex(n: int) -> np.ndarray:
    return np.array([1.0 / (2 * n), SQRT3 / (2 * n), math.sqrt(1.0 - 1.0 / n**2)])


def triangle_vertices(n: int) -> np.ndarray:
    """Rows ``a_n, b, c`` of the triangle ``Delta_n``."""
    return np.stack([a_vertex(n), B_VERTEX, C_VERTEX])


def bridge_length(m: int) -> float:
    """``d(a_m, b)``, the length a chain geodesic spends crossing ``Delta_m``."""
    return math.acos(SQRT3 / (2 * m))


def origin(space: SpaceHandle) -> Point:
    """A canonical basepoint: the origin, the hyperboloid apex, or a vertex."""
    if space.kind == EUCLIDEAN:
        return Point(space, np.zeros(space.dim))
    if space.kind == HYPERBOLIC2:
        return Point(space, (1.0, 0.0, 0.0))
    if space.kind == SPHERICAL_TRIANGLE:
        return Point(space, a_vertex(space.n))
    if space.kind == TRIANGLE_CHAIN:
        return Point(space, a_vertex(2), component=1)
    return Point(space, space.theta.coords, component=0)


def hyperbolic_from_polar(rho: float, phi: float) -> tuple:
    """Hyperboloid coordinates of the point at distance ``rho`` and angle ``phi`` from the apex."""
    return (math.cosh(rho), math.sinh(rho) * math.cos(phi), math.sinh(rho) * math.sin(phi))


def hyperbolic_point(x1: float, x2: float) -> Point:
    """Lift spatial coordinates onto the upper sheet of the hyperboloid."""
    return Point(hyperbolic_plane(), (math.sqrt(1.0 + x1 * x1 + x2 * x2), x1, x2))


def chain_point(chain: SpaceHandle, triangle: int, coords) -> Point:
    """A point of the chain given the index ``n`` of its triangle ``Delta_n``."""
    return Point(chain, coords, component=triangle - 1)


def chain_vertex(chain: SpaceHandle, triangle: int, label: str) -> Point:
    verts = {"a": a_vertex(triangle), "b": B_VERTEX, "c": C_VERTEX}
    return chain_point(chain, triangle, verts[label])


# -- validation -------------------------------------------------------------

def _minkowski(x, y):
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def _in_triangle(verts: np.ndarray, X: np.ndarray, tol: float) -> np.ndarray:
    a, b, c = verts
    orient = np.sign(np.dot(np.cross(a, b), c))
    ok = np.ones(X.shape[0], dtype=bool)
    for u, v in ((a, b), (b, c), (c, a)):
        ok &= orient * (X @ np.cross(u, v)) >= -tol
    return ok & (X @ (a + b + c) > 0)


def _validate(space: SpaceHandle, component: int, x: np.ndarray, tol: float) -> None:
    kind = space.kind
    if component not in space.components:
        raise DomainError(f"component {component} not in {space.kind} components")
    if kind == GLUED_PAIR:
        child = space.left if component == 0 else space.right
        _validate(child, 0, x, tol)
        return
    if x.ndim != 1 or x.size != space.width:
        raise ValidationError(f"{kind} points need {space.width} coordinates, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("non-finite coordinates")
    if kind == HYPERBOLIC2:
        q = float(_minkowski(x, x))
        if x[0] < 1.0 - tol or abs(q + 1.0) > tol * max(1.0, x[0] * x[0]):
            raise ValidationError("coordinates are off the upper hyperboloid sheet")
    elif kind in (SPHERICAL_TRIANGLE, TRIANGLE_CHAIN):
        if abs(np.linalg.norm(x) - 1.0) > tol:
            raise ValidationError("sphere coordinates must have unit norm")
        n = space.n if kind == SPHERICAL_TRIANGLE else component + 1
        if not _in_triangle(triangle_vertices(n), x[None, :], tol)[0]:
            raise ValidationError(f"point lies outside the filled triangle Delta_{n}")


def _check_same_space(space: SpaceHandle, *points: Point) -> None:
    for p in points:
        if p.space != space:
            raise DomainError("point belongs to a different space")


# -- batch kernels ------------------------------------------------------------
#
# A batch is a pair ``(comp, X)`` with ``comp`` an int array of shape (m,)
# and ``X`` a float array of shape (m, space.width).

def _pack(space: SpaceHandle, points: Sequence[Point]):
    comp = np.array([p.component for p in points], dtype=int)
    X = np.zeros((len(points), space.width))
    for i, p in enumerate(points):
        X[i, : len(p.coords)] = p.coords
    return comp, X


def _unpack(space: SpaceHandle, comp: int, x: np.ndarray) -> Point:
    if space.kind == GLUED_PAIR:
        child = space.left if comp == 0 else space.right
        x = x[: child.width]
    return Point(space, x, component=int(comp), tol=GEOMETRIC_TOL)


def _sphere_dist(A, B):
    cr = np.linalg.norm(np.cross(A, B), axis=-1)
    return np.arctan2(cr, np.sum(A * B, axis=-1))


def _hyp_polar(X):
    rho = np.arcsinh(np.hypot(X[..., 1], X[..., 2]))
    phi = np.arctan2(X[..., 2], X[..., 1])
    return rho, phi


def _hyp_dist(A, B):
    # law of cosines about the apex; avoids the cancellation in the Minkowski
    # product for far-out points that are close to each other
    ra, pa = _hyp_polar(A)
    rb, pb = _hyp_polar(B)
    half = 2 * np.sinh((ra - rb) / 2) ** 2 + 2 * np.sinh(ra) * np.sinh(rb) * np.sin((pa - pb) / 2) ** 2
    return 2 * np.arcsinh(np.sqrt(np.maximum(half, 0.0) / 2))


def _hyp_lift(X):
    X = np.array(X, dtype=float)
    X[..., 0] = np.sqrt(1.0 + X[..., 1] ** 2 + X[..., 2] ** 2)
    return X


def _plain_dist(space, A, B):
    if space.kind == EUCLIDEAN:
        return np.linalg.norm(A - B, axis=-1)
    if space.kind == HYPERBOLIC2:
        return _hyp_dist(A, B)
    return _sphere_dist(A, B)


def _plain_geo(space, A, B, t):
    t = np.broadcast_to(np.asarray(t, dtype=float), A.shape[:-1])[..., None]
    if space.kind == EUCLIDEAN:
        return A + t * (B - A)
    d = _plain_dist(space, A, B)[..., None]
    small = d < 1e-12
    dd = np.where(small, 1.0, d)
    if space.kind == HYPERBOLIC2:
        Z = (np.sinh((1 - t) * dd) * A + np.sinh(t * dd) * B) / np.sinh(dd)
        Z = np.where(small, A + t * (B - A), Z)
        return _hyp_lift(Z)
    Z = (np.sin((1 - t) * dd) * A + np.sin(t * dd) * B) / np.sin(dd)
    Z = np.where(small, A + t * (B - A), Z)
    return Z / np.linalg.norm(Z, axis=-1, keepdims=True)


@lru_cache(maxsize=None)
def _bridge_prefix(length: int) -> np.ndarray:
    # prefix[m] = sum of bridge_length(m') for 3 <= m' <= m
    prefix = np.zeros(length + 4)
    for m in range(3, length + 4):
        prefix[m] = prefix[m - 1] + bridge_length(m)
    return prefix


@lru_cache(maxsize=None)
def _a_table(length: int) -> np.ndarray:
    table = np.zeros((length + 3, 3))
    for n in range(2, length + 3):
        table[n] = a_vertex(n)
    return table


def _chain_dist(space, ca, A, cb, B):
    prefix = _bridge_prefix(space.length)
    lo_c, hi_c = np.minimum(ca, cb), np.maximum(ca, cb)
    swap = (ca > cb)[:, None]
    LO = np.where(swap, B, A)
    HI = np.where(swap, A, B)
    n_lo, n_hi = lo_c + 1, hi_c + 1
    entry = _a_table(space.length)[n_hi]
    cross = (_sphere_dist(LO, np.broadcast_to(B_VERTEX, LO.shape))
             + prefix[np.maximum(n_hi - 1, 0)] - prefix[n_lo]
             + _sphere_dist(entry, HI))
    return np.where(ca == cb, _sphere_dist(A, B), cross)


def _chain_geo_one(space, ci, x, cj, y, t):
    if ci == cj:
        return ci, _plain_geo(space, x[None], y[None], t)[0]
    if ci > cj:
        return _chain_geo_one(space, cj, y, ci, x, 1.0 - t)
    ni, nj = ci + 1, cj + 1
    # pieces (component, start, end) along the concatenated path
    pieces = [(ci, x, B_VERTEX)]
    pieces += [(m - 1, a_vertex(m), B_VERTEX) for m in range(ni + 1, nj)]
    pieces.append((cj, a_vertex(nj), y))
    lengths = [float(_sphere_dist(p, q)) for _, p, q in pieces]
    s = t * sum(lengths)
    for (comp, p, q), ell in zip(pieces, lengths):
        if s <= ell or comp == cj:
            frac = 0.0 if ell == 0 else min(s / ell, 1.0)
            return comp, _plain_geo(space, p[None], q[None], frac)[0]
        s -= ell
    raise AssertionError("unreachable")


def _glued_dist_one(space, ci, x, cj, y):
    X, Y = space.left, space.right
    th = np.asarray(space.theta.coords)
    ta = np.asarray(space.tau.coords)
    x = x[: (X if ci == 0 else Y).width]
    y = y[: (X if cj == 0 else Y).width]
    if ci == cj:
        child = X if ci == 0 else Y
        return float(_plain_dist(child, x[None], y[None])[0])
    if ci == 1:
        x, y = y, x
    return float(_plain_dist(X, x[None], th[None])[0] + _plain_dist(Y, ta[None], y[None])[0])


def _glued_geo_one(space, ci, x, cj, y, t):
    X, Y = space.left, space.right
    x = x[: (X if ci == 0 else Y).width]
    y = y[: (X if cj == 0 else Y).width]
    if ci == cj:
        child = X if ci == 0 else Y
        return ci, _plain_geo(child, x[None], y[None], t)[0]
    if ci == 1:
        return _glued_geo_one(space, 0, y, 1, x, 1.0 - t)
    th = np.asarray(space.theta.coords)
    ta = np.asarray(space.tau.coords)
    d1 = float(_plain_dist(X, x[None], th[None])[0])
    d2 = float(_plain_dist(Y, ta[None], y[None])[0])
    s = t * (d1 + d2)
    if s <= d1:
        frac = 0.0 if d1 == 0 else s / d1
        return 0, _plain_geo(X, x[None], th[None], frac)[0]
    frac = min((s - d1) / d2, 1.0)
    return 1, _plain_geo(Y, ta[None], y[None], frac)[0]


def _dist(space: SpaceHandle, ca, A, cb, B) -> np.ndarray:
    """Vectorised distance between two batches of equal length."""
    if space.kind == TRIANGLE_CHAIN:
        return _chain_dist(space, np.asarray(ca), A, np.asarray(cb), B)
    if space.kind == GLUED_PAIR:
        return np.array([_glued_dist_one(space, int(i), x, int(j), y)
                         for i, x, j, y in zip(ca, A, cb, B)])
    return _plain_dist(space, A, B)


def _geo(space: SpaceHandle, ca, A, cb, B, t):
    """Vectorised geodesic evaluation; returns ``(comp, Z)``."""
    if space.kind in (TRIANGLE_CHAIN, GLUED_PAIR):
        one = _chain_geo_one if space.kind == TRIANGLE_CHAIN else _glued_geo_one
        tt = np.broadcast_to(np.asarray(t, dtype=float), (len(A),))
        comps, rows = [], []
        for i, x, j, y, s in zip(ca, A, cb, B, tt):
            c, z = one(space, int(i), x, int(j), y, float(s))
            comps.append(c)
            row = np.zeros(space.width)
            row[: z.size] = z
            rows.append(row)
        return np.array(comps, dtype=int), np.array(rows).reshape(len(A), space.width)
    return np.zeros(len(A), dtype=int), _plain_geo(space, A, B, t)


# -- public operations ----------------------------------------------------------

def distance(space: SpaceHandle, p: Point, q: Point) -> float:
    """Geodesic distance between two points of ``space``.

    For glued spaces this is the gluing metric: the child distance when both
    points lie in the same piece, otherwise the sum of the distances to the
    identified points.
    """
    _check_same_space(space, p, q)
    ca, A = _pack(space, [p])
    cb, B = _pack(space, [q])
    return float(_dist(space, ca, A, cb, B)[0])


def geodesic_point(space: SpaceHandle, p: Point, q: Point, t: float) -> Point:
    """The point ``(1 - t) p + t q`` on the unique geodesic from ``p`` to ``q``.

    Parameters
    ----------
    space : SpaceHandle
    p, q : Point
        Endpoints; ``t = 0`` returns ``p`` and ``t = 1`` returns ``q``.
    t : float
        Parameter in ``[0, 1]``.  Use :func:`ray_point` to go beyond ``q``.

    Notes
    -----
    When the point falls exactly on a gluing point it is tagged with the
    lower of the two component indices.
    """
    _check_same_space(space, p, q)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"geodesic parameter t={t} outside [0, 1]")
    ca, A = _pack(space, [p])
    cb, B = _pack(space, [q])
    comp, Z = _geo(space, ca, A, cb, B, t)
    return _unpack(space, comp[0], Z[0])


def midpoint(space: SpaceHandle, p: Point, q: Point) -> Point:
    return geodesic_point(space, p, q, 0.5)


def segment(p: Point, q: Point) -> GeodesicSegment:
    return GeodesicSegment(p, q)


def ray_point(space: SpaceHandle, origin: Point, through: Point, s: float) -> Point:
    """Point at distance ``s`` along the unit-speed ray from ``origin`` through ``through``."""
    _check_same_space(space, origin, through)
    if space.kind not in (EUCLIDEAN, HYPERBOLIC2):
        raise CapabilityError(f"rays do not extend indefinitely in {space.kind}")
    if s < 0:
        raise DomainError("ray parameter must be nonnegative")
    o, q = origin.array, through.array
    d = distance(space, origin, through)
    if d == 0:
        raise DomainError("origin and through must differ")
    if space.kind == EUCLIDEAN:
        return Point(space, o + s * (q - o) / d)
    u = (q - math.cosh(d) * o) / math.sinh(d)
    z = math.cosh(s) * o + math.sinh(s) * u
    return Point(space, _hyp_lift(z), tol=GEOMETRIC_TOL)


def triangle_data(n: int) -> TriangleData:
    """Vertices and reference distances of ``Delta_n``, certified against closed forms."""
    if n < 2:
        raise DomainError("triangle index must be >= 2")
    a = a_vertex(n)
    d = lambda u, v: float(_sphere_dist(u[None], v[None])[0])  # noqa: E731
    mid = _plain_geo(spherical_triangle(n), B_VERTEX[None], C_VERTEX[None], 0.5)[0]
    data = TriangleData(n, tuple(a), tuple(B_VERTEX), tuple(C_VERTEX), tuple(mid),
                        d(B_VERTEX, C_VERTEX), d(a, B_VERTEX), d(a, C_VERTEX), d(a, mid))
    worst = max(data.residuals().values())
    if worst > CLOSED_FORM_TOL:
        raise AssertionError(f"Delta_{n} data off its closed form by {worst:.3e}")
    return data


@lru_cache(maxsize=None)
def triangle_diameter(n: int, grid: int = 64) -> float:
    """Numerical diameter of ``Delta_n`` over vertex pairs and a boundary grid."""
    verts = triangle_vertices(n)
    ts = np.linspace(0.0, 1.0, grid + 1)
    space = spherical_triangle(n)
    edges = []
    for i in range(3):
        u, v = verts[i], verts[(i + 1) % 3]
        edges.append(_plain_geo(space, np.repeat(u[None], len(ts), 0), np.repeat(v[None], len(ts), 0), ts))
    pts = np.concatenate(edges)
    D = _sphere_dist(pts[:, None, :], pts[None, :, :])
    return float(D.max())


def chain_distance(chain: SpaceHandle, x: Point, y: Point) -> float:
    """Gluing-metric distance in the triangle chain."""
    if chain.kind != TRIANGLE_CHAIN:
        raise DomainError("chain_distance needs a triangleChain space")
    return distance(chain, x, y)


def chain_locality(chain: SpaceHandle, a: Point, r: float, i: Optional[int] = None) -> int:
    """Index ``N`` such that the closed ball ``B(a, r)`` lies in ``Y_N``.

    ``Y_i`` is the union of ``Delta_2, ..., Delta_{i+2}``.  When ``i`` is not
    given the smallest ``i`` with ``a`` in ``Y_i`` is used.
    """
    if chain.kind != TRIANGLE_CHAIN:
        raise DomainError("chain_locality needs a triangleChain space")
    _check_same_space(chain, a)
    if r <= 0:
        raise DomainError("radius must be positive")
    smallest = max(1, a.component - 1)
    if i is None:
        i = smallest
    elif i < smallest:
        raise DomainError(f"point is not in Y_{i}")
    return i + math.ceil(r / math.acos(SQRT3 / (2 * i + 4)))


# -- tangent-space helpers used by samplers ----------------------------------

def _hyp_frame(p: np.ndarray) -> np.ndarray:
    """Minkowski-orthonormal tangent basis (2 x 3) at a hyperboloid point."""
    rho, phi = _hyp_polar(p)
    c, s = math.cosh(rho), math.sinh(rho)
    cp, sp = math.cos(phi), math.sin(phi)
    radial = np.array([s, c * cp, c * sp])
    angular = np.array([0.0, -sp, cp])
    return np.stack([radial, angular])


def _sphere_frame(p: np.ndarray) -> np.ndarray:
    helper = np.array([1.0, 0.0, 0.0]) if abs(p[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(p, helper)
    e1 /= np.linalg.norm(e1)
    return np.stack([e1, np.cross(p, e1)])


def _exp_batch(space: SpaceHandle, base: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Exponential map at ``base`` applied to intrinsic tangent coefficients ``V``.

    ``V`` has shape (m, k) in the orthonormal frame of the tangent space
    (k = dim for Euclidean, 2 otherwise).
    """
    if space.kind == EUCLIDEAN:
        return base[None, :] + V
    frame = _hyp_frame(base) if space.kind == HYPERBOLIC2 else _sphere_frame(base)
    T = V @ frame
    norm = np.linalg.norm(V, axis=1, keepdims=True)
    safe = np.where(norm == 0, 1.0, norm)
    if space.kind == HYPERBOLIC2:
        Z = np.cosh(norm) * base[None, :] + np.sinh(norm) * T / safe
        return _hyp_lift(Z)
    Z = np.cos(norm) * base[None, :] + np.sin(norm) * T / safe
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def _log_direction(space: SpaceHandle, base: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Unit tangent direction (frame coefficients) from ``base`` towards each row of ``X``."""
    if space.kind == EUCLIDEAN:
        V = X - base[None, :]
    else:
        frame = _hyp_frame(base) if space.kind == HYPERBOLIC2 else _sphere_frame(base)
        if space.kind == HYPERBOLIC2:
            G = np.stack([_minkowski(X, f[None, :]) for f in frame], axis=1)
        else:
            G = X @ frame.T
        V = G
    norm = np.linalg.norm(V, axis=1, keepdims=True)
    return V / np.where(norm == 0, 1.0, norm)


def tangent_dim(space: SpaceHandle) -> int:
    return space.dim if space.kind == EUCLIDEAN else 2
