"""Cocycles of nonexpansive maps over a Bernoulli shift.

The probability space is the one-sided Bernoulli shift on a finite alphabet:
a point ``x`` is a symbol sequence, ``T`` drops the first symbol, and
``w(x)`` is the generator indexed by ``x[0]``.  The cocycle is

    a_n(x) = w(x) w(Tx) ... w(T^{n-1} x),

so ``a_n(x) y = g[x0](g[x1](... g[x_{n-1}](y)))``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import geometry as geo
from .convexity import CHECK_TOL, CheckReport, _finish, _record, sample_region
from .errors import DomainError, PreconditionError, ValidationError
from .geometry import EUCLIDEAN, HYPERBOLIC2, Point, SpaceHandle

MINKOWSKI = np.diag([-1.0, 1.0, 1.0])
REORTHO_EVERY = 64


@dataclass(frozen=True)
class SymbolicSystem:
    probabilities: tuple
    seed: int = 0

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size < 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "probabilities", tuple(float(v) for v in p))

    @property
    def alphabet_size(self) -> int:
        return len(self.probabilities)


def sample_path(system: SymbolicSystem, length: int, path_index: int = 0) -> np.ndarray:
    """Symbols ``x_0 .. x_{length-1}``; deterministic in ``(seed, path_index)``."""
    if length < 0:
        raise DomainError("length must be nonnegative")
    rng = np.random.default_rng(np.random.SeedSequence(system.seed, spawn_key=(path_index,)))
    return rng.choice(system.alphabet_size, size=length, p=np.asarray(system.probabilities))


def shift(symbols: np.ndarray, k: int = 1) -> np.ndarray:
    """The shift ``T^k``: drop the first ``k`` symbols."""
    return np.asarray(symbols)[k:]


# -- maps ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Isometry:
    """Linear isometry of the ambient model.

    For Euclidean d-space ``matrix`` is the (d+1) x (d+1) homogeneous form
    of ``x -> Q x + b``; for the hyperbolic plane it is a 3 x 3 matrix
    preserving the Minkowski form.
    """

    matrix: np.ndarray
    name: str = "isometry"

    def apply(self, space: SpaceHandle, X: np.ndarray) -> np.ndarray:
        M = self.matrix
        if space.kind == EUCLIDEAN:
            d = space.dim
            return X @ M[:d, :d].T + M[:d, d]
        return geo._hyp_lift(X @ M.T)


@dataclass(frozen=True, eq=False)
class GeodesicContraction:
    """``p -> (1 - factor) target + factor p``: moves ``p`` towards ``target``."""

    target: Point
    factor: float
    name: str = "contraction"

    def __post_init__(self):
        if not 0 < self.factor <= 1:
            raise ValidationError("contraction factor must lie in (0, 1]")

    def apply(self, space: SpaceHandle, X: np.ndarray) -> np.ndarray:
        T = np.repeat(self.target.array[None, :], len(X), 0)
        zeros = np.zeros(len(X), dtype=int)
        return geo._geo(space, zeros, T, zeros, X, self.factor)[1]


@dataclass(frozen=True, eq=False)
class CoordinateMap:
    """Arbitrary map given on coordinate arrays; nonexpansiveness is not assumed."""

    fn: Callable
    name: str = "map"

    def apply(self, space: SpaceHandle, X: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(X), dtype=float)


@dataclass(frozen=True, eq=False)
class MapFamily:
    space: SpaceHandle
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if not self.generators:
            raise ValidationError("a map family needs at least one generator")
        for g in self.generators:
            if isinstance(g, Isometry):
                _check_isometry(self.space, g.matrix)

    @property
    def isometric(self) -> bool:
        return all(isinstance(g, Isometry) for g in self.generators)

    def apply(self, index: int, X: np.ndarray) -> np.ndarray:
        return self.generators[index].apply(self.space, X)


def _check_isometry(space: SpaceHandle, M: np.ndarray) -> None:
    M = np.asarray(M, dtype=float)
    if space.kind == EUCLIDEAN:
        d = space.dim
        if M.shape != (d + 1, d + 1) or not np.allclose(M[d], np.eye(d + 1)[d]):
            raise ValidationError("Euclidean isometries need a homogeneous (d+1)x(d+1) matrix")
        if not np.allclose(M[:d, :d].T @ M[:d, :d], np.eye(d), atol=1e-10):
            raise ValidationError("linear part is not orthogonal")
    elif space.kind == HYPERBOLIC2:
        if M.shape != (3, 3) or not np.allclose(M.T @ MINKOWSKI @ M, MINKOWSKI, atol=1e-10):
            raise ValidationError("matrix does not preserve the Minkowski form")
        if M[0, 0] < 1 - 1e-10:
            raise ValidationError("matrix swaps the two hyperboloid sheets")
    else:
        raise ValidationError(f"isometry matrices are not supported on {space.kind}")


def translation(vector) -> Isometry:
    v = np.asarray(vector, dtype=float)
    M = np.eye(v.size + 1)
    M[:-1, -1] = v
    return Isometry(M, f"translate{tuple(v)}")


def rotation(angle: float, center=(0.0, 0.0)) -> Isometry:
    """Rotation of the Euclidean plane about ``center``."""
    c, s = math.cos(angle), math.sin(angle)
    Q = np.array([[c, -s], [s, c]])
    ctr = np.asarray(center, dtype=float)
    M = np.eye(3)
    M[:2, :2] = Q
    M[:2, 2] = ctr - Q @ ctr
    return Isometry(M, f"rotate{angle:g}")


def hyperbolic_rotation(angle: float) -> Isometry:
    c, s = math.cos(angle), math.sin(angle)
    return Isometry(np.array([[1.0, 0, 0], [0, c, -s], [0, s, c]]), f"hrotate{angle:g}")


def boost(length: float, direction: float = 0.0) -> Isometry:
    """Hyperbolic translation of the given length along the axis through the apex at angle ``direction``."""
    c, s = math.cosh(length), math.sinh(length)
    B = np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    R = hyperbolic_rotation(direction).matrix
    return Isometry(R @ B @ R.T, f"boost{length:g}@{direction:g}")


def _gram_schmidt(A):
    mink = lambda u, v: -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]  # noqa: E731
    c0, c1, c2 = A[..., :, 0], A[..., :, 1], A[..., :, 2]
    c0 = c0 / np.sqrt(-mink(c0, c0))[..., None]
    c1 = c1 + mink(c1, c0)[..., None] * c0
    c1 = c1 / np.sqrt(mink(c1, c1))[..., None]
    c2 = c2 + mink(c2, c0)[..., None] * c0 - mink(c2, c1)[..., None] * c1
    c2 = c2 / np.sqrt(mink(c2, c2))[..., None]
    return np.stack([c0, c1, c2], axis=-1)


def _cartan(A, orientation):
    # A = R(alpha) B(t) R(beta) [diag(1, 1, -1)]; the angles and t come from
    # the first column and row, which carry no cancellation for large t
    alpha = np.arctan2(A[..., 2, 0], A[..., 1, 0])
    beta = np.arctan2(-A[..., 0, 2] * orientation, A[..., 0, 1])
    t = np.arcsinh(np.hypot(A[..., 1, 0], A[..., 2, 0]))

    def rot(a):
        R = np.zeros(a.shape + (3, 3))
        R[..., 0, 0] = 1.0
        R[..., 1, 1] = R[..., 2, 2] = np.cos(a)
        R[..., 1, 2] = -np.sin(a)
        R[..., 2, 1] = np.sin(a)
        return R

    B = np.zeros(t.shape + (3, 3))
    B[..., 0, 0] = B[..., 1, 1] = np.cosh(t)
    B[..., 0, 1] = B[..., 1, 0] = np.sinh(t)
    B[..., 2, 2] = 1.0
    out = rot(alpha) @ B @ rot(beta)
    out[..., :, 2] *= orientation[..., None]
    return out


def reorthonormalize(A: np.ndarray, orientation=1.0) -> np.ndarray:
    """Project (a batch of) 3x3 matrices back onto O(2,1).

    Near the identity this is Minkowski Gram-Schmidt on the columns; for large
    translation parts, where Minkowski products cancel catastrophically, the
    matrix is rebuilt from its Cartan decomposition.  ``orientation`` is the
    determinant sign, tracked exactly by the caller.
    """
    A = np.array(A, dtype=float)
    orientation = np.broadcast_to(np.asarray(orientation, dtype=float), A.shape[:-2])
    far = A[..., 0, 0] > 10.0
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        return np.where(far[..., None, None], _cartan(A, orientation), _gram_schmidt(A))


# -- trajectories -------------------------------------------------------------------

@dataclass
class CocycleTrajectory:
    family: MapFamily
    basepoint: Point
    symbols: np.ndarray
    orbit: np.ndarray
    components: np.ndarray
    distances: np.ndarray

    @property
    def space(self) -> SpaceHandle:
        return self.family.space

    @property
    def horizon(self) -> int:
        return len(self.distances) - 1

    def point(self, n: int) -> Point:
        return geo._unpack(self.space, self.components[n], self.orbit[n])

    def pair_distances(self, ks, n: int) -> np.ndarray:
        """``d(a_k y, a_n y)`` for every ``k`` in ``ks``."""
        ks = np.asarray(ks, dtype=int)
        sp = self.space
        return geo._dist(sp, self.components[ks], self.orbit[ks],
                         np.full(len(ks), self.components[n]),
                         np.repeat(self.orbit[n][None, :], len(ks), 0))

    def with_distances(self, distances: np.ndarray) -> "CocycleTrajectory":
        return replace(self, distances=np.asarray(distances, dtype=float))


def _check_symbols(family: MapFamily, symbols) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=int)
    if symbols.size and (symbols.min() < 0 or symbols.max() >= len(family.generators)):
        raise ValidationError("symbol outside the generator alphabet")
    return symbols


def _homogeneous(space, x):
    return np.append(x, 1.0) if space.kind == EUCLIDEAN else x


def _fast_orbit(family: MapFamily, symbols: np.ndarray, y: np.ndarray, n_max: int) -> np.ndarray:
    space = family.space
    mats = [g.matrix for g in family.generators]
    signs = np.sign([np.linalg.det(m) for m in mats])
    A = np.eye(mats[0].shape[0])
    orient = 1.0
    yh = _homogeneous(space, y)
    out = np.zeros((n_max + 1, len(y)))
    out[0] = y
    for n in range(1, n_max + 1):
        A = A @ mats[symbols[n - 1]]
        orient *= signs[symbols[n - 1]]
        if space.kind == HYPERBOLIC2 and n % REORTHO_EVERY == 0:
            A = reorthonormalize(A, orient)
        out[n] = (A @ yh)[: len(y)]
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("orbit overflowed the floating-point range")
    return geo._hyp_lift(out) if space.kind == HYPERBOLIC2 else out


def _reference_orbit(family: MapFamily, symbols: np.ndarray, y: np.ndarray, n_max: int) -> np.ndarray:
    # row n holds g[x_j](...g[x_{n-1}](y)) after processing j; rows n <= j are finished
    Z = np.repeat(y[None, :], n_max + 1, 0)
    for j in range(n_max - 1, -1, -1):
        rows = np.arange(j + 1, n_max + 1)
        Z[rows] = family.apply(int(symbols[j]), Z[rows])
    return Z


def cocycle_orbit(family: MapFamily, symbols, y: Point, n_max: int,
                  fast: Optional[bool] = None) -> CocycleTrajectory:
    """Orbit ``a_n(x) y`` for ``n = 0..n_max`` and the distances ``D_n(x) = d(y, a_n(x) y)``.

    Isometry-only families use the incremental matrix product
    ``a_n = a_{n-1} g[x_{n-1}]`` (``fast=True``, the default for them);
    other families apply the maps innermost-first for every ``n``, which
    costs O(n_max^2) map evaluations.
    """
    geo._check_same_space(family.space, y)
    if family.space.kind in (geo.GLUED_PAIR, geo.TRIANGLE_CHAIN):
        raise DomainError("cocycles are supported on single-chart spaces only")
    symbols = _check_symbols(family, symbols)
    if len(symbols) < n_max:
        raise DomainError("symbol sequence shorter than n_max")
    if fast is None:
        fast = family.isometric
    if fast and not family.isometric:
        raise DomainError("the fast path needs an isometry-only family")
    yv = y.array
    orbit = (_fast_orbit if fast else _reference_orbit)(family, symbols, yv, n_max)
    comps = np.zeros(n_max + 1, dtype=int)
    D = geo._dist(family.space, comps, np.repeat(yv[None, :], n_max + 1, 0), comps, orbit)
    return CocycleTrajectory(family, y, symbols[:n_max].copy(), orbit, comps, D)


def shifted_distance(family: MapFamily, symbols, k: int, n: int, y: Point) -> float:
    """``D_n(x, k) = d(y, a_{n-k}(T^k x) y)``."""
    symbols = _check_symbols(family, symbols)
    if not 0 <= k <= n <= len(symbols):
        raise DomainError("need 0 <= k <= n <= len(symbols)")
    z = y.array[None, :]
    for j in range(n - 1, k - 1, -1):
        z = family.apply(int(symbols[j]), z)
    zeros = np.zeros(1, dtype=int)
    return float(geo._dist(family.space, zeros, y.array[None, :], zeros, z)[0])


def shifted_distances(traj: CocycleTrajectory, n: int) -> np.ndarray:
    """``D_n(x, k)`` for ``k = 0..n``.

    For isometries ``a_{n-k}(T^k x) = a_k(x)^{-1} a_n(x)``, so the values are
    the orbit distances ``d(a_k y, a_n y)``; other families are evaluated
    map by map.
    """
    if traj.family.isometric:
        return traj.pair_distances(np.arange(n + 1), n)
    return np.array([shifted_distance(traj.family, traj.symbols, k, n, traj.basepoint)
                     for k in range(n + 1)])


def nonexpansive_defect(family: MapFamily, n_samples: int, seed: int,
                        scale: Optional[float] = None, tol: float = CHECK_TOL) -> CheckReport:
    """Worst sampled ``d(f p, f q) - d(p, q)`` over generators and point pairs."""
    space = family.space
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(5,)))
    cp, P = sample_region(space, n_samples, rng, scale)
    cq, Q = sample_region(space, n_samples, rng, scale)
    base = geo._dist(space, cp, P, cq, Q)
    worst, witness = -math.inf, None
    for gi in range(len(family.generators)):
        defect = geo._dist(space, cp, family.apply(gi, P), cq, family.apply(gi, Q)) - base
        j = int(np.argmax(defect))
        if defect[j] > worst:
            worst = float(defect[j])
            witness = {"generator": gi, "p": _record(space, cp[j], P[j]), "q": _record(space, cq[j], Q[j])}
    return _finish("nonexpansive", n_samples * len(family.generators), worst, witness, tol,
                   {"space": space.describe(), "seed": seed})


# -- drift -----------------------------------------------------------------------------

@dataclass
class DriftEstimate:
    A: float
    A_se: float
    per_n: List[tuple]
    n_paths: int
    status: str
    threshold: float
    extrapolated: float = float("nan")

    def to_record(self) -> dict:
        return {"A": self.A, "A_se": self.A_se, "n_paths": self.n_paths, "status": self.status,
                "threshold": self.threshold, "extrapolated": self.extrapolated,
                "per_n": [{"n": n, "mean": m, "se": s} for n, m, s in self.per_n]}


def _batched_distances(family: MapFamily, paths: np.ndarray, y: np.ndarray, grid: Sequence[int]):
    """``D_n`` at grid points for many symbol paths at once (isometry families)."""
    space = family.space
    mats = np.stack([g.matrix for g in family.generators])
    P, n_max = paths.shape
    signs = np.sign(np.linalg.det(mats))
    orient = np.ones(P)
    A = np.repeat(np.eye(mats.shape[1])[None], P, 0)
    yh = _homogeneous(space, y)
    wanted = set(grid)
    out = {}
    zeros = np.zeros(P, dtype=int)
    Y = np.repeat(y[None, :], P, 0)
    for n in range(1, n_max + 1):
        A = np.einsum("pij,pjk->pik", A, mats[paths[:, n - 1]])
        orient = orient * signs[paths[:, n - 1]]
        if space.kind == HYPERBOLIC2 and n % REORTHO_EVERY == 0:
            A = reorthonormalize(A, orient)
        if n in wanted:
            pts = (A @ yh)[:, : len(y)]
            if space.kind == HYPERBOLIC2:
                pts = geo._hyp_lift(pts)
            out[n] = geo._dist(space, zeros, Y, zeros, pts)
    return out


def drift_estimate(family: MapFamily, system: SymbolicSystem, y: Point, n_grid: Sequence[int],
                   n_paths: int, threshold: Optional[float] = None) -> DriftEstimate:
    """Monte Carlo estimate of the drift ``A = inf_n E[D_n] / n`` restricted to ``n_grid``.

    ``status`` is ``"nearZero"`` when ``A`` falls below ``threshold`` (default
    three standard errors of the largest-n mean), or when the growth looks
    diffusive: the extrapolation ``2 m(n) - m(n/4)``, which removes a
    ``c / sqrt(n)`` term from the means ``m``, is within three standard
    errors of zero.
    """
    grid = [int(n) for n in n_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
        raise DomainError("n_grid must be a increasing list of positive integers")
    if n_paths < 1:
        raise DomainError("need at least one path")
    if system.alphabet_size != len(family.generators):
        raise ValidationError("alphabet size does not match the number of generators")
    n_max = grid[-1]
    paths = np.stack([sample_path(system, n_max, p) for p in range(n_paths)])
    if family.isometric:
        per = _batched_distances(family, paths, y.array, grid)
    else:
        trajs = [cocycle_orbit(family, row, y, n_max) for row in paths]
        per = {n: np.array([t.distances[n] for t in trajs]) for n in grid}
    stats = []
    for n in grid:
        vals = per[n] / n
        se = float(vals.std(ddof=1) / math.sqrt(n_paths)) if n_paths > 1 else 0.0
        stats.append((n, float(vals.mean()), se))
    j = int(np.argmin([m for _, m, _ in stats]))
    A, A_se = stats[j][1], stats[j][2]
    last_mean, last_se = stats[-1][1], stats[-1][2]
    thr = 3.0 * last_se if threshold is None else float(threshold)
    quarter = min(range(len(grid)), key=lambda i: abs(grid[i] - n_max / 4))
    extrap = float("nan")
    diffusive = False
    if threshold is None and grid[quarter] < n_max:
        q_mean, q_se = stats[quarter][1], stats[quarter][2]
        extrap = 2.0 * last_mean - q_mean
        diffusive = extrap < 3.0 * math.hypot(2 * last_se, q_se)
    status = "nearZero" if (A < thr or diffusive) else "ok"
    return DriftEstimate(float(max(A, 0.0)), A_se, stats, n_paths, status, thr, extrap)


# -- the set E ---------------------------------------------------------------------------

def set_e_starts(traj: CocycleTrajectory, A: float, eps, horizon: int) -> np.ndarray:
    """``m[n]``: the least ``M`` with ``D_n - D_n(x, k) >= (A - eps) k`` for all ``k`` in ``[M, n]``.

    ``m[n] = n + 1`` when even ``k = n`` fails; entry 0 is unused.  A list
    of ``eps`` values gives one row per value, sharing the distance work.
    """
    eps_arr = np.atleast_1d(np.asarray(eps, dtype=float))
    starts = np.zeros((len(eps_arr), horizon + 1), dtype=int)
    D = traj.distances
    for n in range(1, horizon + 1):
        ks = np.arange(1, n + 1)
        gap = D[n] - shifted_distances(traj, n)[1:]
        bad = gap[None, :] < (A - eps_arr)[:, None] * ks[None, :]
        last = np.where(bad.any(axis=1), n - np.argmax(bad[:, ::-1], axis=1), 0)
        starts[:, n] = last + 1
    return starts if np.ndim(eps) else starts[0]


def _check_e_preconditions(A, eps, horizon):
    if A <= 0:
        raise PreconditionError("the drift A must be positive")
    if not 0 < eps < A:
        raise PreconditionError("eps must lie in (0, A)")
    if horizon < 2:
        raise DomainError("horizon must be at least 2")


def set_e_certificate(family: MapFamily, symbols, y: Point, A: float, eps: float, horizon: int,
                      tail: float = 0.5, trajectory: Optional[CocycleTrajectory] = None):
    """Finite-horizon witness for membership in the set E.

    Returns ``(M, ns)``: the least ``M`` admitting some qualifying ``n`` in the
    last ``(1 - tail)`` fraction of the horizon, and every ``n <= horizon``
    for which the inequality holds on all of ``[M, n]``.  ``(None, [])`` is a
    legitimate outcome.
    """
    _check_e_preconditions(A, eps, horizon)
    traj = trajectory or cocycle_orbit(family, symbols, y, horizon)
    starts = set_e_starts(traj, A, eps, horizon)
    ns = np.arange(horizon + 1)
    lo = max(1, int(math.ceil(tail * horizon)))
    feasible = starts[lo:][starts[lo:] <= ns[lo:]]
    if feasible.size == 0:
        return None, []
    M = int(feasible.min())
    qualifying = [int(n) for n in range(max(M, 1), horizon + 1) if starts[n] <= M]
    return M, qualifying


# -- CSV output ---------------------------------------------------------------------------

def write_trajectory_csv(traj: CocycleTrajectory, path) -> None:
    width = traj.orbit.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "D_n", "component"] + [f"x{i}" for i in range(width)])
        for n in range(traj.horizon + 1):
            w.writerow([n, repr(float(traj.distances[n])), int(traj.components[n])]
                       + [repr(float(v)) for v in traj.orbit[n]])
