"""Moduli of convexity: sampled estimators, analytic moduli and checkers.

Sampled quantities are infima or suprema over finitely many configurations,
so a :class:`ModulusEstimate` is an upper bound for the true modulus and a
:class:`CheckReport` can only exhibit violations, never rule them out.

All samplers draw from disjoint sub-streams ``SeedSequence(seed,
spawn_key=(block,))`` in fixed-size blocks, so the first ``m`` samples of a
run never depend on how many samples were requested in total.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import geometry as geo
from .errors import DomainError, InconclusiveError, ValidationError
from .geometry import (EUCLIDEAN, HYPERBOLIC2, SPHERICAL_TRIANGLE, TRIANGLE_CHAIN,
                       GLUED_PAIR, Point, SpaceHandle)

BLOCK = 4096
ADMISSIBILITY_SLACK = 1e-12
CHECK_TOL = 1e-9

OK = "ok"
VIOLATION = "violation"
INCONCLUSIVE = "inconclusive"


@dataclass
class ModulusEstimate:
    center: Point
    radius: float
    eps: float
    value: Optional[float]
    samples: int
    accepted: int
    seed: int
    status: str = OK
    witness: Optional[dict] = None

    def to_record(self) -> dict:
        return {"center": self.center.to_record(), "radius": self.radius, "eps": self.eps,
                "value": self.value, "samples": self.samples, "accepted": self.accepted,
                "seed": self.seed, "status": self.status, "witness": self.witness}


@dataclass
class CheckReport:
    notion: str
    trials: int
    worst_defect: float
    witness: Optional[dict] = None
    tolerance: float = CHECK_TOL
    status: str = OK
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == OK

    def to_record(self) -> dict:
        return {"notion": self.notion, "trials": self.trials, "worst_defect": self.worst_defect,
                "tolerance": self.tolerance, "status": self.status, "params": self.params,
                "witness": self.witness}


def _finish(notion, trials, worst, witness, tol, params) -> CheckReport:
    if trials == 0:
        return CheckReport(notion, 0, float("-inf"), None, tol, INCONCLUSIVE, params)
    status = VIOLATION if worst > tol else OK
    return CheckReport(notion, trials, float(worst), witness if worst > tol else None,
                       tol, status, params)


# -- analytic moduli -----------------------------------------------------------

def cat0_modulus(eps):
    """``1 - sqrt(1 - eps^2/4)``: exact for Euclidean space, a lower bound in CAT(0)."""
    eps = np.asarray(eps, dtype=float)
    return 1.0 - np.sqrt(1.0 - eps**2 / 4.0)


def hyperbolic_modulus(r, eps):
    """Exact modulus of convexity of the hyperbolic plane.

    From the hyperbolic median formula the deepest midpoint over the ball of
    radius ``r`` with spread ``eps*r`` satisfies
    ``cosh d(a, m) = cosh r / cosh(eps r / 2)``.
    """
    r = np.asarray(r, dtype=float)
    eps = np.asarray(eps, dtype=float)
    # log-domain form stays finite for large r
    log_ratio = (r + np.log1p(np.exp(-2 * r))) - (eps * r / 2 + np.log1p(np.exp(-eps * r)))
    depth = np.where(log_ratio > 20, log_ratio + math.log(2.0),
                     np.arccosh(np.maximum(np.exp(np.minimum(log_ratio, 20)), 1.0)))
    return 1.0 - depth / r


def p_uniform_modulus(k: float, p: float, eps):
    """Modulus ``1 - (1 - k eps^p / 8)^(1/p)`` of a p-uniformly convex space."""
    eps = np.asarray(eps, dtype=float)
    return 1.0 - (1.0 - k * eps**p / 8.0) ** (1.0 / p)


def km_function(k: float, p: float) -> Callable:
    """The function ``g(t) = (1 - k (2t)^p / 8)^(1/p)`` of the Karlsson-Margulis condition."""
    return lambda t: (1.0 - k * (2.0 * np.asarray(t, dtype=float)) ** p / 8.0) ** (1.0 / p)


def c_p(p: float) -> float:
    """Upper limit for the parameter of a p-uniformly convex space."""
    if p <= 1:
        raise DomainError("p must exceed 1")
    return 2.0 * (p - 1.0) if p < 2 else 8.0 / 2.0**p


def ohta_k(kappa: float, diam: float, sigma: float) -> float:
    """2-uniform convexity parameter of a CAT(kappa) space of diameter ``diam``."""
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    limit = math.pi / (2.0 * math.sqrt(kappa))
    if not diam < limit:
        raise DomainError(f"diameter {diam} must be below pi/(2 sqrt(kappa)) = {limit}")
    if not 0.0 < sigma <= limit - diam:
        raise DomainError(f"sigma={sigma} outside (0, {limit - diam}]")
    rk = math.sqrt(kappa)
    return (math.pi - 2.0 * rk * sigma) * math.tan(rk * sigma)


def triangle_modulus(n: int, eps: float, sigma: float, printed: bool = False) -> float:
    """Modulus of uniform convexity of ``Delta_n`` from its 2-uniform parameter.

    ``printed=True`` returns ``sqrt(1 - (1 - k eps^2/8))`` instead of the
    default ``1 - sqrt(1 - k eps^2/8)``; the two differ and only the default
    follows from the 2-uniform convexity inequality.
    """
    if n < 2:
        raise DomainError("triangle index must be >= 2")
    if not 0 < eps <= 2:
        raise DomainError("eps must lie in (0, 2]")
    k = ohta_k(1.0, geo.triangle_diameter(n), sigma)
    if printed:
        return math.sqrt(1.0 - (1.0 - k * eps**2 / 8.0))
    return float(p_uniform_modulus(k, 2.0, eps))


def non_uniform_witness(delta: float) -> int:
    """Smallest ``n >= 2`` with ``arccos(1/n) > (1 - delta) pi / 2``.

    The triple ``(a_n, b_n, c_n)`` of that triangle has spread ``2/3 * pi/2``
    inside the ball of radius ``pi/2`` around ``a_n`` while its midpoint is
    deeper than ``(1 - delta) pi/2``, so no center-independent modulus can
    take the value ``delta`` at ``(pi/2, 2/3)``.
    """
    if not 0 < delta <= 1:
        raise DomainError("delta must lie in (0, 1]")
    target = (1.0 - delta) * math.pi / 2.0
    n = 2
    while not math.acos(1.0 / n) > target:
        n += 1
    return n


def _check_monotone_modulus(eta, a, r, eps, name):
    radii = r * np.geomspace(0.25, 4.0, 9)
    vals = np.array([eta(a, float(rr), eps) for rr in radii])
    if np.any(np.diff(vals) > 1e-12):
        raise ValidationError(f"{name} is not nonincreasing in the radius")
    if np.any(vals <= 0) or np.any(vals > 1):
        raise ValidationError(f"{name} must map into (0, 1]")


def glued_modulus(eta_x: Callable, eta_y: Callable, side: str, a: Point, r: float, eps: float,
                  theta: Optional[Point] = None, tau: Optional[Point] = None) -> float:
    """Modulus of weak uniform convexity of a two-space gluing.

    ``eta_x`` and ``eta_y`` are monotone moduli ``(a, r, eps) -> (0, 1]`` of
    the two pieces; ``side`` says which piece contains the center ``a``.
    ``theta`` and ``tau`` are the identified points of X and Y.
    """
    if not 0 < eps <= 2:
        raise DomainError("eps must lie in (0, 2]")
    if side not in ("X", "Y"):
        raise DomainError("side must be 'X' or 'Y'")
    own, other, glue = (eta_x, eta_y, tau) if side == "X" else (eta_y, eta_x, theta)
    _check_monotone_modulus(own, a, r, eps, "own-side modulus")
    _check_monotone_modulus(other, glue, r, eps, "other-side modulus")
    return min(own(a, r, eps), other(glue, r, eps) * eps / 2.0, eps / 4.0, own(a, r, eps / 4.0))


# -- sampling ---------------------------------------------------------------

def _block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, block)))


def _unit_vectors(rng, m, k):
    V = rng.standard_normal((m, k))
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _triangle_area(n: int) -> float:
    a, b, c = geo.triangle_vertices(n)
    num = abs(np.dot(a, np.cross(b, c)))
    den = 1.0 + a @ b + b @ c + c @ a
    return 2.0 * math.atan2(num, den)


def _sample_triangle(n: int, m: int, rng) -> np.ndarray:
    """Points of the filled triangle: interior (barycentric) and edge samples."""
    verts = geo.triangle_vertices(n)
    lam = rng.dirichlet(np.ones(3), size=m)
    on_edge = rng.random(m) < 0.4
    edge = rng.integers(0, 3, size=m)
    s = rng.random(m)
    lam_edge = np.zeros((m, 3))
    lam_edge[np.arange(m), edge] = 1 - s
    lam_edge[np.arange(m), (edge + 1) % 3] = s
    lam = np.where(on_edge[:, None], lam_edge, lam)
    X = lam @ verts
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _contained(space: SpaceHandle, comp: np.ndarray, X: np.ndarray) -> np.ndarray:
    if space.kind == SPHERICAL_TRIANGLE:
        return geo._in_triangle(geo.triangle_vertices(space.n), X, 1e-13)
    if space.kind == TRIANGLE_CHAIN:
        ok = np.zeros(len(X), dtype=bool)
        for c in np.unique(comp):
            sel = comp == c
            ok[sel] = geo._in_triangle(geo.triangle_vertices(int(c) + 1), X[sel], 1e-13)
        return ok
    return np.ones(len(X), dtype=bool)


def sample_region(space: SpaceHandle, m: int, rng, scale: Optional[float] = None):
    """Draw ``m`` points of a bounded region of ``space`` as a batch ``(comp, X)``.

    Euclidean and hyperbolic spaces use the ball of radius ``scale`` about the
    origin; triangles and chains use the whole space.
    """
    kind = space.kind
    if kind in (EUCLIDEAN, HYPERBOLIC2):
        scale = scale or (10.0 if kind == EUCLIDEAN else 3.0)
        base = geo.origin(space).array
        k = geo.tangent_dim(space)
        V = _unit_vectors(rng, m, k) * (scale * rng.random((m, 1)) ** (1.0 / k))
        return np.zeros(m, dtype=int), geo._exp_batch(space, base, V)
    if kind == SPHERICAL_TRIANGLE:
        return np.zeros(m, dtype=int), _sample_triangle(space.n, m, rng)
    if kind == TRIANGLE_CHAIN:
        comps = rng.integers(1, space.length + 2, size=m)
        X = np.zeros((m, 3))
        for c in np.unique(comps):
            sel = comps == c
            X[sel] = _sample_triangle(int(c) + 1, int(sel.sum()), rng)
        return comps, X
    # glued pair: each side sampled around its gluing point
    side = rng.integers(0, 2, size=m)
    X = np.zeros((m, space.width))
    for s, child, glue in ((0, space.left, space.theta), (1, space.right, space.tau)):
        sel = side == s
        cnt = int(sel.sum())
        if child.kind == SPHERICAL_TRIANGLE:
            pts = _sample_triangle(child.n, cnt, rng)
        else:
            k = geo.tangent_dim(child)
            V = _unit_vectors(rng, cnt, k) * ((scale or 2.0) * rng.random((cnt, 1)) ** (1.0 / k))
            pts = geo._exp_batch(child, glue.array, V)
        X[sel, : child.width] = pts
    return side, X


def _chain_reach(chain: SpaceHandle, a: Point) -> np.ndarray:
    """Lower bound on the distance from ``a`` to each component of the chain."""
    comps = np.array(list(chain.components))
    lo = np.zeros(len(comps))
    ca, A = geo._pack(chain, [a])
    for idx, c in enumerate(comps):
        if c == a.component:
            continue
        gate = geo.a_vertex(int(c) + 1) if c > a.component else geo.B_VERTEX
        lo[idx] = geo._dist(chain, ca, A, np.array([c]), gate[None])[0]
    return lo


def sample_ball(space: SpaceHandle, a: Point, r: float, m: int, rng):
    """Draw about ``m`` points of the closed ball ``B(a, r)``.

    Returns ``(comp, X, V)`` where ``V`` holds tangent coefficients at ``a``
    for exp-based samplers (Euclidean, hyperbolic) and is ``None`` otherwise.
    Half of the exp-based samples lie on the bounding sphere, where extremal
    configurations live.  Points outside the ball are rejected, so fewer than
    ``m`` points may come back.
    """
    kind = space.kind
    base = a.array
    if kind in (EUCLIDEAN, HYPERBOLIC2):
        k = geo.tangent_dim(space)
        rad = np.where(rng.random(m) < 0.5, 1.0, rng.random(m) ** (1.0 / k))
        V = _unit_vectors(rng, m, k) * (r * rad)[:, None]
        return np.zeros(m, dtype=int), geo._exp_batch(space, base, V), V
    if kind == SPHERICAL_TRIANGLE:
        m_sphere = m // 4
        X1 = _sample_triangle(space.n, m - m_sphere, rng)
        V = _unit_vectors(rng, m_sphere, 2) * r
        X2 = geo._exp_batch(space, base, V)
        X = np.concatenate([X1, X2])
        comp = np.zeros(len(X), dtype=int)
        keep = _contained(space, comp, X)
    elif kind == TRIANGLE_CHAIN:
        comp, X = _sample_chain_ball(space, a, r, m, rng)
        keep = np.ones(len(X), dtype=bool)
    else:
        comp, X = sample_region(space, m, rng, scale=r)
        keep = np.ones(len(X), dtype=bool)
    comp, X = comp[keep], X[keep]
    ca = np.full(len(X), a.component)
    d = geo._dist(space, ca, np.repeat(base[None, :], len(X), 0), comp, X)
    inside = d <= r + ADMISSIBILITY_SLACK * max(1.0, r)
    return comp[inside], X[inside], None


def _sample_chain_ball(chain, a, r, m, rng):
    comps = np.array(list(chain.components))
    reach = _chain_reach(chain, a)
    cand = comps[reach <= r]
    ca, A = geo._pack(chain, [a])
    weights = []
    for c in cand:
        pilot = _sample_triangle(int(c) + 1, 64, rng)
        d = geo._dist(chain, np.full(64, a.component), np.repeat(A, 64, 0), np.full(64, c), pilot)
        frac = max(np.mean(d <= r), 1.0 / 128)
        weights.append(frac * _triangle_area(int(c) + 1))
    weights = np.array(weights) / np.sum(weights)
    counts = rng.multinomial(m, weights)
    out_c, out_x = [], []
    for c, cnt in zip(cand, counts):
        if cnt:
            out_c.append(np.full(cnt, c))
            out_x.append(_sample_triangle(int(c) + 1, int(cnt), rng))
    comp, X = np.concatenate(out_c), np.concatenate(out_x)
    order = rng.permutation(len(comp))
    return comp[order], X[order]


def _record(space, comp, x) -> dict:
    p = geo._unpack(space, comp, x)
    return p.to_record()


# -- modulus estimation ------------------------------------------------------------

def modulus_estimate(space: SpaceHandle, a: Point, r: float, eps: float, n_samples: int,
                     seed: int) -> ModulusEstimate:
    """Sampled infimum of ``1 - d(a, m(x, y)) / r`` over admissible pairs.

    A pair ``(x, y)`` is admissible when both points lie in ``B(a, r)`` and
    ``d(x, y) >= eps * r``.  ``n_samples`` pairs are proposed; inadmissible
    proposals are discarded.  One proposal in eight pairs ``x`` with its
    reflection through ``a`` (exp-based spaces only), which is what makes the
    degenerate case ``eps = 2`` reachable.

    Returns
    -------
    ModulusEstimate
        ``status == "inconclusive"`` and ``value is None`` if no proposal
        was admissible.
    """
    if r <= 0:
        raise DomainError("radius must be positive")
    if not 0 < eps <= 2:
        raise DomainError("eps must lie in (0, 2]")
    geo._check_same_space(space, a)
    slack = ADMISSIBILITY_SLACK * max(1.0, r)
    best, witness, accepted, proposed, block = math.inf, None, 0, 0, 0
    base = a.array
    while proposed < n_samples:
        m = min(BLOCK, n_samples - proposed)
        rng = _block_rng(seed, block)
        cx, X, VX = sample_ball(space, a, r, BLOCK, rng)
        cy, Y, VY = sample_ball(space, a, r, BLOCK, rng)
        if VX is not None:
            flip = rng.random(BLOCK) < 0.125
            Y = np.where(flip[:, None], geo._exp_batch(space, base, -VX), Y)
        size = min(len(X), len(Y), m)
        cx, X, cy, Y = cx[:size], X[:size], cy[:size], Y[:size]
        dxy = geo._dist(space, cx, X, cy, Y)
        ok = dxy >= eps * r - slack
        if np.any(ok):
            cm, Mid = geo._geo(space, cx[ok], X[ok], cy[ok], Y[ok], 0.5)
            dam = geo._dist(space, np.full(len(Mid), a.component),
                            np.repeat(base[None, :], len(Mid), 0), cm, Mid)
            vals = 1.0 - dam / r
            j = int(np.argmin(vals))
            if vals[j] < best:
                best = float(vals[j])
                idx = np.flatnonzero(ok)[j]
                witness = {"x": _record(space, cx[idx], X[idx]), "y": _record(space, cy[idx], Y[idx])}
            accepted += int(ok.sum())
        proposed += m
        block += 1
    if accepted == 0:
        return ModulusEstimate(a, r, eps, None, proposed, 0, seed, INCONCLUSIVE)
    return ModulusEstimate(a, r, eps, min(max(best, 0.0), 1.0), proposed, accepted, seed, OK, witness)


def condition_one_probe(space: SpaceHandle, a: Point, eps: float, s: float,
                        r_grid: Sequence[float], n_samples: int, seed: int) -> float:
    """Minimum of sampled moduli over a radius grid ``r >= s``.

    Raises
    ------
    InconclusiveError
        If any grid radius has no admissible sample.
    """
    if len(r_grid) == 0:
        raise DomainError("radius grid is empty")
    if any(r < s for r in r_grid):
        raise DomainError("all grid radii must be >= s")
    values = []
    for r in r_grid:
        est = modulus_estimate(space, a, float(r), eps, n_samples, seed)
        if est.status == INCONCLUSIVE:
            raise InconclusiveError(f"no admissible pair at r={r}, eps={eps}")
        values.append(est.value)
    return float(min(values))


# -- checkers ----------------------------------------------------------------------

def sample_triples(space: SpaceHandle, n: int, seed: int, scale: Optional[float] = None):
    """Deterministic triples ``(a, x, y)`` from :func:`sample_region`, as three batches."""
    out = [[], [], [], [], [], []]
    block, done = 0, 0
    while done < n:
        rng = _block_rng(seed, block, stream=1)
        m = min(BLOCK, n - done)
        for i in range(3):
            c, X = sample_region(space, BLOCK, rng, scale)
            out[2 * i].append(c[:m])
            out[2 * i + 1].append(X[:m])
        done += m
        block += 1
    return tuple(np.concatenate(part) for part in out)


def busemann_defect(space: SpaceHandle, n_samples: int, seed: int,
                    scale: Optional[float] = None, tol: float = CHECK_TOL) -> CheckReport:
    """Worst sampled value of ``d(g1(t l1), g2(t l2)) - t d(g1(l1), g2(l2))``.

    Each configuration is a common start ``o``, two endpoints and a
    parameter ``t`` uniform in [0, 1].
    """
    co, O, c1, P1, c2, P2 = sample_triples(space, n_samples, seed, scale)
    t = _block_rng(seed, 0, stream=2).random(n_samples)
    ca, A = geo._geo(space, co, O, c1, P1, t)
    cb, B = geo._geo(space, co, O, c2, P2, t)
    defect = geo._dist(space, ca, A, cb, B) - t * geo._dist(space, c1, P1, c2, P2)
    j = int(np.argmax(defect))
    witness = {"origin": _record(space, co[j], O[j]), "end1": _record(space, c1[j], P1[j]),
               "end2": _record(space, c2[j], P2[j]), "t": float(t[j])}
    return _finish("busemann", n_samples, defect[j], witness, tol,
                   {"space": space.describe(), "seed": seed})


def _call_vectorised(fn, values):
    try:
        out = np.asarray(fn(values), dtype=float)
        if out.shape == values.shape:
            return out
    except Exception:  # fall back to scalar calls for non-vectorised callables
        pass
    return np.array([float(fn(float(v))) for v in values])


def _validate_g(g):
    grid = np.linspace(0.0, 1.0, 201)
    vals = _call_vectorised(g, grid)
    if abs(vals[0] - 1.0) > 1e-12:
        raise ValidationError("g(0) must equal 1")
    if np.any(np.diff(vals) >= 0):
        raise ValidationError("g must be strictly decreasing on [0, 1]")
    if np.any(vals < 0) or np.any(vals > 1):
        raise ValidationError("g must map [0, 1] into [0, 1]")


def chain_witness_family(chain: SpaceHandle, n_max: int):
    """The triples ``(a_n, b_n, c_n)`` of ``Delta_2 .. Delta_{n_max}`` as chain points."""
    if n_max - 1 > chain.length + 1:
        raise DomainError(f"chain too short for Delta_{n_max}")
    return [(geo.chain_vertex(chain, n, "a"), geo.chain_vertex(chain, n, "b"),
             geo.chain_vertex(chain, n, "c")) for n in range(2, n_max + 1)]


def _with_configurations(space, batches, configurations):
    if not configurations:
        return batches
    extra = [geo._pack(space, [cfg[i] for cfg in configurations]) for i in range(3)]
    merged = []
    for i in range(3):
        merged.append(np.concatenate([batches[2 * i], extra[i][0]]))
        merged.append(np.concatenate([batches[2 * i + 1], extra[i][1]]))
    return tuple(merged)


def km_convexity_check(space: SpaceHandle, g: Callable, n_samples: int, seed: int,
                       configurations=None, scale: Optional[float] = None,
                       tol: float = CHECK_TOL) -> CheckReport:
    """Worst value of ``d(a, m(x, y)) / M - g(d(x, y) / (2M))`` with ``M = max(d(x, a), d(y, a))``.

    ``configurations`` is an optional list of ``(a, x, y)`` point triples
    evaluated in addition to the random ones; configurations with ``M = 0``
    are skipped.
    """
    _validate_g(g)
    ca, A, cx, X, cy, Y = _with_configurations(space, sample_triples(space, n_samples, seed, scale),
                                               configurations)
    dax = geo._dist(space, ca, A, cx, X)
    day = geo._dist(space, ca, A, cy, Y)
    M = np.maximum(dax, day)
    live = M > 0
    ca, A, cx, X, cy, Y, M = ca[live], A[live], cx[live], X[live], cy[live], Y[live], M[live]
    cm, Mid = geo._geo(space, cx, X, cy, Y, 0.5)
    ratio = geo._dist(space, ca, A, cm, Mid) / M
    arg = np.clip(geo._dist(space, cx, X, cy, Y) / (2 * M), 0.0, 1.0)
    defect = ratio - _call_vectorised(g, arg)
    if len(defect) == 0:
        return _finish("kmUniform", 0, 0.0, None, tol, {})
    j = int(np.argmax(defect))
    witness = {"a": _record(space, ca[j], A[j]), "x": _record(space, cx[j], X[j]),
               "y": _record(space, cy[j], Y[j])}
    return _finish("kmUniform", len(defect), defect[j], witness, tol,
                   {"space": space.describe(), "seed": seed})


def p_uniform_check(space: SpaceHandle, p: float, k: float, n_samples: int, seed: int,
                    scale: Optional[float] = None, tol: float = CHECK_TOL) -> CheckReport:
    """Worst defect of the p-uniform convexity inequality with parameter ``k``.

    The defect is ``d(a, z)^p - [(1-t) d(a,x)^p + t d(a,y)^p - (k/2) t(1-t) d(x,y)^p]``
    for ``z = (1-t)x + ty``.  Every sampled triple is evaluated at a random
    ``t`` and at ``t = 1/2``; the triples coincide with those of
    :func:`km_convexity_check` for the same seed.
    """
    if p <= 1 or k <= 0:
        raise DomainError("need p > 1 and k > 0")
    if k > c_p(p):
        warnings.warn(f"k={k} exceeds c_p={c_p(p)}; violations are expected", stacklevel=2)
    ca, A, cx, X, cy, Y = sample_triples(space, n_samples, seed, scale)
    t_rand = _block_rng(seed, 0, stream=3).random(n_samples)
    dax = geo._dist(space, ca, A, cx, X)
    day = geo._dist(space, ca, A, cy, Y)
    dxy = geo._dist(space, cx, X, cy, Y)
    worst, witness = -math.inf, None
    for t in (t_rand, np.full(n_samples, 0.5)):
        cz, Z = geo._geo(space, cx, X, cy, Y, t)
        lhs = geo._dist(space, ca, A, cz, Z) ** p
        rhs = (1 - t) * dax**p + t * day**p - 0.5 * k * t * (1 - t) * dxy**p
        defect = lhs - rhs
        j = int(np.argmax(defect))
        if defect[j] > worst:
            worst = float(defect[j])
            witness = {"a": _record(space, ca[j], A[j]), "x": _record(space, cx[j], X[j]),
                       "y": _record(space, cy[j], Y[j]), "t": float(t[j])}
    return _finish("pUniform", 2 * n_samples, worst, witness, tol,
                   {"space": space.describe(), "seed": seed, "p": p, "k": k})


def property_c_check(space: SpaceHandle, y: Point, psi: Callable, n_samples: int, seed: int,
                     r_range: Optional[tuple] = None, tol: float = CHECK_TOL) -> CheckReport:
    """Search for violations of the implication in property (C).

    Configurations: ``d(x, y) = r``, ``d(y, z) >= r``, ``w`` on ``[y, z]``
    with ``d(y, w) = r``.  Those satisfying
    ``r + d(x, z) <= d(y, z) + psi(y, r, eps) r`` contribute the defect
    ``d(w, x) - eps r``.  ``x`` is placed at a random, mostly small, angle
    from the direction of ``z`` so the hypothesis is met often.
    """
    if space.kind not in (EUCLIDEAN, HYPERBOLIC2, SPHERICAL_TRIANGLE):
        raise DomainError(f"property (C) sampling is not available for {space.kind}")
    geo._check_same_space(space, y)
    if r_range is None:
        r_range = (0.05, 0.5) if space.kind == SPHERICAL_TRIANGLE else (0.1, 5.0)
    base = y.array
    k = geo.tangent_dim(space)
    worst, witness, trials, block, done = -math.inf, None, 0, 0, 0
    while done < n_samples:
        m = min(BLOCK, n_samples - done)
        rng = _block_rng(seed, block, stream=4)
        r = rng.uniform(*r_range, size=m)
        eps = 2.0 * (1.0 - rng.random(m))
        L = r * (1.0 + 3.0 * rng.random(m))
        u = _unit_vectors(rng, m, k)
        # perturbation of the direction of x away from that of z
        spread = np.pi * 10.0 ** (-3.0 * rng.random(m)) * np.abs(rng.standard_normal(m))
        perp = _unit_vectors(rng, m, k)
        perp -= np.sum(perp * u, axis=1, keepdims=True) * u
        pn = np.linalg.norm(perp, axis=1, keepdims=True)
        perp = np.where(pn > 1e-12, perp / np.where(pn == 0, 1, pn), 0.0)
        # a few exact w = x configurations
        ang = np.where(rng.random(m) < 0.02, 0.0, np.minimum(spread, np.pi))[:, None]
        ux = np.cos(ang) * u + np.sin(ang) * perp
        Z = geo._exp_batch(space, base, L[:, None] * u)
        Xp = geo._exp_batch(space, base, r[:, None] * ux)
        zeros = np.zeros(m, dtype=int)
        keep = _contained(space, zeros, Z) & _contained(space, zeros, Xp)
        Yb = np.repeat(base[None, :], m, 0)
        dyz = geo._dist(space, zeros, Yb, zeros, Z)
        _, W = geo._geo(space, zeros, Yb, zeros, Z, np.where(dyz > 0, r / np.where(dyz > 0, dyz, 1), 0))
        dxz = geo._dist(space, zeros, Xp, zeros, Z)
        psi_vals = np.array([float(psi(y, float(rr), float(ee))) for rr, ee in zip(r, eps)])
        if np.any(psi_vals <= 0) or np.any(psi_vals > 1):
            raise ValidationError("psi must map into (0, 1]")
        hyp = keep & (dyz >= r) & (r + dxz <= dyz + psi_vals * r)
        if np.any(hyp):
            defect = geo._dist(space, zeros, W, zeros, Xp) - eps * r
            defect = np.where(hyp, defect, -np.inf)
            j = int(np.argmax(defect))
            trials += int(hyp.sum())
            if defect[j] > worst:
                worst = float(defect[j])
                witness = {"x": _record(space, 0, Xp[j]), "z": _record(space, 0, Z[j]),
                           "w": _record(space, 0, W[j]), "r": float(r[j]), "eps": float(eps[j])}
        done += m
        block += 1
    return _finish("propertyC", trials, worst, witness, tol,
                   {"space": space.describe(), "seed": seed, "center": y.to_record()})


def property_c_defect(space: SpaceHandle, y: Point, x: Point, z: Point, r: float, eps: float,
                      psi_value: float) -> Optional[float]:
    """Defect ``d(w, x) - eps r`` of one configuration, or ``None`` if the hypothesis fails."""
    dyz = geo.distance(space, y, z)
    if not (abs(geo.distance(space, x, y) - r) <= geo.GEOMETRIC_TOL * max(1.0, r) and dyz >= r):
        raise DomainError("configuration needs d(x, y) = r <= d(y, z)")
    if r + geo.distance(space, x, z) > dyz + psi_value * r:
        return None
    w = geo.geodesic_point(space, y, z, r / dyz)
    return geo.distance(space, w, x) - eps * r
