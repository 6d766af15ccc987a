"""Sequence selection and extraction of the tracking geodesic ray.

Given a trajectory ``D_k = d(y, a_k(x) y)`` with drift ``A > 0``, the
selection picks indices ``K_1 < n_1 < K_2 ...`` such that the orbit point
``a_{n_i} y`` is almost aligned with every earlier point in ``[K_i, n_i]``.
The geodesics ``gamma_i`` from ``y`` to ``a_{n_i} y`` then form a Cauchy
sequence on compacts; the limit ``gamma`` satisfies
``d(gamma(Ak), a_k y) <= 9 A k / 2^(i+1)`` on the bracket ``[n_{i-1}, n_i)``.
Every certified claim is re-evaluated on the trajectory data.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import geometry as geo
from .convexity import cat0_modulus, condition_one_probe, hyperbolic_modulus
from .ergodic import CocycleTrajectory, set_e_starts, shifted_distances
from .errors import CapabilityError, DomainError, PreconditionError, ValidationError
from .geometry import EUCLIDEAN, HYPERBOLIC2, TRIANGLE_CHAIN, Point

AUDIT_TOL = 1e-9
DEFAULT_DEPTH = 4


# -- schedule ------------------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleEntry:
    i: int
    alpha: float
    s: float
    p: Optional[int]
    eps: float

    @property
    def target(self) -> float:
        return min(2.0 ** -self.i, self.alpha)

    def inequality_holds(self, A: float) -> bool:
        """``2 eps / (A - eps) <= min(1/2^i, alpha)`` in exact rational arithmetic."""
        e, a = Fraction(self.eps), Fraction(A)
        return e < a and 2 * e / (a - e) <= min(Fraction(1, 2 ** self.i), Fraction(self.alpha))


@dataclass(frozen=True)
class Schedule:
    A: float
    entries: tuple
    A_se: float = float("nan")
    heuristic: bool = False

    def entry(self, i: int) -> ScheduleEntry:
        return self.entries[i - 1]

    @property
    def depth(self) -> int:
        return len(self.entries)

    def to_record(self) -> dict:
        return {"A": self.A, "A_se": self.A_se, "heuristic": self.heuristic,
                "entries": [{"i": e.i, "alpha": e.alpha, "s": e.s, "p": e.p, "eps": e.eps,
                             "inequality": e.inequality_holds(self.A)} for e in self.entries]}


def schedule_eps(A: float, alpha: float, i: int) -> float:
    """``min(A / (1 + 2^(i+1)), A alpha / (2 + alpha))``, lowered by at most
    a few ulps when rounding would break the schedule inequality."""
    eps = min(A / (1 + 2.0 ** (i + 1)), A * alpha / (2 + alpha))
    entry = ScheduleEntry(i, alpha, 1.0, None, eps)
    for _ in range(8):
        if entry.inequality_holds(A):
            return eps
        eps = math.nextafter(eps, 0.0)
        entry = ScheduleEntry(i, alpha, 1.0, None, eps)
    raise ArithmeticError("could not round eps to satisfy the schedule inequality")


def first_persistent(D: np.ndarray, s: float) -> Optional[int]:
    """The least ``p`` with ``D[n] >= s`` for every recorded ``n >= p``; None if ``D[-1] < s``."""
    below = np.flatnonzero(np.asarray(D) < s)
    if below.size == 0:
        return 0
    p = int(below[-1]) + 1
    return p if p < len(D) else None


def epsilon_schedule(A: float, alphas: Sequence[float], s_list: Sequence[float],
                     trajectory: Optional[CocycleTrajectory] = None, A_se: float = float("nan"),
                     heuristic: bool = False) -> Schedule:
    """Build ``eps_i`` for ``i = 1..len(alphas)`` together with the indices ``p_i``."""
    if not A > 0:
        raise PreconditionError("the drift A must be positive")
    if len(alphas) != len(s_list) or not alphas:
        raise ValidationError("alphas and s_list must be nonempty and of equal length")
    entries = []
    for i, (alpha, s) in enumerate(zip(alphas, s_list), start=1):
        if not 0 < alpha <= 1:
            raise ValidationError(f"alpha_{i}={alpha} outside (0, 1]")
        if not s > 0:
            raise ValidationError(f"s_{i} must be positive")
        eps = schedule_eps(A, float(alpha), i)
        p = first_persistent(trajectory.distances, s) if trajectory is not None else None
        entry = ScheduleEntry(i, float(alpha), float(s), p, eps)
        assert entry.inequality_holds(A)
        entries.append(entry)
    return Schedule(float(A), tuple(entries), float(A_se), heuristic)


def _chain_index(space, y: Point) -> int:
    # the triangle hosted by component c is Delta_{c+1}, which lies in Y_j for j >= c
    return max(1, y.component)


def alpha_from_condition_one(space, y: Point, i: int, probe: Optional[dict] = None):
    """``(alpha_i, s_i)`` with ``alpha_i = inf_{r >= s_i} Psi(y, r, 1/2^i)``.

    Euclidean space uses the r-independent CAT(0) modulus.  The hyperbolic
    plane uses its exact modulus, which increases with ``r`` so the infimum
    sits at ``r = s_i``.  The triangle chain uses the lower bound
    ``eps / 2``, valid for ``s_i = (j + 1) pi / eps`` when ``y`` lies in
    ``Y_j``.  ``probe={"sampled": True, ...}`` instead minimises
    :func:`condition_one_probe` over ``s_i * (1, 2, 4)``; such values are
    upper bounds and make the schedule heuristic.
    """
    if int(i) != i:
        raise ValidationError("i must be an integer")
    eps = 2.0 ** -i
    if eps > 2:
        raise ValidationError("eps = 1/2^i must lie in (0, 2]")
    probe = dict(probe or {})
    s = probe.pop("s", None)
    if probe.pop("sampled", False):
        s = 1.0 if s is None else float(s)
        n = int(probe.pop("n_samples", 10_000))
        seed = int(probe.pop("seed", 0))
        alpha = condition_one_probe(space, y, eps, s, [s, 2 * s, 4 * s], n, seed)
        return min(alpha, 1.0), s
    if space.kind == EUCLIDEAN:
        return float(cat0_modulus(eps)), 1.0 if s is None else float(s)
    if space.kind == HYPERBOLIC2:
        s = 1.0 if s is None else float(s)
        exact = probe.pop("modulus", "hyperbolic") == "hyperbolic"
        return float(hyperbolic_modulus(s, eps) if exact else cat0_modulus(eps)), s
    if space.kind == TRIANGLE_CHAIN:
        j = _chain_index(space, y)
        return eps / 2, (j + 1) * math.pi / eps if s is None else float(s)
    raise CapabilityError(f"no analytic modulus for {space.kind}; pass probe={{'sampled': True}}")


# -- selection --------------------------------------------------------------------------

FLAGS = ("order", "set_e", "band", "drift", "alignment")


@dataclass
class SelectionLevel:
    i: int
    M: Optional[int]
    J: Optional[int]
    p: Optional[int]
    K: Optional[int]
    n: Optional[int] = None
    flags: Dict[str, bool] = field(default_factory=dict)
    slack: Dict[str, float] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return bool(self.flags) and all(self.flags.values())

    def to_record(self) -> dict:
        return {"i": self.i, "M": self.M, "J": self.J, "p": self.p, "K": self.K, "n": self.n,
                "flags": dict(self.flags), "slack": dict(self.slack)}


@dataclass
class SequenceSelection:
    schedule: Schedule
    levels: List[SelectionLevel]
    horizon: int
    status: str
    depth: int
    notes: List[str] = field(default_factory=list)

    @property
    def A(self) -> float:
        return self.schedule.A

    def level(self, i: int) -> SelectionLevel:
        return self.levels[i - 1]

    @property
    def certified(self) -> bool:
        return self.depth > 0 and all(self.level(i).certified for i in range(1, self.depth + 1))

    def to_record(self) -> dict:
        return {"horizon": self.horizon, "status": self.status, "depth": self.depth,
                "certified": self.certified, "notes": list(self.notes),
                "schedule": self.schedule.to_record(),
                "levels": [lv.to_record() for lv in self.levels]}


def band_start(D: np.ndarray, A: float, eps: float, horizon: int) -> Optional[int]:
    """The least ``J >= 1`` with ``(A - eps) k <= D_k <= (A + eps) k`` for all ``k`` in ``[J, horizon]``."""
    k = np.arange(1, horizon + 1)
    Dk = D[1: horizon + 1]
    bad = np.flatnonzero((Dk < (A - eps) * k) | (Dk > (A + eps) * k))
    if bad.size == 0:
        return 1
    J = int(k[bad[-1]]) + 1
    return J if J <= horizon else None


def _tail_start(starts: np.ndarray, horizon: int, tail: float) -> Optional[int]:
    ns = np.arange(len(starts))
    lo = max(1, int(math.ceil(tail * horizon)))
    ok = starts[lo:] <= ns[lo:]
    return int(starts[lo:][ok].min()) if ok.any() else None


def select_sequences(trajectory: CocycleTrajectory, schedule: Schedule, horizon: int,
                     depth: Optional[int] = None, tail: float = 0.5,
                     stretch_last: bool = True) -> SequenceSelection:
    """Greedy finite-horizon version of the selection of ``(K_i)`` and ``(n_i)``.

    ``M_i`` is the set-E start from the last ``(1 - tail)`` part of the
    horizon, ``J_i`` the start of the ``eps_i`` band and
    ``K_i = max(M_i, J_i, p_i)``.  Then ``n_1 > K_1 + K_2`` and
    ``n_i > max(n_{i-1}, K_{i+1})`` with
    ``D_{n_i} >= max(D_{n_{i-1}}, A n_{i-1})`` are taken as small as
    possible among the indices satisfying the set-E inequality on
    ``[K_i, n_i]``.  When the schedule has no entry ``depth + 1`` the
    constraint ``n_depth > K_{depth+1}`` is dropped and noted.  With
    ``stretch_last`` the deepest ``n`` is instead the largest qualifying
    index, which lengthens the stretch of ray the selection can certify.
    """
    if horizon > trajectory.horizon:
        raise DomainError("trajectory shorter than the horizon")
    if horizon < 2:
        raise DomainError("horizon must be at least 2")
    A = schedule.A
    depth = min(schedule.depth, DEFAULT_DEPTH) if depth is None else int(depth)
    if not 1 <= depth <= schedule.depth:
        raise ValidationError("depth must lie in [1, schedule depth]")
    n_levels = min(depth + 1, schedule.depth)
    entries = [schedule.entry(i) for i in range(1, n_levels + 1)]
    D = trajectory.distances
    starts = set_e_starts(trajectory, A, [e.eps for e in entries], horizon)
    levels = []
    for e, row in zip(entries, starts):
        M = _tail_start(row, horizon, tail)
        J = band_start(D, A, e.eps, horizon)
        p = first_persistent(D[: horizon + 1], e.s)
        K = max(M, J, p) if None not in (M, J, p) else None
        levels.append(SelectionLevel(e.i, M, J, p, K))
    notes = []
    if n_levels == depth:
        notes.append(f"no schedule entry {depth + 1}: n_{depth} > K_{depth + 1} not enforced")
    chosen = 0
    prev_n = None
    for i in range(1, depth + 1):
        lv = levels[i - 1]
        nxt = levels[i] if i < n_levels else None
        if lv.K is None or (nxt is not None and nxt.K is None):
            break
        k_next = nxt.K if nxt is not None else 0
        if i == 1:
            lo = lv.K + k_next + 1
            floor = -math.inf
        else:
            lo = max(prev_n, k_next) + 1
            floor = max(D[prev_n], A * prev_n)
        lo = max(lo, lv.K)
        cand = np.arange(lo, horizon + 1)
        ok = (starts[i - 1][cand] <= lv.K) & (D[cand] >= floor)
        if not ok.any():
            break
        pick = len(ok) - 1 - np.argmax(ok[::-1]) if (stretch_last and i == depth) else np.argmax(ok)
        lv.n = int(cand[pick])
        prev_n = lv.n
        chosen = i
    status = "complete" if chosen == depth else "partial"
    sel = SequenceSelection(schedule, levels, horizon, status, chosen, notes)
    certify(sel, trajectory)
    return sel


@dataclass
class _Cache:
    """Orbit geometry the flags need: ``d(a_k y, a_{n_i} y)`` and ``D_{n_i}(x, k)``."""
    pair: Dict[int, np.ndarray]
    shifted: Dict[int, np.ndarray]


def _geometry_cache(sel: SequenceSelection, traj: CocycleTrajectory) -> _Cache:
    pair, shifted = {}, {}
    for i in range(1, sel.depth + 1):
        n = sel.level(i).n
        pair[i] = traj.pair_distances(np.arange(n + 1), n)
        shifted[i] = pair[i] if traj.family.isometric else shifted_distances(traj, n)
    return _Cache(pair, shifted)


def _certify_flags(sel: SequenceSelection, D: np.ndarray, cache: _Cache):
    """Evaluate every flag directly; returns ``{i: (flags, slack)}``."""
    A = sel.A
    out = {}
    for i in range(1, sel.depth + 1):
        lv, e = sel.level(i), sel.schedule.entry(i)
        K, n = lv.K, lv.n
        k = np.arange(K, n + 1)
        Dk = D[K: n + 1]
        slack = {}
        slack["set_e"] = float(np.min(D[n] - cache.shifted[i][K: n + 1] - (A - e.eps) * k))
        slack["band"] = float(np.min(np.minimum(Dk - (A - e.eps) * k, (A + e.eps) * k - Dk)))
        slack["drift"] = float(np.min(A * k / 2 ** i - np.abs(Dk - A * k)))
        slack["alignment"] = float(np.min(D[n] - (1 - e.target) * Dk - cache.pair[i][K: n + 1]))
        order = [lv.p is not None and lv.p <= K, K < n]
        if i < len(sel.levels) and sel.levels[i].K is not None:
            order.append(n > sel.levels[i].K)
        if i < sel.depth:
            n2 = sel.level(i + 1).n
            order += [n < n2, D[n2] >= max(D[n], A * n)]
        if i == 1:
            order.append(len(sel.levels) < 2 or sel.levels[1].K is None or n > K + sel.levels[1].K)
        flags = {name: slack[name] >= 0 for name in ("set_e", "band", "drift", "alignment")}
        flags["order"] = all(order)
        out[i] = (flags, slack)
    return out


def certify(sel: SequenceSelection, traj: CocycleTrajectory, cache: Optional[_Cache] = None) -> None:
    """Recompute all certification flags of ``sel`` from the trajectory, in place."""
    cache = cache or _geometry_cache(sel, traj)
    for i, (flags, slack) in _certify_flags(sel, traj.distances, cache).items():
        sel.level(i).flags = flags
        sel.level(i).slack = slack


def mutation_survivors(sel: SequenceSelection, traj: CocycleTrajectory, factor: float = 1.1,
                       ks: Optional[Sequence[int]] = None) -> List[int]:
    """Indices ``k`` whose scaling ``D_k -> factor D_k`` leaves every flag certified.

    By default all ``k`` in the certified window ``[K_1, n_depth]`` are
    tried.  An empty result means the audits are sensitive to every such
    perturbation.
    """
    if sel.depth == 0:
        raise PreconditionError("selection has no certified levels")
    cache = _geometry_cache(sel, traj)
    if ks is None:
        ks = range(min(sel.level(i).K for i in range(1, sel.depth + 1)), sel.level(sel.depth).n + 1)
    survivors = []
    for k in ks:
        D = traj.distances.copy()
        D[k] *= factor
        res = _certify_flags(sel, D, cache)
        if all(all(f.values()) for f, _ in res.values()):
            survivors.append(int(k))
    return survivors


# -- geodesics gamma_j and the claims ---------------------------------------------------------

def gamma_points(sel: SequenceSelection, traj: CocycleTrajectory, j: int, R):
    """``gamma_j(R)`` for an array of ``R`` in ``[0, D_{n_j}]``; returns ``(comp, X)``."""
    n = sel.level(j).n
    R = np.atleast_1d(np.asarray(R, dtype=float))
    Dn = traj.distances[n]
    if np.any(R < 0) or np.any(R > Dn * (1 + 1e-12)):
        raise DomainError(f"R outside the domain [0, {Dn}] of gamma_{j}")
    t = np.clip(R / Dn, 0.0, 1.0) if Dn > 0 else np.zeros_like(R)
    m = len(R)
    y = traj.orbit[0]
    return geo._geo(traj.space, np.full(m, traj.components[0]), np.repeat(y[None], m, 0),
                    np.full(m, traj.components[n]), np.repeat(traj.orbit[n][None], m, 0), t)


@dataclass(frozen=True)
class AuditResult:
    bound: float
    actual: float
    passed: bool
    conditional: bool = False


def _check_level(sel: SequenceSelection, j: int):
    if not 1 <= j <= sel.depth:
        raise PreconditionError(f"level {j} not selected")


def claim1_table(sel: SequenceSelection, traj: CocycleTrajectory, j: int):
    """Claim 1 over all ``k`` in ``[K_j, n_j]``: ``(ks, bounds, actuals)``.

    ``actual = d(a_k y, gamma_j(M_{j,k}))`` with ``M_{j,k} = min(D_k, D_{n_j})``
    and ``bound = D_k / 2^j``.
    """
    _check_level(sel, j)
    lv = sel.level(j)
    ks = np.arange(lv.K, lv.n + 1)
    Dk = traj.distances[ks]
    Mjk = np.minimum(Dk, traj.distances[lv.n])
    comp, G = gamma_points(sel, traj, j, Mjk)
    actual = geo._dist(traj.space, traj.components[ks], traj.orbit[ks], comp, G)
    return ks, Dk / 2 ** j, actual


def claim1_audit(sel: SequenceSelection, traj: CocycleTrajectory, j: int, k: int) -> AuditResult:
    _check_level(sel, j)
    lv = sel.level(j)
    if not lv.K <= k <= lv.n:
        raise PreconditionError(f"k={k} outside [K_{j}, n_{j}] = [{lv.K}, {lv.n}]")
    ks, bounds, actual = claim1_table(sel, traj, j)
    idx = k - lv.K
    b, a = float(bounds[idx]), float(actual[idx])
    return AuditResult(b, a, a <= b + AUDIT_TOL, conditional=not lv.certified)


# -- the limit ray -----------------------------------------------------------------------------

@dataclass
class RaySample:
    R: float
    point: Optional[Point]
    error_bound: float
    I: Optional[int]
    level: int


@dataclass
class RayApproximation:
    samples: List[RaySample]
    differences: List[dict]
    busemann: List[dict]
    unavailable: List[float]
    depth: int
    residuals: list = field(default_factory=list)

    @property
    def I(self) -> Dict[float, Optional[int]]:
        return {s.R: s.I for s in self.samples}

    def audits_pass(self) -> bool:
        return all(d["passed"] for d in self.differences) and all(b["passed"] for b in self.busemann)

    def to_record(self) -> dict:
        return {"depth": self.depth, "unavailable": list(self.unavailable),
                "samples": [{"R": s.R, "I": s.I, "level": s.level, "error_bound": s.error_bound,
                             "point": None if s.point is None else s.point.to_record()}
                            for s in self.samples],
                "differences": self.differences, "busemann": self.busemann}


def _gamma_one(sel, traj, j, R):
    comp, X = gamma_points(sel, traj, j, [R])
    return comp, X


def _d(traj, a, b):
    return float(geo._dist(traj.space, a[0], a[1], b[0], b[1])[0])


def ray_extract(sel: SequenceSelection, traj: CocycleTrajectory, R_grid: Sequence[float],
                depth: Optional[int] = None) -> RayApproximation:
    """Approximate ``gamma(R)`` by ``gamma_L(R)``, ``L`` the selection depth, with error ``R / 2^L``.

    For each ``R``, ``I(R)`` is the least ``i`` with ``D_{n_i} >= R``; the
    successive differences ``d(gamma_{i+1}(R), gamma_i(R)) <= R / 2^(i+1)``
    and the Busemann scaling step are evaluated for every ``i >= I(R)``.
    """
    L = sel.depth if depth is None else int(depth)
    if L < 2 or L > sel.depth:
        raise PreconditionError("ray extraction needs a selection of depth >= 2")
    D = traj.distances
    Dn = {i: float(D[sel.level(i).n]) for i in range(1, L + 1)}
    samples, diffs, buse, unavailable = [], [], [], []
    for R in R_grid:
        R = float(R)
        if R < 0:
            raise DomainError("R must be nonnegative")
        if R > Dn[L]:
            unavailable.append(R)
            samples.append(RaySample(R, None, math.nan, None, L))
            continue
        I = next(i for i in range(1, L + 1) if Dn[i] >= R)
        pts = {i: _gamma_one(sel, traj, i, R) for i in range(I, L + 1)}
        for i in range(I, L):
            value = _d(traj, pts[i + 1], pts[i])
            bound = R / 2 ** (i + 1)
            diffs.append({"R": R, "i": i, "value": value, "bound": bound,
                          "passed": value <= bound + AUDIT_TOL})
            if Dn[i] > 0:
                far = _d(traj, _gamma_one(sel, traj, i + 1, Dn[i]), _gamma_one(sel, traj, i, Dn[i]))
                scaled = R / Dn[i] * far
                buse.append({"R": R, "i": i, "value": value, "bound": scaled,
                             "passed": value <= scaled + AUDIT_TOL})
        comp, X = pts[L]
        point = geo._unpack(traj.space, comp[0], X[0])
        samples.append(RaySample(R, point, R / 2 ** L, I, L))
    return RayApproximation(samples, diffs, buse, unavailable, L)


def telescoped_bound(R: float, i_used: int, depth: int) -> float:
    """``sum_{j = i_used+1}^{depth} R / 2^j``, the recorded distance bound between ``gamma_depth`` and ``gamma_{i_used}``."""
    return sum(R / 2 ** j for j in range(i_used + 1, depth + 1))


def bracket(sel: SequenceSelection, k: int, depth: Optional[int] = None) -> Optional[int]:
    """The ``i >= 2`` with ``k`` in ``[n_{i-1}, n_i)``, or None."""
    L = sel.depth if depth is None else depth
    for i in range(2, L + 1):
        if sel.level(i - 1).n <= k < sel.level(i).n:
            return i
    return None


@dataclass
class ResidualEntry:
    k: int
    i: int
    Ak: float
    residual: float
    final_bound: float
    claim2: float
    claim2_bound: float
    passed: bool

    def to_record(self) -> dict:
        return dict(self.__dict__)


def residual_audit(sel: SequenceSelection, ray: RayApproximation, traj: CocycleTrajectory,
                   k_range: Optional[Sequence[int]] = None):
    """Residuals ``d(gamma(Ak), a_k y)`` against ``9 A k / 2^(i+1)`` and Claim 2's ``|M_{i,k} - Ak| <= Ak / 2^i``.

    Returns ``(entries, skipped)``; ``skipped`` lists ``k`` with no bracket
    or with ``Ak`` beyond the range of the extracted ray.
    """
    L = ray.depth
    A = sel.A
    if k_range is None:
        k_range = range(sel.level(1).n, sel.level(L).n)
    D = traj.distances
    top = float(D[sel.level(L).n])
    entries, skipped = [], []
    valid = []
    for k in k_range:
        i = bracket(sel, int(k), L)
        if i is None or A * k > top:
            skipped.append(int(k))
        else:
            valid.append((int(k), i))
    if valid:
        ks = np.array([k for k, _ in valid])
        comp, G = gamma_points(sel, traj, L, A * ks)
        res = geo._dist(traj.space, traj.components[ks], traj.orbit[ks], comp, G)
        for (k, i), r in zip(valid, res):
            Mik = min(D[k], D[sel.level(i).n])
            final = 9 * A * k / 2 ** (i + 1)
            c2 = abs(Mik - A * k)
            c2b = A * k / 2 ** i
            entries.append(ResidualEntry(k, i, A * k, float(r), final, float(c2), c2b,
                                         bool(r <= final + AUDIT_TOL and c2 <= c2b + AUDIT_TOL)))
    ray.residuals = entries
    return entries, skipped


def uniqueness_probe(ray_a: RayApproximation, ray_b: RayApproximation, traj: CocycleTrajectory):
    """Distances between two extracted rays at shared ``R`` against the sum of their error bounds."""
    by_r = {s.R: s for s in ray_b.samples if s.point is not None}
    out = []
    for s in ray_a.samples:
        t = by_r.get(s.R)
        if s.point is None or t is None:
            continue
        gap = geo.distance(traj.space, s.point, t.point)
        bound = s.error_bound + t.error_bound
        out.append({"R": s.R, "gap": gap, "bound": bound, "passed": gap <= bound + AUDIT_TOL})
    return out


# -- CSV output -------------------------------------------------------------------------------------

def write_residuals_csv(entries: Sequence[ResidualEntry], path) -> None:
    cols = ["k", "i", "Ak", "residual", "final_bound", "claim2", "claim2_bound", "passed"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for e in entries:
            w.writerow([e.k, e.i, repr(e.Ak), repr(e.residual), repr(e.final_bound),
                        repr(e.claim2), repr(e.claim2_bound), int(e.passed)])


def write_ray_csv(ray: RayApproximation, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["R", "I", "level", "error_bound", "component", "coords"])
        for s in ray.samples:
            if s.point is None:
                w.writerow([repr(s.R), "", s.level, "", "", ""])
            else:
                w.writerow([repr(s.R), s.I, s.level, repr(s.error_bound), s.point.component,
                            " ".join(repr(float(v)) for v in s.point.coords)])
