"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line with the measured quantities.
Run ``python tests/test_acceptance.py`` for the summary table on its own.
"""
import math
import sys
import time

import numpy as np
import pytest

from geoergodic import convexity as cx
from geoergodic import ergodic as erg
from geoergodic import geometry as geo
from geoergodic import ray as ry

SQ3 = math.sqrt(3)
E2 = geo.euclidean(2)
H2 = geo.hyperbolic_plane()
T2 = geo.spherical_triangle(2)
LINES = []


@pytest.fixture
def report(request):
    tr = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(name, passed, detail, elapsed, budget):
        ok = passed and elapsed < budget
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail} [{elapsed:.2f}s / {budget:g}s]"
        LINES.append(line)
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)
        else:
            print(line)
        assert passed, detail
        assert elapsed < budget, f"runtime {elapsed:.1f}s over budget {budget}s"

    return emit


# -- shared reference run ------------------------------------------------------------------

REF_FAMILY = erg.MapFamily(H2, [erg.boost(0.004), erg.boost(0.004, 1.0)])
REF_SYSTEM = erg.SymbolicSystem((0.5, 0.5), 7)
REF_HORIZON, REF_DEPTH = 5000, 3


def reference_run():
    o = geo.origin(H2)
    est = erg.drift_estimate(REF_FAMILY, REF_SYSTEM, o, [250, 500, 1000, 2000, 5000], 200)
    traj = erg.cocycle_orbit(REF_FAMILY, erg.sample_path(REF_SYSTEM, REF_HORIZON, 0), o, REF_HORIZON)
    pairs = [ry.alpha_from_condition_one(H2, o, i) for i in range(1, REF_DEPTH + 2)]
    sched = ry.epsilon_schedule(est.A, [a for a, _ in pairs], [s for _, s in pairs], traj, est.A_se)
    sel = ry.select_sequences(traj, sched, REF_HORIZON, depth=REF_DEPTH)
    return est, traj, sched, sel


@pytest.fixture(scope="module")
def reference():
    t0 = time.perf_counter()
    run = reference_run()
    return run, time.perf_counter() - t0


# -- criteria --------------------------------------------------------------------------------

def test_spherical_constants(report):
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(2, 51):
        t = geo.triangle_data(n)
        worst = max(worst, abs(t.d_bc - math.pi / 3),
                    abs(t.d_ab - math.acos(SQ3 / (2 * n))), abs(t.d_ac - math.acos(SQ3 / (2 * n))),
                    abs(t.d_a_mid - math.acos(1 / n)),
                    float(np.max(np.abs(np.array(t.mid_bc) - (0.5, SQ3 / 2, 0.0)))))
    report("spherical constants n=2..50", worst <= 1e-12, f"max deviation {worst:.2e} (tol 1e-12)",
           time.perf_counter() - t0, 1)


def test_non_uniform_witness(report):
    t0 = time.perf_counter()
    r, eps = math.pi / 2, 2 / 3
    found, ok = [], True
    for delta in (0.5, 0.25, 0.1, 0.05):
        n = cx.non_uniform_witness(delta)
        T = geo.spherical_triangle(n)
        a, b, c = (geo.Point(T, v) for v in geo.triangle_vertices(n))
        m = geo.midpoint(T, b, c)
        ok &= abs(geo.distance(T, b, c) - eps * r) <= 1e-12
        ok &= geo.distance(T, a, b) <= r and geo.distance(T, a, c) <= r
        ok &= geo.distance(T, a, m) > (1 - delta) * r
        found.append(f"delta={delta}->n={n}")
    report("non-uniform-convexity witness", ok, ", ".join(found), time.perf_counter() - t0, 1)


def test_condition_one_on_chain(report):
    t0 = time.perf_counter()
    Y = geo.triangle_chain(45)
    a = geo.chain_vertex(Y, 2, "b")
    vals, ok = [], True
    for eps in (0.5, 1.0):
        s = 2 * math.pi / eps
        assert geo.chain_locality(Y, a, 4 * s) <= Y.length
        for r in (s, 2 * s, 4 * s):
            est = cx.modulus_estimate(Y, a, r, eps, 10_000, 11)
            good = est.status == cx.OK and est.value >= eps / 2 - 0.02
            ok &= good
            vals.append(f"eps={eps},r={r:.1f}:{est.value:.3f}({est.accepted})")
    report("condition (1) on the chain", ok, "; ".join(vals), time.perf_counter() - t0, 30)


def test_euclidean_modulus_oracle(report):
    t0 = time.perf_counter()
    vals, ok = [], True
    for eps in (0.5, 1.0, 1.5):
        est = cx.modulus_estimate(E2, geo.origin(E2), 1.0, eps, 100_000, 1)
        exact = float(cx.cat0_modulus(eps))
        ok &= abs(est.value - exact) <= 0.02 and est.value >= exact - 1e-12
        vals.append(f"eps={eps}: {est.value:.5f} vs {exact:.5f}")
    report("Euclidean modulus oracle", ok, "; ".join(vals), time.perf_counter() - t0, 30)


def test_busemann_suite(report):
    t0 = time.perf_counter()
    e = cx.busemann_defect(E2, 100_000, 0)
    h = cx.busemann_defect(H2, 100_000, 0)
    t = cx.busemann_defect(T2, 100_000, 0)
    ok = e.worst_defect <= 1e-9 and h.worst_defect <= 1e-9 and t.worst_defect > 0 and t.witness
    report("Busemann suite", ok, f"E2 {e.worst_defect:.1e}, H2 {h.worst_defect:.1e}, "
           f"Delta_2 witness {t.worst_defect:.3f}", time.perf_counter() - t0, 60)


def test_convexity_implications(report):
    t0 = time.perf_counter()
    k = cx.ohta_k(1.0, geo.triangle_diameter(2), 0.05)
    pe = cx.p_uniform_check(E2, 2.0, 2.0, 100_000, 0)
    pt = cx.p_uniform_check(T2, 2.0, k, 100_000, 0)
    km = cx.km_convexity_check(T2, cx.km_function(k, 2.0), 100_000, 0)
    pc = cx.property_c_check(H2, geo.origin(H2), lambda y, r, e: cx.hyperbolic_modulus(r, e), 200_000, 0)
    ok = pe.passed and pt.passed and km.passed and pc.passed and pc.trials >= 100_000
    report("convexity implications", ok,
           f"p-uniform E2 {pe.worst_defect:.1e}, Delta_2 (k={k:.4f}) {pt.worst_defect:.1e}, "
           f"km {km.worst_defect:.1e}, property (C) {pc.worst_defect:.1e} over {pc.trials}",
           time.perf_counter() - t0, 120)


def test_drift_oracles(report):
    t0 = time.perf_counter()
    y = geo.Point(E2, (0.0, 0.0))
    boost = erg.drift_estimate(erg.MapFamily(H2, [erg.boost(0.8)]), erg.SymbolicSystem((1.0,)),
                               geo.origin(H2), [10, 100, 300], 2)
    walk = erg.MapFamily(E2, [erg.translation((1, 0)), erg.translation((-1, 0))])
    sysm = erg.SymbolicSystem((0.75, 0.25), 6)
    grid = [100, 250, 500, 1000, 2000]
    drifted = erg.drift_estimate(walk, sysm, y, grid, 200)
    steps = np.array([1, -1])
    sums = np.array([steps[erg.sample_path(sysm, 2000, p)].sum() for p in range(200)])
    integer = float(np.mean(np.abs(sums)) / 2000)
    symmetric = erg.drift_estimate(walk, erg.SymbolicSystem((0.5, 0.5), 6), y, grid, 200)
    ok = (abs(boost.A - 0.8) <= 1e-6 and abs(drifted.A - 0.5) <= 3 * drifted.A_se
          and abs(drifted.per_n[-1][1] - integer) <= 1e-12 and symmetric.status == "nearZero")
    report("drift oracles", ok, f"boost {boost.A:.9f}; walk {drifted.A:.4f} +- {drifted.A_se:.4f} "
           f"(integer walk {integer:.4f}); symmetric {symmetric.status}",
           time.perf_counter() - t0, 120)


def test_proof_machinery(report, reference):
    (est, traj, sched, sel), setup = reference
    t0 = time.perf_counter()
    ok_sched = all(e.inequality_holds(sched.A) for e in sched.entries)
    ok_sel = sel.status == "complete" and sel.depth == REF_DEPTH and sel.certified
    claim1 = min(float(np.min(b - a)) for b, a in
                 (ry.claim1_table(sel, traj, j)[1:] for j in range(1, sel.depth + 1)))
    top = traj.distances[sel.level(sel.depth).n]
    ray = ry.ray_extract(sel, traj, np.linspace(0, top, 26)[1:])
    diff = min(d["bound"] - d["value"] for d in ray.differences)
    entries, skipped = ry.residual_audit(sel, ray, traj)
    claim2 = min(e.claim2_bound - e.claim2 for e in entries)
    final = min(e.final_bound - e.residual for e in entries)
    ok = ok_sched and ok_sel and claim1 >= 0 and diff >= 0 and claim2 >= 0 and final >= 0
    ok &= ray.audits_pass() and not skipped
    levels = ", ".join(f"(K={sel.level(i).K}, n={sel.level(i).n})" for i in range(1, sel.depth + 1))
    report("proof-machinery audits", ok,
           f"A={sched.A:.6f}; {levels}; min slack claim1 {claim1:.2e}, differences {diff:.2e}, "
           f"claim2 {claim2:.2e}, final {final:.2e} over {len(entries)} k",
           setup + time.perf_counter() - t0, 300)


def test_exact_ray_recovery(report):
    t0 = time.perf_counter()
    worst, ok = 0.0, True
    for space, gen, y in ((E2, erg.translation((1, 0)), geo.Point(E2, (0.0, 0.0))),
                          (H2, erg.boost(0.8), geo.origin(H2))):
        fam = erg.MapFamily(space, [gen])
        est = erg.drift_estimate(fam, erg.SymbolicSystem((1.0,)), y, [50, 100, 200], 2)
        traj = erg.cocycle_orbit(fam, np.zeros(200, dtype=int), y, 200)
        pairs = [ry.alpha_from_condition_one(space, y, i) for i in range(1, 5)]
        sched = ry.epsilon_schedule(est.A, [a for a, _ in pairs], [s for _, s in pairs], traj)
        sel = ry.select_sequences(traj, sched, 200, depth=3)
        ray = ry.ray_extract(sel, traj, [1.0])
        entries, _ = ry.residual_audit(sel, ray, traj)
        ok &= sel.certified and bool(entries)
        worst = max([worst] + [e.residual / e.k for e in entries])
    report("exact ray recovery", ok and worst <= 1e-9, f"max residual/k {worst:.2e}",
           time.perf_counter() - t0, 10)


def test_mutation_sensitivity(report, reference):
    (est, traj, sched, sel), _ = reference
    t0 = time.perf_counter()
    lo, hi = sel.level(1).K, sel.level(sel.depth).n
    survivors = ry.mutation_survivors(sel, traj, 1.1)
    report("mutation sensitivity", not survivors,
           f"{hi - lo + 1} single-index +10% mutations on [{lo}, {hi}], {len(survivors)} survived",
           time.perf_counter() - t0, 60)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
