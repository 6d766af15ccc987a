import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoergodic import ergodic as erg
from geoergodic import geometry as geo
from geoergodic.errors import DomainError, PreconditionError, ValidationError

E2 = geo.euclidean(2)
H2 = geo.hyperbolic_plane()
Y0 = geo.Point(E2, (0.0, 0.0))
O = geo.origin(H2)
REF = erg.MapFamily(H2, [erg.boost(0.004), erg.boost(0.004, 1.0)])


def integer_walk_drift(probabilities, seed, n, n_paths):
    """|S_n|/n for the +-1 walk, read off the same symbol paths."""
    system = erg.SymbolicSystem(probabilities, seed)
    steps = np.array([1, -1])
    vals = [abs(steps[erg.sample_path(system, n, p)].sum()) / n for p in range(n_paths)]
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(n_paths))


def test_symbolic_system_validation():
    with pytest.raises(ValidationError):
        erg.SymbolicSystem((0.5, 0.6))


def test_sample_path_is_reproducible_and_prefix_stable():
    s = erg.SymbolicSystem((0.3, 0.7), 11)
    a = erg.sample_path(s, 100, 4)
    assert np.array_equal(a, erg.sample_path(s, 100, 4))
    assert not np.array_equal(a, erg.sample_path(s, 100, 5))
    assert np.array_equal(erg.shift(a, 3), a[3:])


@pytest.mark.parametrize("symbols,expected", [([0, 1], (1.0, 0.0)), ([1, 0], (0.0, 1.0))])
def test_cocycle_composition_order(symbols, expected):
    fam = erg.MapFamily(E2, [erg.translation((1, 0)), erg.rotation(math.pi / 2)])
    for fast in (True, False):
        t = erg.cocycle_orbit(fam, symbols, Y0, 2, fast=fast)
        np.testing.assert_allclose(t.orbit[2], expected, atol=1e-12)


def test_isometry_validation():
    with pytest.raises(ValidationError):
        erg.MapFamily(H2, [erg.Isometry(np.diag([1.0, 2.0, 1.0]))])
    with pytest.raises(ValidationError):
        erg.MapFamily(E2, [erg.Isometry(np.diag([2.0, 1.0, 1.0]))])


def test_reorthonormalize_restores_group():
    M = np.linalg.matrix_power(erg.boost(0.8, 0.3).matrix @ erg.hyperbolic_rotation(0.2).matrix, 64)
    noisy = M * (1 + 1e-9 * np.arange(9).reshape(3, 3))
    Q = erg.reorthonormalize(noisy)
    J = erg.MINKOWSKI
    assert np.allclose(Q.T @ J @ Q / Q[0, 0] ** 2, J / Q[0, 0] ** 2, atol=1e-12)
    assert np.allclose(Q / M, 1, atol=1e-6)


def test_fast_and_reference_orbits_agree():
    s = erg.sample_path(erg.SymbolicSystem((0.5, 0.5), 3), 300)
    a = erg.cocycle_orbit(REF, s, O, 300)
    b = erg.cocycle_orbit(REF, s, O, 300, fast=False)
    np.testing.assert_allclose(a.distances, b.distances, atol=1e-12)


def test_fast_path_refuses_general_maps():
    fam = erg.MapFamily(E2, [erg.GeodesicContraction(Y0, 0.5)])
    with pytest.raises(DomainError):
        erg.cocycle_orbit(fam, [0, 0], Y0, 2, fast=True)


def test_contraction_orbit_converges_to_target():
    target = geo.hyperbolic_point(1.0, 2.0)
    fam = erg.MapFamily(H2, [erg.GeodesicContraction(target, 0.5)])
    t = erg.cocycle_orbit(fam, np.zeros(30, dtype=int), O, 30)
    assert geo.distance(H2, t.point(30), target) < 1e-6


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.data())
def test_shifted_distance_identity(seed, n, data):
    s = erg.sample_path(erg.SymbolicSystem((0.5, 0.5), seed), n)
    k = data.draw(st.integers(0, n))
    t = erg.cocycle_orbit(REF, s, O, n)
    direct = erg.shifted_distance(REF, s, k, n, O)
    shifted = erg.cocycle_orbit(REF, s[k:], O, n - k).distances[n - k]
    assert direct == pytest.approx(shifted, abs=1e-12)
    assert erg.shifted_distances(t, n)[k] == pytest.approx(direct, abs=1e-9)


def test_shifted_distance_subadditive():
    s = erg.sample_path(erg.SymbolicSystem((0.5, 0.5), 9), 200)
    t = erg.cocycle_orbit(REF, s, O, 200)
    for n in (50, 120, 200):
        for k in (10, 40):
            assert t.distances[n] <= t.distances[k] + erg.shifted_distance(REF, s, k, n, O) + 1e-12


def test_nonexpansive_defect():
    assert erg.nonexpansive_defect(REF, 2000, 0).status == "ok"
    fam = erg.MapFamily(H2, [erg.GeodesicContraction(geo.hyperbolic_point(0.5, 0.0), 0.3)])
    assert erg.nonexpansive_defect(fam, 2000, 0).status == "ok"
    doubling = erg.MapFamily(E2, [erg.CoordinateMap(lambda X: 2 * X)])
    assert erg.nonexpansive_defect(doubling, 2000, 0).status == "violation"


def test_drift_constant_translation():
    fam = erg.MapFamily(E2, [erg.translation((1, 0))])
    est = erg.drift_estimate(fam, erg.SymbolicSystem((1.0,)), Y0, [1, 10, 100], 3)
    assert est.A == pytest.approx(1.0, abs=1e-12) and est.status == "ok"


def test_drift_constant_boost():
    fam = erg.MapFamily(H2, [erg.boost(0.8)])
    est = erg.drift_estimate(fam, erg.SymbolicSystem((1.0,)), O, [10, 100, 300], 2)
    assert est.A == pytest.approx(0.8, abs=1e-6)


def test_drift_matches_integer_walk():
    fam = erg.MapFamily(E2, [erg.translation((1, 0)), erg.translation((-1, 0))])
    est = erg.drift_estimate(fam, erg.SymbolicSystem((0.75, 0.25), 2), Y0, [200, 500], 100)
    mean, _ = integer_walk_drift((0.75, 0.25), 2, 500, 100)
    assert est.per_n[-1][1] == pytest.approx(mean, abs=1e-12)


def test_drift_symmetric_walk_near_zero():
    fam = erg.MapFamily(E2, [erg.translation((1, 0)), erg.translation((-1, 0))])
    est = erg.drift_estimate(fam, erg.SymbolicSystem((0.5, 0.5), 2), Y0, [100, 250, 500, 1000], 100)
    assert est.status == "nearZero"


def test_drift_grid_validation():
    fam = erg.MapFamily(E2, [erg.translation((1, 0))])
    with pytest.raises(DomainError):
        erg.drift_estimate(fam, erg.SymbolicSystem((1.0,)), Y0, [10, 5], 2)


def test_drift_permutation_invariant():
    fam = erg.MapFamily(E2, [erg.translation((1, 0)), erg.translation((-1, 0))])
    sysm = erg.SymbolicSystem((0.75, 0.25), 4)
    a = erg.drift_estimate(fam, sysm, Y0, [50, 100], 20)
    # paths are keyed by index, so evaluating them in another order changes nothing
    steps = np.array([1, -1])
    vals = sorted(abs(steps[erg.sample_path(sysm, 100, p)].sum()) / 100 for p in reversed(range(20)))
    assert a.per_n[-1][1] == pytest.approx(np.mean(vals), abs=1e-12)


def test_set_e_constant_translation_every_n_qualifies():
    fam = erg.MapFamily(E2, [erg.translation((1, 0))])
    s = np.zeros(50, dtype=int)
    M, ns = erg.set_e_certificate(fam, s, Y0, 1.0, 0.1, 50)
    assert M == 1 and ns == list(range(1, 51))


def test_set_e_matches_brute_force():
    s = erg.sample_path(erg.SymbolicSystem((0.5, 0.5), 7), 150)
    t = erg.cocycle_orbit(REF, s, O, 150)
    A = 0.0035
    starts = erg.set_e_starts(t, A, A / 10, 150)
    for n in (20, 77, 150):
        bad = [k for k in range(1, n + 1)
               if t.distances[n] - erg.shifted_distance(REF, s, k, n, O) < (A - A / 10) * k]
        assert starts[n] == (max(bad) + 1 if bad else 1)


def test_set_e_preconditions():
    fam = erg.MapFamily(E2, [erg.translation((1, 0))])
    with pytest.raises(PreconditionError):
        erg.set_e_certificate(fam, [0] * 10, Y0, 0.0, 0.1, 10)
    with pytest.raises(PreconditionError):
        erg.set_e_certificate(fam, [0] * 10, Y0, 1.0, 1.0, 10)


def test_trajectory_csv(tmp_path):
    fam = erg.MapFamily(E2, [erg.translation((1, 0))])
    t = erg.cocycle_orbit(fam, [0] * 5, Y0, 5)
    path = tmp_path / "t.csv"
    erg.write_trajectory_csv(t, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("n,D_n") and len(lines) == 7
