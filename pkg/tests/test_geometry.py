import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoergodic import geometry as geo
from geoergodic.errors import CapabilityError, DomainError, ValidationError

SQ3 = math.sqrt(3)
E2 = geo.euclidean(2)
H2 = geo.hyperbolic_plane()


# -- independent oracles --------------------------------------------------------

def hyp_oracle(p, q):
    # arccosh of minus the Minkowski product; near zero it loses ~sqrt(ulp * |p|^2)
    b = -(-p[0] * q[0] + p[1] * q[1] + p[2] * q[2])
    return math.acosh(max(b, 1.0))


def sphere_oracle(u, v):
    return math.acos(max(-1.0, min(1.0, float(np.dot(u, v)))))


def triangle_point(n, w):
    w = np.asarray(w, dtype=float) + 1e-9
    x = w @ geo.triangle_vertices(n)
    return geo.Point(geo.spherical_triangle(n), x / np.linalg.norm(x))


coord = st.floats(-3, 3, allow_nan=False)
hyp_pts = st.tuples(coord, coord).map(lambda c: geo.hyperbolic_point(*c))
euc_pts = st.tuples(coord, coord).map(lambda c: geo.Point(E2, c))
weights = st.tuples(*[st.floats(0, 1) for _ in range(3)])


# -- examples ---------------------------------------------------------------------

def test_euclidean_distance():
    assert geo.distance(E2, geo.Point(E2, (0, 0)), geo.Point(E2, (3, 4))) == pytest.approx(5, abs=1e-12)


def test_hyperbolic_distance_and_ray():
    p = geo.hyperbolic_point(math.sinh(1.0), 0.0)
    o = geo.origin(H2)
    assert geo.distance(H2, o, p) == pytest.approx(1.0, abs=1e-12)
    r = geo.ray_point(H2, o, p, 2.0)
    np.testing.assert_allclose(r.coords, (math.cosh(2), math.sinh(2), 0), atol=1e-12)


def test_ray_point_agrees_with_geodesic():
    o, q = geo.hyperbolic_point(0.3, -0.2), geo.hyperbolic_point(1.1, 0.7)
    d = geo.distance(H2, o, q)
    r = geo.ray_point(H2, o, q, 0.4 * d)
    g = geo.geodesic_point(H2, o, q, 0.4)
    assert geo.distance(H2, r, g) < 1e-9


def test_ray_point_unsupported_on_compact_spaces():
    T = geo.spherical_triangle(2)
    a, b, _ = geo.triangle_vertices(2)
    with pytest.raises(CapabilityError):
        geo.ray_point(T, geo.Point(T, a), geo.Point(T, b), 1.0)


def test_geodesic_parameter_domain():
    p, q = geo.Point(E2, (0, 0)), geo.Point(E2, (1, 0))
    with pytest.raises(DomainError):
        geo.geodesic_point(E2, p, q, 1.5)


def test_invalid_points_rejected():
    with pytest.raises(ValidationError):
        geo.Point(H2, (1.0, 1.0, 0.0))
    with pytest.raises(ValidationError):
        geo.Point(geo.spherical_triangle(2), (0.0, 0.0, -1.0))


def test_triangle_b_c_midpoint():
    T = geo.spherical_triangle(2)
    b, c = geo.Point(T, geo.B_VERTEX), geo.Point(T, geo.C_VERTEX)
    assert geo.distance(T, b, c) == pytest.approx(math.pi / 3, abs=1e-12)
    np.testing.assert_allclose(geo.midpoint(T, b, c).coords, (0.5, SQ3 / 2, 0), atol=1e-12)


@pytest.mark.parametrize("n", range(2, 51))
def test_triangle_data_closed_forms(n):
    t = geo.triangle_data(n)
    assert t.d_bc == pytest.approx(math.pi / 3, abs=1e-12)
    assert t.d_ab == pytest.approx(math.acos(SQ3 / (2 * n)), abs=1e-12)
    assert t.d_ac == pytest.approx(math.acos(SQ3 / (2 * n)), abs=1e-12)
    assert t.d_a_mid == pytest.approx(math.acos(1 / n), abs=1e-12)
    assert max(t.residuals().values()) <= 1e-12


def test_triangle_diameter_is_a_to_bc_side():
    assert geo.triangle_diameter(2) == pytest.approx(math.acos(SQ3 / 4), abs=1e-9)


def test_chain_distance_through_gluing_point():
    Y = geo.triangle_chain(10)
    c2, c3 = geo.chain_vertex(Y, 2, "c"), geo.chain_vertex(Y, 3, "c")
    oracle = math.pi / 3 + math.acos(SQ3 / 6)
    assert geo.chain_distance(Y, c2, c3) == pytest.approx(oracle, abs=1e-12)
    assert geo.chain_distance(Y, c2, c3) == pytest.approx(2.3251511, abs=1e-7)
    c4 = geo.chain_vertex(Y, 4, "c")
    oracle4 = math.pi / 3 + geo.bridge_length(3) + math.acos(SQ3 / 8)
    assert geo.chain_distance(Y, c2, c4) == pytest.approx(oracle4, abs=1e-12)


def test_chain_gluing_identifies_b_with_next_a():
    Y = geo.triangle_chain(5)
    assert geo.chain_distance(Y, geo.chain_vertex(Y, 2, "b"), geo.chain_vertex(Y, 3, "a")) == 0


def test_chain_midpoint_crosses_into_next_triangle():
    Y = geo.triangle_chain(5)
    c2, c3 = geo.chain_vertex(Y, 2, "c"), geo.chain_vertex(Y, 3, "c")
    m = geo.midpoint(Y, c2, c3)
    assert m.component == 2
    half = geo.chain_distance(Y, c2, c3) / 2
    assert geo.chain_distance(Y, m, geo.chain_vertex(Y, 3, "a")) == pytest.approx(half - math.pi / 3, abs=1e-9)
    assert geo.chain_distance(Y, c2, m) == pytest.approx(half, abs=1e-9)


def test_chain_locality():
    Y = geo.triangle_chain(20)
    a = geo.chain_vertex(Y, 2, "c")
    assert geo.chain_locality(Y, a, 2.0) == 1 + math.ceil(2.0 / math.acos(SQ3 / 6))
    with pytest.raises(DomainError):
        geo.chain_locality(Y, a, -1.0)


def test_glued_pair_distance():
    L, R = geo.euclidean(2), geo.hyperbolic_plane()
    G = geo.glued_pair(L, R, geo.Point(L, (1.0, 0.0)), geo.origin(R))
    x = geo.Point(G, (4.0, 4.0), component=0)
    y = geo.Point(G, geo.hyperbolic_point(math.sinh(2.0), 0).coords, component=1)
    assert geo.distance(G, x, y) == pytest.approx(5.0 + 2.0, abs=1e-12)
    m = geo.midpoint(G, x, y)
    assert m.component == 0
    assert geo.distance(G, x, m) == pytest.approx(3.5, abs=1e-9)


def test_glued_pair_rejects_nested_children():
    L = geo.euclidean(2)
    with pytest.raises(ValidationError):
        geo.glued_pair(L, geo.triangle_chain(3), geo.Point(L, (0, 0)), geo.origin(geo.triangle_chain(3)))


# -- properties ---------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(hyp_pts, hyp_pts)
def test_hyperbolic_distance_matches_oracle(p, q):
    assert geo.distance(H2, p, q) == pytest.approx(hyp_oracle(p.coords, q.coords), rel=1e-9, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 30), weights, weights)
def test_triangle_distance_matches_oracle(n, w1, w2):
    p, q = triangle_point(n, w1), triangle_point(n, w2)
    assert geo.distance(p.space, p, q) == pytest.approx(sphere_oracle(p.array, q.array), abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["e", "h"]), st.data())
def test_metric_axioms(kind, data):
    pts = euc_pts if kind == "e" else hyp_pts
    space = E2 if kind == "e" else H2
    p, q, r = data.draw(pts), data.draw(pts), data.draw(pts)
    d = lambda a, b: geo.distance(space, a, b)  # noqa: E731
    assert d(p, p) <= 1e-12
    assert d(p, q) == pytest.approx(d(q, p), abs=1e-12)
    assert d(p, r) <= d(p, q) + d(q, r) + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["e", "h", "t"]), st.floats(0, 1), st.data())
def test_geodesic_point_splits_distance(kind, t, data):
    if kind == "t":
        n = data.draw(st.integers(2, 20))
        p, q = triangle_point(n, data.draw(weights)), triangle_point(n, data.draw(weights))
    else:
        pts = euc_pts if kind == "e" else hyp_pts
        p, q = data.draw(pts), data.draw(pts)
    space = p.space
    d = geo.distance(space, p, q)
    z = geo.geodesic_point(space, p, q, t)
    assert geo.distance(space, p, z) == pytest.approx(t * d, abs=1e-9)
    assert geo.distance(space, z, q) == pytest.approx((1 - t) * d, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(2, 8), st.floats(0, 1), st.data())
def test_chain_geodesic_splits_distance(m, n, t, data):
    Y = geo.triangle_chain(10)
    p = geo.chain_point(Y, m, triangle_point(m, data.draw(weights)).coords)
    q = geo.chain_point(Y, n, triangle_point(n, data.draw(weights)).coords)
    d = geo.distance(Y, p, q)
    z = geo.geodesic_point(Y, p, q, t)
    assert geo.distance(Y, p, z) == pytest.approx(t * d, abs=1e-9)
    assert geo.distance(Y, z, q) == pytest.approx((1 - t) * d, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(hyp_pts, hyp_pts)
def test_segment_endpoints(p, q):
    seg = geo.segment(p, q)
    assert seg.p == p and seg.q == q
    assert geo.distance(H2, geo.geodesic_point(H2, p, q, 0.0), p) < 1e-9
    assert geo.distance(H2, geo.geodesic_point(H2, p, q, 1.0), q) < 1e-9
