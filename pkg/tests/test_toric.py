import math

import pytest
from hypothesis import given, strategies as st

from syzmirror.novikov import NovikovNum, T, pow_int
from syzmirror.toric import (FanData, NovToricPoint, TropToricPoint, bump, chart_coords,
                             chart_to_homogeneous, divisor_membership, g_act, group_element,
                             in_chart, in_Y_domain, orbit_of, same_point, val_point,
                             weighted_sum)

N = 3
CUT = 6.0
ZERO = NovikovNum.zero(math.inf)
ONE = NovikovNum.one(math.inf)

lattice = st.integers(-4, 4).map(lambda k: 0.25 * k)
small_coeffs = st.sampled_from([1.0, -2.0, 0.5 + 1j, 3.0, -1j])


@st.composite
def nov(draw):
    v = draw(lattice)
    c = draw(small_coeffs)
    tail = draw(st.lists(st.tuples(st.integers(1, 6).map(lambda k: 0.25 * k), small_coeffs),
                         max_size=2))
    return NovikovNum.from_terms([(v, c)] + [(v + e, d) for e, d in tail], cutoff=v + CUT)


@st.composite
def chart_points(draw):
    k = draw(st.integers(0, N))
    z, w = draw(nov()), draw(nov())
    if (z * w - 1).is_empty:
        w = w * 2
    return k, z, w


# fan ---------------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 4])
def test_fan_is_smooth(n):
    fan = FanData(n)
    assert fan.is_smooth()
    assert len(fan.rays) == n + 2 and len(fan.cones) == n + 1


# group -------------------------------------------------------------------------------

@pytest.mark.parametrize("k", range(1, N + 1))
def test_bump_lies_in_group(k):
    t = bump(N, k, 2 + T(0.5, cutoff=CUT))
    prod = weighted = ONE
    for j, tj in enumerate(t):
        prod = prod * tj
        weighted = weighted * pow_int(tj, j)
    assert prod.approx_equal(NovikovNum.one(CUT))
    assert weighted.approx_equal(NovikovNum.one(CUT))


def test_group_element_from_free_coordinates():
    t = group_element([T(0.5, 2, cutoff=CUT), 1 + T(1, cutoff=CUT)])
    p = chart_to_homogeneous(1, T(1, cutoff=CUT) + 3, T(-0.5, cutoff=CUT), 2)
    q = g_act(t, p)
    assert q.y == p.y


def test_group_rejects_non_element():
    p = chart_to_homogeneous(0, 2 + T(1, cutoff=CUT), T(0.5, cutoff=CUT), N)
    with pytest.raises(ValueError):
        g_act((T(1),) + (ONE,) * (N + 1), p)


def test_identity_acts_trivially():
    p = chart_to_homogeneous(1, 2 + T(1, cutoff=CUT), T(0.5, cutoff=CUT), N)
    assert g_act((ONE,) * (N + 2), p).x == p.x


@given(chart_points(), st.integers(1, N), nov())
def test_group_action_preserves_charts_and_invariants(pt, centre, t):
    k, z, w = pt
    p = chart_to_homogeneous(k, z, w, N)
    q = g_act(bump(N, centre, t), p)
    assert same_point(p, q)
    if in_chart(q, k):
        z2, w2 = chart_coords(q, k)
        assert z2.approx_equal(z, 1e-8) and w2.approx_equal(w, 1e-8)
    vp, vq = val_point(p), val_point(q)
    assert weighted_sum(range(N + 2), vq.vx) == pytest.approx(weighted_sum(range(N + 2), vp.vx))
    assert sum(vq.vx) == pytest.approx(sum(vp.vx))


# charts ------------------------------------------------------------------------------

@given(chart_points())
def test_chart_round_trip(pt):
    k, z, w = pt
    p = chart_to_homogeneous(k, z, w, N)
    z2, w2 = chart_coords(p, k)
    assert z2.approx_equal(z) and w2.approx_equal(w)
    assert (z2 * w2).approx_equal(p.y + 1)


@given(chart_points())
def test_chart_gluing(pt):
    k, z, w = pt
    k = min(k, N - 1)
    p = chart_to_homogeneous(k, z, w, N)
    zk, wk = chart_coords(p, k)
    zk1, wk1 = chart_coords(p, k + 1)
    assert (wk1 * zk).approx_equal(NovikovNum.one(CUT), 1e-8)
    assert (zk1 * wk1).approx_equal(zk * wk, 1e-8)


@given(chart_points())
def test_valuations_of_chart_coordinates(pt):
    k, z, w = pt
    p = chart_to_homogeneous(k, z, w, N)
    vx = val_point(p).vx
    for m in range(N + 1):
        zm, wm = chart_coords(p, m)
        assert zm.val == pytest.approx(weighted_sum([m + 1 - j for j in range(N + 2)], vx))
        assert wm.val == pytest.approx(weighted_sum([j - m for j in range(N + 2)], vx))


def test_outside_chart():
    p = NovToricPoint((ONE, ZERO, ONE * 1, ONE, ONE), NovikovNum.const(-1, math.inf))
    with pytest.raises(ValueError, match="outside chart"):
        chart_coords(p, 2)


def test_product_identity_is_checked():
    with pytest.raises(ValueError):
        NovToricPoint((ONE, ONE, ONE), T(1))


# divisors and orbits -----------------------------------------------------------------

def test_adjacent_zeros_give_cone_orbit():
    p = NovToricPoint((ONE, ZERO, ZERO, ONE, ONE), NovikovNum.const(-1, math.inf))
    assert divisor_membership(p) == {1, 2}
    assert orbit_of(p) == ("cone", 1)


def test_non_adjacent_zeros_are_rejected():
    with pytest.raises(ValueError, match="irrelevant"):
        NovToricPoint((ZERO, ONE, ZERO, ONE, ONE), NovikovNum.const(-1, math.inf))


def test_dense_torus_tag():
    p = chart_to_homogeneous(0, 2 + T(1, cutoff=CUT), T(0.5, cutoff=CUT), N)
    assert orbit_of(p) == ("torus",)


def test_single_zero_gives_ray_orbit():
    p = NovToricPoint((ONE, ONE, ZERO, ONE, ONE), NovikovNum.const(-1, math.inf))
    assert orbit_of(p) == ("ray", 2)


# tropical domain ---------------------------------------------------------------------

def test_domain_positive_last_slot():
    assert in_Y_domain(TropToricPoint((0, 0, 0, 0, 0.1), -0.0 + 1.0, check=False))


def test_domain_boundary_excluded():
    p = TropToricPoint((1.0, -2.0, 1.0, 0.0, 0.0), 0.0)
    assert weighted_sum(range(5), p.vx) == 0
    assert not in_Y_domain(p)


@pytest.mark.parametrize("k", range(1, N + 1))
def test_compact_divisor_points_lie_in_domain(k):
    vx = [0.0] * (N + 2)
    vx[k] = math.inf
    assert in_Y_domain(TropToricPoint(tuple(vx), 0.0))


def test_weighted_sum_refuses_opposite_infinities():
    with pytest.raises(ValueError):
        weighted_sum([1, -1], [math.inf, math.inf])


def test_tropical_consistency_is_checked():
    with pytest.raises(ValueError):
        TropToricPoint((0.5, 0.5, 0.5), -1.0)
    TropToricPoint((-0.5, -0.25, -0.25), -1.0)


def test_tropical_json_uses_inf_sentinel():
    p = TropToricPoint((0.0, math.inf, math.inf, 1.0, 0.0), 0.0)
    obj = p.to_json()
    assert obj["vx"][1] == "inf"
    assert TropToricPoint.from_json(obj) == p


def test_novikov_point_json_round_trip():
    p = chart_to_homogeneous(2, 2 + T(1, cutoff=CUT), T(0.5, cutoff=CUT), N)
    q = NovToricPoint.from_json(p.to_json())
    assert same_point(p, q)
