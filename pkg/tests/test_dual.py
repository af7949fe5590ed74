import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from syzmirror import dual
from syzmirror.aside import PsiFunction
from syzmirror.checks import collided_params, random_trop_point
from syzmirror.dual import (SurfacePoint, classify_point, corner_A, degenerate_F_reduced,
                            F_eval, F_eval_nov, f_eval, gamma_k, gamma_vec, j_embed, j_inverse,
                            order_stat, psi_levels, surface_param)
from syzmirror.novikov import NovikovNum, T
from syzmirror.params import BasePoint
from syzmirror.toric import TropToricPoint, bump, chart_to_homogeneous, g_act

CUT = 8.0
ext_reals = st.one_of(st.floats(-100, 100), st.just(math.inf), st.just(-math.inf))


# order statistics --------------------------------------------------------------------

def test_order_stat_sorting():
    assert order_stat([5, 1, 2, 4], 1) == 2


def test_order_stat_extremes():
    xs = [3.0, -1.0, math.inf, 0.5]
    assert order_stat(xs, 0) == min(xs)
    assert order_stat(xs, 3) == max(xs)


def test_order_stat_range():
    with pytest.raises(ValueError):
        order_stat([1, 2, 3], 3)


@given(st.lists(ext_reals, min_size=1, max_size=7), st.data())
def test_order_stat_reverses_under_negation(xs, data):
    k = data.draw(st.integers(0, len(xs) - 1))
    assert order_stat([-x for x in xs], k) == -order_stat(xs, len(xs) - 1 - k)


# the surface -------------------------------------------------------------------------

def test_gamma_below_all_levels(P, psi_fn):
    lv = psi_levels(0.4, P, psi_fn)
    assert gamma_vec(0.4, 0.1, P, psi_fn).coords == (0.1,) + lv + (0.4,)


def test_gamma_above_all_levels(P, psi_fn):
    lv = psi_levels(-0.4, P, psi_fn)
    assert gamma_vec(-0.4, 500.0, P, psi_fn).coords == lv + (500.0, -0.4)


def test_gamma_between_levels(P, psi_fn):
    lv = psi_levels(0.0, P, psi_fn)
    c = (lv[0] + lv[1]) / 2
    assert gamma_vec(0.0, c, P, psi_fn).coords == (lv[0], c) + lv[1:] + (0.0,)


@pytest.mark.parametrize("k", range(3))
def test_corner_is_tie(P, psi_fn, k):
    lv = psi_levels(0.0, P, psi_fn)
    assert gamma_vec(0.0, lv[k], P, psi_fn) == corner_A(k, 0.0, P, psi_fn)


@given(st.floats(-1.5, 1.5), st.floats(0.01, 80))
def test_gamma_slice_is_monotone(P, psi_fn, s, c):
    lo, hi = gamma_vec(s, c, P, psi_fn), gamma_vec(s, c + 0.5, P, psi_fn)
    assert all(b >= a for a, b in zip(lo.gammas, hi.gammas))
    assert all(b >= a for a, b in zip(lo.gammas, lo.gammas[1:]))


@given(st.floats(-1.5, 1.5), st.floats(0.01, 80))
def test_surface_param_recovers_c(P, psi_fn, s, c):
    assert surface_param(gamma_vec(s, c, P, psi_fn), P, psi_fn) == pytest.approx(c)
    assert gamma_k(s, c, 0, P, psi_fn) == min(c, psi_levels(s, P, psi_fn)[0])


def test_surface_param_off_surface(P, psi_fn):
    with pytest.raises(ValueError, match="not on surface"):
        surface_param(SurfacePoint((1.0, 2.0, 3.0, 4.0, 0.0)), P, psi_fn)


# embedding of the base ---------------------------------------------------------------

@given(st.floats(-1.5, 1.5), st.floats(0.1, 5))
def test_j_round_trip(P, psi_fn, s, r):
    back = j_inverse(j_embed(BasePoint(s, r), P, psi_fn), P, psi_fn)
    assert back.s == s
    assert back.r == pytest.approx(r, abs=1e-6)


def test_j_inverse_rejects_nonpositive_c(P, psi_fn):
    p = gamma_vec(0.2, -1.0, P, psi_fn)
    with pytest.raises(ValueError, match="outside j"):
        j_inverse(p, P, psi_fn)


# the map F ---------------------------------------------------------------------------

@st.composite
def torus_points(draw, n=2):
    vy = draw(st.floats(-2, 2).filter(lambda v: abs(v) > 1e-3))
    vx = draw(st.lists(st.floats(-3, 3), min_size=n + 1, max_size=n + 1))
    vx.append(min(0.0, vy) - sum(vx))
    return TropToricPoint(tuple(vx), vy)


@given(torus_points())
def test_F_on_torus_is_gamma(P, psi_fn, p):
    c = sum(j * v for j, v in enumerate(p.vx))
    assert F_eval(p, P, psi_fn).deviation(gamma_vec(p.vy, c, P, psi_fn)) < 1e-9


@pytest.mark.parametrize("k", range(3))
def test_F_on_cone_orbit_is_corner(P, psi_fn, k):
    vx = [0.0] * 4
    vx[k] = vx[k + 1] = math.inf
    assert F_eval(TropToricPoint(tuple(vx), 0.0), P, psi_fn) == corner_A(k, 0.0, P, psi_fn)


@pytest.mark.parametrize("k", range(4))
def test_F_on_ray_orbit_fills_segment(P, psi_fn, k):
    lv = (-math.inf,) + psi_levels(0.0, P, psi_fn) + (math.inf,)
    lo, hi = lv[k], lv[k + 1]
    free = (lo + hi) / 2 if math.isfinite(lo + hi) else (hi - 1 if math.isfinite(hi) else lo + 1)
    got = F_eval(dual.divisor_point(k, free, 2), P, psi_fn)
    assert got == gamma_vec(0.0, free, P, psi_fn)
    assert got.gammas[k] == pytest.approx(free)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 2))
def test_F_is_group_invariant(P, psi_fn, seed, centre):
    rng = np.random.default_rng(seed)
    z = T(float(rng.uniform(-1, 1)), 2.0, CUT) + T(1.5, 1.0, CUT)
    w = T(float(rng.uniform(-1, 1)), -1.0 + 1j, CUT)
    p = chart_to_homogeneous(int(rng.integers(0, 3)), z, w, 2)
    q = g_act(bump(2, centre, T(float(rng.uniform(-2, 2)), 3.0, CUT)), p)
    assert F_eval_nov(q, P, psi_fn).deviation(F_eval_nov(p, P, psi_fn)) < 1e-9


def test_f_domain(P, psi_fn):
    with pytest.raises(ValueError, match="outside the domain"):
        f_eval(TropToricPoint((1.0, -2.0, 1.0, 0.0), 0.0), P, psi_fn)


@pytest.mark.parametrize("i", [1, 2])
def test_f_maps_compact_divisor_onto_root_interval(P, psi_fn, i):
    lv = psi_levels(0.0, P, psi_fn)
    for t in (0.25, 0.5, 0.75):
        q = f_eval(dual.divisor_point(i, lv[i - 1] + t * (lv[i] - lv[i - 1]), 2), P, psi_fn)
        assert q.s == 0
        assert P.norm(i - 1) < q.r < P.norm(i)


# singular locus ----------------------------------------------------------------------

@pytest.mark.parametrize("c", [0.5, 7.0, 60.0])
def test_classify_off_zero_level_is_smooth(P, psi_fn, c):
    v = classify_point(gamma_vec(0.3, c, P, psi_fn), P, psi_fn)
    assert v.smooth and v.witness.case == 1


@pytest.mark.parametrize("k", range(3))
def test_classify_corner_is_singular(P, psi_fn, k):
    v = classify_point(corner_A(k, 0.0, P, psi_fn), P, psi_fn)
    assert not v.smooth and v.corner == k


@pytest.mark.parametrize("k", [1, 2])
def test_classify_segment_midpoint_uses_segment_chart(P, psi_fn, k):
    lv = psi_levels(0.0, P, psi_fn)
    v = classify_point(gamma_vec(0.0, (lv[k - 1] + lv[k]) / 2, P, psi_fn), P, psi_fn)
    assert v.smooth and v.witness.case == 2 and v.witness.k0 == k
    assert v.witness.verify(P, psi_fn, np.random.default_rng(k), samples=8) < 1e-7


def test_witness_verifies_torus_chart(P, psi_fn):
    v = classify_point(gamma_vec(-0.6, 5.0, P, psi_fn), P, psi_fn)
    assert v.witness.verify(P, psi_fn, np.random.default_rng(1), samples=8) < 1e-7


def test_classify_rejects_off_surface(P, psi_fn):
    with pytest.raises(ValueError):
        classify_point(SurfacePoint((1.0, 2.0, 3.0, 4.0, 0.0)), P, psi_fn)


# collided norms ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def collided():
    Pc = collided_params(2, 2.0)
    return Pc, PsiFunction(Pc)


@pytest.mark.parametrize("k", [1, 2])
def test_degenerate_divisor_point_hits_singular_point(collided, k):
    Pc, pf = collided
    v = pf(0.0, 2.0)
    got = degenerate_F_reduced(dual.divisor_point(k, 0.7, 2), 2.0, Pc, pf)
    assert got.coords == (v,) * 4 + (0.0,)


def test_degenerate_matches_general_formula(collided):
    Pc, pf = collided
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = random_trop_point(2, rng)
        assert degenerate_F_reduced(p, 2.0, Pc, pf) == F_eval(p, Pc, pf)


def test_degenerate_needs_equal_norms(P, psi_fn):
    with pytest.raises(ValueError):
        degenerate_F_reduced(TropToricPoint((0.0, 0.0, 0.0, -1.0), -1.0), 2.0, P, psi_fn)


def test_surface_csv_header():
    assert dual.surface_header(2) == ["s", "c", "gamma_0", "gamma_1", "gamma_2", "gamma_3"]
