import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from syzmirror import walls
from syzmirror.params import BasePoint
from syzmirror.walls import (ANTICANONICAL, DiskClass, Du, Dv, Nminus, Nplus, R, beta, delta,
                             energy, expand_beta, intersect, monodromy_matrix,
                             monodromy_transport, solve_class_from_intersections, sphere)

N = 3


def classes(anchor):
    ints = st.integers(-5, 5)
    return st.builds(lambda b, d, S: DiskClass(anchor, b, d, tuple(S)),
                     ints, ints, st.lists(ints, min_size=N, max_size=N))


def all_subsets(l):
    return [I for size in range(l + 1) for I in itertools.combinations(range(l), size)]


# expansion ---------------------------------------------------------------------------

def test_expand_empty_subset_is_beta():
    assert expand_beta(2, (), N) == beta(2, N)


def test_expand_full_subset_of_two():
    want = beta(2, N) + 2 * delta(2, N) - sphere(1, 2, N) - 2 * sphere(2, 2, N)
    assert expand_beta(2, (0, 1), N) == want


def test_expand_one():
    assert expand_beta(1, (0,), N) == beta(1, N) + delta(1, N) - sphere(1, 1, N)


def test_expand_rejects_bad_subset():
    with pytest.raises(ValueError):
        expand_beta(1, (1,), N)


# intersections -----------------------------------------------------------------------

def test_sphere_meets_adjacent_u_divisors():
    S1 = sphere(1, 1, N)
    assert intersect(S1, Du(1), R(1)) == 1
    assert intersect(S1, Du(0), R(1)) == -1
    assert intersect(S1, Du(2), R(1)) == 0


@pytest.mark.parametrize("l", range(N + 2))
def test_every_beta_class_meets_anticanonical_once(l):
    for I in all_subsets(l):
        assert intersect(expand_beta(l, I, N), ANTICANONICAL, R(l)) == 1


@pytest.mark.parametrize("l", range(N + 1))
def test_orbit_class_meets_v_divisor_negatively(l):
    assert intersect(delta(l, N), Dv(l), Nminus(l)) == -1


def test_obstructed_pairings_raise():
    with pytest.raises(ValueError, match="wall-obstructed"):
        intersect(beta(1, N), Du(1), Nminus(1))
    with pytest.raises(ValueError, match="wall-obstructed"):
        intersect(beta(1, N), Dv(1), Nplus(1))


def test_region_must_belong_to_anchor():
    with pytest.raises(ValueError):
        intersect(beta(0, N), Du(0), R(2))


@given(classes(1), classes(1), st.integers(-3, 3))
def test_intersection_is_bilinear(a, b, m):
    for D in walls.defined_divisors(R(1), N):
        assert intersect(a + m * b, D, R(1)) == intersect(a, D, R(1)) + m * intersect(b, D, R(1))


# solver ------------------------------------------------------------------------------

def _targets(c, region):
    t = {ANTICANONICAL: intersect(c, ANTICANONICAL, region)}
    t.update(walls.pairing_targets(c, "u", region))
    t.update(walls.pairing_targets(c, "v", region))
    return t


@pytest.mark.parametrize("l", range(5))
def test_solver_round_trip_all_subsets(l):
    n = 3
    for I in all_subsets(l):
        c = expand_beta(l, I, n)
        got = solve_class_from_intersections(_targets(c, R(l)), R(l), len(I), n)
        assert got == c


def test_solver_from_u_row_alone():
    c = expand_beta(2, (0,), N)
    got = solve_class_from_intersections(walls.pairing_targets(c, "u", R(2)), R(2), 1, N)
    assert got == c
    assert got == beta(2, N) + delta(2, N) - sphere(1, 2, N) - sphere(2, 2, N)


def test_solver_from_v_row_alone():
    c = expand_beta(3, (0, 2), N)
    assert solve_class_from_intersections(walls.pairing_targets(c, "v", R(3)), R(3), 2, N) == c


def test_solver_zero_targets_give_zero_class():
    targets = {Du(k): 0 for k in range(N + 1)}
    got = solve_class_from_intersections(targets, R(1), 0, N, beta_coeff=0)
    assert got == DiskClass(1, 0, 0, (0,) * N)


def test_solver_rejects_inconsistent_targets():
    targets = {Du(k): 1 for k in range(N + 1)}
    with pytest.raises(ValueError, match="no integral solution"):
        solve_class_from_intersections(targets, R(1), 0, N)


# transport ---------------------------------------------------------------------------

@pytest.mark.parametrize("l", range(N + 1))
def test_beta_across_upper_half_is_next_beta(l):
    assert monodromy_transport(beta(l, N), l, "+") == beta(l + 1, N)


@pytest.mark.parametrize("l", range(N + 1))
def test_beta_across_lower_half_picks_up_orbit(l):
    assert monodromy_transport(beta(l, N), l, "-") == expand_beta(l + 1, (l,), N)


@given(classes(2), st.sampled_from("+-"))
def test_transport_round_trip(c, sign):
    there = monodromy_transport(c, 2, sign)
    assert there.anchor == 3
    assert monodromy_transport(there, 2, sign) == c


@given(classes(1), st.sampled_from([("+", Nplus(1)), ("-", Nminus(1))]))
def test_transport_preserves_pairings_and_orbit_multiple(c, sr):
    sign, region = sr
    c2 = monodromy_transport(c, 1, sign)
    for D in walls.defined_divisors(region, N):
        assert intersect(c, D, region) == intersect(c2, D, region)
    assert c2.delta == c.delta + (c.beta if sign == "-" else 0)


def test_transport_anchor_mismatch():
    with pytest.raises(ValueError, match="anchor mismatch"):
        monodromy_transport(beta(0, N), 2, "+")


@pytest.mark.parametrize("l", range(N + 1))
def test_focus_focus_monodromy(l):
    M = monodromy_matrix(l, N)
    assert np.array_equal(M @ beta(l, N).vector(), (beta(l, N) - delta(l, N)).vector())
    # the orbit class and the spheres are fixed
    assert np.array_equal(M[:, 1:], np.eye(N + 2, dtype=np.int64)[:, 1:])
    # stable under re-derivation
    assert np.array_equal(M, monodromy_matrix(l, N))


# energy ------------------------------------------------------------------------------

@pytest.mark.parametrize("s", [-0.7, 0.4])
def test_energy_identities(P, psi_fn, s):
    n = P.n
    q = BasePoint(s, 1.5)
    assert energy(delta(1, n), q, P, psi_fn) == pytest.approx(s)
    for I in all_subsets(1):
        got = energy(expand_beta(1, I, n), q, P, psi_fn) - energy(beta(1, n), q, P, psi_fn)
        assert got == pytest.approx(len(I) * s)


@pytest.mark.parametrize("s", [-0.7, 0.4])
@pytest.mark.parametrize("k", range(3))
def test_energy_jump_across_wall(P, psi_fn, s, k):
    q = BasePoint(s, P.levels[k] + 0.1)
    diff = energy(beta(k, P.n), q, P, psi_fn) - energy(beta(k + 1, P.n), q, P, psi_fn)
    assert diff == pytest.approx(min(0.0, s))


@given(st.floats(-2, 2), st.integers(0, 3), st.floats(0.05, 0.95))
def test_energy_of_full_subset_is_positive(P, psi_fn, s, k, frac):
    lo = P.levels[k - 1] if k else 0.0
    hi = P.levels[k] if k < len(P.levels) else lo + 2
    q = BasePoint(s, lo + frac * (hi - lo))
    assert energy(expand_beta(k, range(k), P.n), q, P, psi_fn) > 0


def test_energy_outside_chart(P, psi_fn):
    with pytest.raises(ValueError):
        energy(beta(0, P.n), BasePoint(0.0, 2.5), P, psi_fn)


def test_class_json_round_trip():
    c = expand_beta(3, (0, 2), N)
    assert DiskClass.from_json(c.to_json()) == c
    assert c.to_json() == {"anchor": 3, "beta": 1, "delta": 2, "S": [-1, -1, -2]}
