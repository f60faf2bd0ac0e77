import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicount import errors
from padicount.counting import ApproxProfile, c2, count_brute
from padicount.lattice import (
    ApproxLattice,
    build_lattice,
    check_lambda1_bounds,
    det_bounds_hold,
    enumerate_points,
    int_det,
    int_rank,
    successive_minima,
    unit_ball_volume,
    verify_geometry,
)
from padicount.padic import from_integer, from_rational, random_padic_vector

ZERO_LATTICE = ApproxLattice(2, (3,), (0,))


def scan_points(lat, R2):
    """Oracle: every integer vector in the box, filtered by congruence and norm."""
    R = math.isqrt(int(R2))
    out = []
    for v in itertools.product(range(-R, R + 1), repeat=lat.n + 1):
        if sum(c * c for c in v) <= R2 and lat.contains(v):
            out.append(v)
    return sorted(out, key=lambda v: (sum(c * c for c in v), v))


def lattice_st():
    return st.builds(
        lambda p, ts, seed: ApproxLattice(
            p, tuple(ts), tuple(int(r) % p**t for r, t in zip(np.random.default_rng(seed).integers(0, 2**40, len(ts)), ts))
        ),
        st.sampled_from([2, 3]),
        st.lists(st.integers(1, 5), min_size=1, max_size=2),
        st.integers(0, 2**32),
    )


def test_build_lattice_examples():
    x = random_padic_vector(3, 20, 1, 0)
    prof = ApproxProfile.table([{10: Fraction(1, 27)}])
    lat = build_lattice(x, prof, 10)
    assert lat.t == (3,) and lat.det == 27
    assert all(det_bounds_hold(lat, prof, 10))
    zero = build_lattice((from_integer(0, 2, 10),), ApproxProfile.table([{5: Fraction(1, 8)}]), 5)
    assert zero.basis == [[1, 0], [0, 8]]
    with pytest.raises(errors.ThresholdNonpositive):
        build_lattice(x, ApproxProfile.table([{10: Fraction(3, 2)}]), 10)
    with pytest.raises(errors.InsufficientPrecision):
        build_lattice(x, ApproxProfile.power((Fraction(20),)), 10)


def test_serialisation():
    lat = ApproxLattice(3, (2, 4), (5, 70))
    assert lat.to_dict() == {"p": 3, "t": [2, 4], "X": [5, 70]}
    assert ApproxLattice.from_dict(lat.to_dict()) == lat


def test_enumerate_zero_lattice():
    pts = enumerate_points(ZERO_LATTICE, 8)
    assert len(pts) == 19
    assert pts == scan_points(ZERO_LATTICE, 64)
    assert enumerate_points(ZERO_LATTICE, Fraction(1, 2)) == [(0, 0)]


def test_minima_zero_lattice():
    m = successive_minima(ZERO_LATTICE)
    assert m.lambdas_sq == (1, 64)
    assert m.witnesses == ((-1, 0), (0, -8))


def test_geometry_zero_lattice():
    rep = verify_geometry(ZERO_LATTICE, 8)
    assert rep.count == 19 and rep.ok
    assert rep.bounds["henk"] == 102
    assert rep.bounds["blichfeldt"] == pytest.approx(2 * math.pi * 64 / 8 + 2)
    small = verify_geometry(ZERO_LATTICE, Fraction(1, 2))
    assert small.count == 1 and small.ok and not small.blichfeldt_applicable


def test_unit_ball_volumes():
    for k in range(1, 8):
        rational, j = unit_ball_volume(k)
        assert float(rational) * math.pi**j == pytest.approx(math.pi ** (k / 2) / math.gamma(k / 2 + 1))


def test_int_det_and_rank():
    rng = np.random.default_rng(3)
    for _ in range(30):
        a = rng.integers(-9, 10, size=(4, 4))
        assert int_det(a.tolist()) == round(np.linalg.det(a))
        assert int_rank(a.tolist()) == np.linalg.matrix_rank(a)
    assert int_rank([[1, 2, 3], [2, 4, 6]]) == 1


@given(lattice_st(), st.integers(0, 150))
def test_enumeration_matches_scan(lat, R2):
    if lat.n == 2:
        R2 = min(R2, 40)
    assert enumerate_points(lat, radius_sq=R2) == scan_points(lat, R2)


@given(lattice_st(), st.lists(st.integers(-200, 200), min_size=3, max_size=3), st.integers(0, 2))
def test_membership_tests_agree(lat, v, bump):
    v = v[: lat.n + 1]
    # include near misses: a genuine member shifted by one in a single coordinate
    member = [v[0]] + [v[0] * X + k * m for X, k, m in zip(lat.X, v[1:], lat.moduli)]
    member[min(bump, lat.n)] += bump % 2
    for w in (v, member):
        assert lat.contains(w) == lat.contains_via_basis(w)
    assert lat.contains((1, *lat.X))


@settings(max_examples=25)
@given(lattice_st())
def test_minima_properties(lat):
    m = successive_minima(lat)
    assert list(m.lambdas_sq) == sorted(m.lambdas_sq)
    assert m.lambdas_sq[0] >= 1
    assert int_rank(list(m.witnesses)) == lat.n + 1
    for w, s in zip(m.witnesses, m.lambdas_sq):
        assert lat.contains(w) and sum(c * c for c in w) == s
    # oracle: lambda_i^2 is the least r^2 at which the scanned points reach rank i
    pts = [v for v in scan_points(lat, m.lambdas_sq[-1]) if any(v)]
    for i, s in enumerate(m.lambdas_sq, start=1):
        assert int_rank([v for v in pts if sum(c * c for c in v) <= s]) >= i
        assert int_rank([v for v in pts if sum(c * c for c in v) < s]) < i


@given(lattice_st(), st.integers(0, 400))
def test_geometry_always_holds(lat, R2):
    if lat.n == 2:
        R2 = min(R2, 100)
    assert verify_geometry(lat, radius_sq=R2).ok


@given(st.sampled_from([2, 3]), st.integers(4, 9), st.integers(0, 2**32))
def test_counting_set_inside_lattice(p, e, seed):
    N = p**e if p**e <= 200 else 2**e
    x = random_padic_vector(p, 60, 1, seed)
    prof = ApproxProfile.power((Fraction(3, 2),))
    lat = build_lattice(x, prof, N)
    for q in count_brute(x, prof, N).solutions:
        assert lat.contains(q) and 0 < q[0] <= N and max(map(abs, q[1:])) <= N


@given(st.integers(0, 2**32))
def test_minima_permutation_invariant(seed):
    x = random_padic_vector(2, 60, 2, seed)
    prof = ApproxProfile.power((Fraction(6, 5), Fraction(7, 5)))
    a = build_lattice(x, prof, 64)
    b = ApproxLattice(a.p, a.t[::-1], a.X[::-1])
    assert successive_minima(a).lambdas_sq == successive_minima(b).lambdas_sq


def test_lambda1_upper_example_and_control():
    prof = ApproxProfile.power((Fraction(3, 2),))
    assert c2(1, 2) == pytest.approx(1.5958, abs=1e-4)
    for seed in range(30):
        lat = build_lattice(random_padic_vector(2, 60, 1, seed), prof, 2**10)
        assert check_lambda1_bounds(lat, prof, 2**10).upper_ok
    third = build_lattice((from_rational(1, 3, 2, 60),), prof, 2**12)
    rep = check_lambda1_bounds(third, prof, 2**12)
    assert rep.lambda1 == pytest.approx(math.sqrt(10)) and not rep.lower_ok and rep.upper_ok


def test_enumeration_budget():
    with pytest.raises(errors.InfeasibleSize):
        enumerate_points(ZERO_LATTICE, 10**4, budget=1000)
