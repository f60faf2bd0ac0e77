import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicount import errors
from padicount.dimension import WeightSplit
from padicount.padic import Power, from_integer, random_padic_vector, truncate
from padicount.ubiquity import (
    Ball,
    BallUnion,
    ResonantFamily,
    delta_union,
    density_constant,
    measure,
    resonant_denominators,
    ubiquity_density_check,
)

SPLIT = WeightSplit(("5/2",), ("7/5",))


def oracle_members(A, p, prec, tau, lo, hi):
    """Exhaustive (q0, q) scan: q0^a < p^(b*v) with v the valuation of q0*A - q."""
    a, b = tau.numerator, tau.denominator
    out = []
    for q0 in range(lo + 1, hi + 1):
        for q in range(-q0, q0 + 1):
            if math.gcd(q, q0) != 1:
                continue
            y, v = (q0 * A - q) % p**prec, 0
            while y and y % p == 0 and v < prec:
                y //= p
                v += 1
            if y == 0:
                v = prec
            if q0**a < p ** (b * v):
                out.append(q0)
                break
    return out


def test_measure_examples():
    assert measure(BallUnion(2, (3,), np.array([[5]]))) == Fraction(1, 8)
    assert measure(BallUnion(2, (2,), np.arange(4).reshape(-1, 1))) == 1
    assert measure(BallUnion(2, (4,), np.array([[1], [3], [5], [7], [17]]))) == Fraction(4, 16)
    assert measure(BallUnion(2, (4,), np.array([[1], [3], [5], [7], [9]]))) == Fraction(5, 16)
    assert Ball.whole(3, 2).measure == 1


def test_union_roundtrip():
    U = BallUnion(3, (2, 1), np.array([[4, 2], [13, 5], [0, 0]]))
    assert len(U) == 2
    V = BallUnion.from_dict(U.to_dict())
    assert np.array_equal(U.centers, V.centers) and V.t == U.t


@pytest.mark.parametrize("A,tau", [(5, Fraction(3, 2)), (5, Fraction(11, 10)), (12345, Fraction(7, 5))])
def test_resonant_matches_scan_integer(A, tau):
    fam = resonant_denominators((from_integer(A, 2, 60),), (tau,), (0, 500))
    assert fam.members == oracle_members(A, 2, 60, tau, 0, 500)


@settings(max_examples=15)
@given(st.integers(0, 2**32), st.sampled_from([2, 3, 5]), st.sampled_from([Fraction(6, 5), Fraction(3, 2), Fraction(2)]),
       st.integers(0, 300))
def test_resonant_matches_scan_random(seed, p, tau, lo):
    (alpha,) = random_padic_vector(p, 80, 1, seed)
    fam = resonant_denominators((alpha,), (tau,), (lo, lo + 200))
    assert fam.members == oracle_members(truncate(alpha, 80), p, 80, tau, lo, lo + 200)
    assert all(c == (q0 % p != 0) for q0, c in zip(fam.members, fam.coprime_to_p))


def test_resonant_near_one_is_dense():
    fam = resonant_denominators(random_padic_vector(2, 40, 1, 1), (Fraction(101, 100),), (100, 200))
    assert len(fam.members) > 40


def test_window_zero_one():
    for r in range(8):
        fam = resonant_denominators((from_integer(r, 2, 10),), (Fraction(3, 2),), (0, 1))
        # q0 = 1 needs |alpha - q|_2 < 1 for some q in {-1, 0, 1}: always true in Z_2
        assert fam.members == [1]
    fam3 = resonant_denominators((from_integer(2, 5, 10),), (Fraction(3, 2),), (0, 1))
    assert fam3.members == []
    fam3 = resonant_denominators((from_integer(4, 5, 10),), (Fraction(3, 2),), (0, 1))
    assert fam3.members == [1]


def test_delta_union_example():
    fam = ResonantFamily(2, (Fraction(3, 2),), (0, 1), [1], [(0,)], [True])
    du = delta_union(fam, 1, [Fraction(1, 8)])
    assert sorted(du.union.centers.ravel().tolist()) == [0, 1, 7]
    assert du.union.measure() == Fraction(3, 8)
    with pytest.raises(errors.OutOfRange):
        delta_union(fam, 1, [Fraction(1)])
    with pytest.raises(ValueError):
        delta_union(fam, 2, [Fraction(1, 8)])


def test_multiples_of_p_are_excluded():
    fam = ResonantFamily(2, (Fraction(3, 2),), (0, 6), [1, 2, 3, 4], [], [])
    du = delta_union(fam, 1, [Fraction(1, 16)])
    assert du.used == 2 and du.excluded == 2


@given(st.integers(0, 2**32), st.integers(1, 3), st.integers(0, 15))
def test_restriction_dichotomy(seed, level, center):
    fam = resonant_denominators(random_padic_vector(2, 48, 1, seed), (Fraction(7, 5),), (13, 169))
    full = delta_union(fam, 1, [Fraction(1, 64)]).union
    ball = Ball(2, (level,), (center % 2**level,))
    restricted = delta_union(fam, 1, [Fraction(1, 64)], ball).union
    inside = [c for c in full.centers.ravel().tolist() if c % 2**level == center % 2**level]
    assert sorted(restricted.centers.ravel().tolist()) == inside
    assert full.intersect_measure(ball) == restricted.measure()


@given(st.integers(0, 2**32), st.integers(1, 40))
def test_subadditivity(seed, hi):
    fam = resonant_denominators(random_padic_vector(3, 48, 1, seed), (Fraction(6, 5),), (0, hi))
    radii = [Fraction(1, 27), Fraction(1, 81)]
    du = delta_union(fam, 2, radii)
    assert du.union.measure() <= du.generated * radii[0] * radii[1]


@given(st.lists(st.integers(0, 63), max_size=20), st.integers(1, 3))
def test_refinement_invariance(centers, extra):
    U = BallUnion(2, (6,), np.array(centers, dtype=np.int64).reshape(-1, 1))
    fine = np.array([c + 64 * j for c in U.centers.ravel() for j in range(2**extra)]).reshape(-1, 1)
    V = BallUnion(2, (6 + extra,), fine)
    assert len(V) == len(U) * 2**extra and V.measure() == U.measure()


@given(st.integers(0, 2**32))
def test_density_monotone_in_level(seed):
    fam = resonant_denominators(random_padic_vector(2, 48, 1, seed), (Fraction(7, 5),), (13, 169))
    sizes = [delta_union(fam, 1, [Fraction(1, 2**t)]).union.measure() for t in range(4, 12)]
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))


def test_density_constant_and_violation():
    assert float(density_constant(SPLIT, 13)) == pytest.approx(1 - 3 * 18 * 13 ** -1.6)
    alpha = random_padic_vector(2, 48, 1, 0)
    with pytest.raises(errors.ConstraintViolation):
        ubiquity_density_check(alpha, SPLIT, 4, 1)
    with pytest.raises(errors.ConstraintViolation):
        ubiquity_density_check(alpha, WeightSplit(("3/2",), ("3",)), 13, 1)


def test_density_global_and_local():
    rng = np.random.default_rng(9)
    for _ in range(3):
        alpha = random_padic_vector(2, 48, 1, int(rng.integers(2**32)))
        rep = ubiquity_density_check(alpha, SPLIT, 13, 1)
        assert rep.passed and rep.density >= rep.c
        local = ubiquity_density_check(alpha, SPLIT, 13, 2, Ball(2, (2,), (int(rng.integers(4)),)))
        assert local.passed
        assert set(rep.row()) >= {"density", "c", "pass"}
