import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from padicount import errors
from padicount.counting import (
    ApproxProfile,
    c1,
    c2,
    count_brute,
    count_fast,
    diophantine_exponent_estimate,
    evaluate_bounds,
    is_member,
    minkowski_solve,
    pigeonhole_witness,
    residue_count,
)
from padicount.padic import (
    Power,
    ThresholdMode,
    compare_to_radius,
    from_integer,
    from_rational,
    random_padic_vector,
    truncate,
    valuation,
)

taus_st = st.fractions(Fraction(11, 10), Fraction(19, 10), max_denominator=20)


def oracle_count(x, taus, N):
    """Independent scan: membership straight from valuations of q0*x_i - q_i."""
    p = x[0].p
    total = 0
    for q0 in range(1, N + 1):
        per = 1
        for xi, tau in zip(x, taus):
            ok = 0
            for q in range(-N, N + 1):
                v = valuation(q0 * xi.residue - q, p)
                v = min(v, xi.precision)
                if compare_to_radius(v, p, Power(N, tau)) < 0:
                    ok += 1
            per *= ok
        total += per
    return total


def test_count_example_66():
    x = (from_integer(5, 2, 10),)
    prof = ApproxProfile.table([{16: Fraction(1, 4)}])
    assert prof.thresholds(16, 2) == (3,)
    brute = count_brute(x, prof, 16)
    assert brute.count == 66 == count_fast(x, prof, 16).count
    assert len(brute.solutions) == 66
    assert all(is_member(x, prof, 16, q) for q in brute.solutions)


def test_residue_count_example():
    assert residue_count(5, 8, 16) == 4
    assert [q for q in range(-16, 17) if q % 8 == 5] == [-11, -3, 5, 13]


def test_unconstrained_count():
    x = random_padic_vector(3, 10, 2, 0)
    prof = ApproxProfile.table([{7: 2}, {7: 5}])
    assert count_fast(x, prof, 7).count == 7 * 15**2 == count_brute(x, prof, 7).count


def test_empty_count():
    # x = 1/3 in Z_2: small q0 need q = q0/3, so q0 = 3, 6, ... are the only exact hits
    x = (from_rational(1, 3, 2, 40),)
    prof = ApproxProfile.power((Fraction(15),))
    assert count_fast(x, prof, 2).count == 0 == count_brute(x, prof, 2).count


def test_rational_point_grows_quadratically():
    # constant psi: every q0 keeps a fixed share of the numerators, so count(2N)/count(N) -> 4
    x = (from_rational(2, 3, 2, 40),)
    N = 512
    prof = ApproxProfile.table([{N: Fraction(1, 8), 2 * N: Fraction(1, 8)}])
    ratio = count_fast(x, prof, 2 * N).count / count_fast(x, prof, N).count
    assert ratio > 3


def test_precision_and_budget_errors():
    x = (random_padic_vector(2, 4, 1, 0)[0],)
    with pytest.raises(errors.InsufficientPrecision):
        count_fast(x, ApproxProfile.power((Fraction(3, 2),)), 2**10)
    y = random_padic_vector(2, 60, 2, 0)
    with pytest.raises(errors.InfeasibleSize):
        count_brute(y, ApproxProfile.power((Fraction(3, 2),) * 2), 10**4)


@given(
    st.sampled_from([2, 3, 5]),
    st.integers(1, 2),
    st.integers(1, 40),
    st.lists(taus_st, min_size=2, max_size=2),
    st.integers(0, 2**32),
)
def test_fast_matches_independent_oracle(p, n, N, taus, seed):
    x = random_padic_vector(p, 40, n, seed)
    taus = tuple(taus[:n])
    prof = ApproxProfile.power(taus)
    assert count_fast(x, prof, N).count == oracle_count(x, taus, N)


@given(st.sampled_from([2, 3]), st.integers(5, 60), taus_st, taus_st, st.integers(0, 2**32))
def test_count_monotone_in_tau(p, N, a, b, seed):
    x = random_padic_vector(p, 60, 1, seed)
    lo, hi = min(a, b), max(a, b)
    assert count_fast(x, ApproxProfile.power((hi,)), N).count <= count_fast(x, ApproxProfile.power((lo,)), N).count


def test_chunked_and_threaded_agree():
    x = random_padic_vector(3, 60, 2, 11)
    prof = ApproxProfile.power((Fraction(6, 5), Fraction(13, 10)))
    base = count_fast(x, prof, 5000).count
    assert count_fast(x, prof, 5000, chunk=777, workers=4).count == base


def test_c1_c2_constants():
    assert c1(1) == 18
    assert c1(2) == 216
    assert c2(1, 2) == pytest.approx(1.5957691, rel=1e-6)
    assert c2(1, 2) == pytest.approx(2 * math.sqrt(2 / math.pi))


def test_bounds_report_example():
    x = random_padic_vector(2, 40, 1, 3)
    rep = evaluate_bounds(x, ApproxProfile.power((Fraction(3, 2),)), 16)
    assert rep.lemma2_lower_statement == pytest.approx(1.0)
    assert rep.lemma2_lower_proof == pytest.approx(1.0)
    assert rep.theorem1_upper == pytest.approx(72.0)
    assert rep.status("lemma2_proof") == "PASS"
    assert rep.status("lemma1") == "NOT_APPLICABLE"
    assert rep.to_dict()["flags"]["theorem1"] in ("PASS", "FAIL")


def test_bounds_not_applicable_outside_hypotheses():
    x = random_padic_vector(2, 40, 1, 3)
    rep = evaluate_bounds(x, ApproxProfile.power((Fraction(5, 2),)), 16)
    assert rep.status("lemma2_proof") == "NOT_APPLICABLE"
    assert rep.status("theorem1") == "NOT_APPLICABLE"


@given(st.sampled_from([2, 3]), st.integers(1, 2), st.integers(4, 8), st.integers(0, 2**32), st.data())
def test_lower_bound_proof_constant(p, n, e, seed, data):
    taus = tuple(data.draw(st.fractions(Fraction(101, 100), 1 + Fraction(1, n) - Fraction(1, 100), max_denominator=100)) for _ in range(n))
    x = random_padic_vector(p, 64, n, seed)
    rep = evaluate_bounds(x, ApproxProfile.power(taus), p**e)
    assert rep.flags["lemma2_proof"] is True


@given(st.integers(0, 2**32))
def test_pigeonhole_witness_is_member(seed):
    x = random_padic_vector(2, 40, 1, seed)
    w = pigeonhole_witness(x, (Fraction(3, 2),), 16)
    assert w[0] > 0
    assert is_member(x, ApproxProfile.power((Fraction(3, 2),)), 16, w)
    assert tuple(w) in set(count_brute(x, ApproxProfile.power((Fraction(3, 2),)), 16).solutions)


def test_pigeonhole_edge_cases():
    zero = (from_integer(0, 2, 40),)
    assert pigeonhole_witness(zero, (Fraction(3, 2),), 16) == (1, 0)
    with pytest.raises(errors.NoOverfullBucket):
        pigeonhole_witness(random_padic_vector(2, 40, 1, 0), (Fraction(19, 10),), 2)
    with pytest.raises(errors.ConstraintViolation):
        pigeonhole_witness(random_padic_vector(2, 40, 1, 0), (Fraction(21, 10),), 16)


def test_minkowski_examples():
    assert minkowski_solve((from_integer(5, 2, 20),), (Fraction(2),), 4) == (3, -1)
    assert minkowski_solve((from_integer(0, 3, 20),) * 2, (Fraction(3, 2),) * 2, 5) == (1, 0, 0)
    sol = minkowski_solve(random_padic_vector(5, 20, 2, 1), (Fraction(1), Fraction(2)), 1)
    assert any(sol) and max(map(abs, sol)) <= 1
    with pytest.raises(errors.ConstraintViolation):
        minkowski_solve((from_integer(5, 2, 20),), (Fraction(3, 2),), 4)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 25), st.fractions(Fraction(1, 5), Fraction(14, 5), max_denominator=10), st.integers(0, 2**32))
def test_minkowski_solution_validity(p, H, a, seed):
    alpha = random_padic_vector(p, 60, 2, seed)
    taus = (a, 3 - a)
    sol = minkowski_solve(alpha, taus, H)
    assert any(sol) and max(map(abs, sol)) <= H
    for ai, tau, xi in zip(alpha, taus, sol[1:]):
        v = min(valuation(sol[0] * ai.residue - xi, p), ai.precision)
        assert compare_to_radius(v, p, Power(H, tau, scale=p)) < 0


def test_minkowski_brute_force_agreement_h1():
    # with H = 1 some vector in {-1,0,1}^2 always works; the solver's answer is one of them
    for seed in range(20):
        alpha = random_padic_vector(3, 20, 1, seed)
        sol = minkowski_solve(alpha, (Fraction(2),), 1)
        good = [
            (a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if (a, b) != (0, 0)
            and compare_to_radius(min(valuation(a * alpha[0].residue - b, 3), 20), 3, Fraction(3)) < 0
        ]
        assert sol in good


def test_exponent_estimate_properties():
    zero = (from_integer(0, 2, 30),)
    assert diophantine_exponent_estimate(zero, 2**10).truncated
    x = random_padic_vector(2, 64, 1, 5)
    small = diophantine_exponent_estimate(x, 2**10).tau_hat
    large = diophantine_exponent_estimate(x, 2**11).tau_hat
    assert small <= large


def test_exponent_estimate_typical_range():
    inside = sum(
        2 <= diophantine_exponent_estimate(random_padic_vector(2, 64, 1, s), 2**12).tau_hat <= 2.6 for s in range(100)
    )
    assert inside >= 95
