"""Exact sign tests between rationals and rational powers of integers.

Counting thresholds and bound flags hinge on comparisons like
``p**-t < N**-tau``; off-by-one thresholds change counts by factors of p,
so these are decided with integer arithmetic whenever the exponent is a
rational with a modest denominator, and with 80-digit mpmath otherwise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import mpmath

# Above this denominator the integer powers get too large to be worth it.
_MAX_EXACT_DENOMINATOR = 4096
_MP_DPS = 80


def exact_fraction(x) -> Fraction | None:
    """Return ``x`` as a Fraction if that is cheap to use exactly, else None."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        f = Fraction(x)
        return f if f.denominator <= _MAX_EXACT_DENOMINATOR else None
    return None


def to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def cmp_power(lhs, coef, base: int, exponent) -> int:
    """Sign of ``lhs - coef * base**exponent`` for non-negative ``lhs`` and ``coef``.

    ``lhs`` and ``coef`` may be ints, Fractions, floats or mpf values;
    ``base`` is a positive integer.
    """
    if base < 1:
        raise ValueError("base must be a positive integer")
    lhs_q = exact_fraction(lhs) if not isinstance(lhs, mpmath.mpf) else None
    coef_q = exact_fraction(coef) if not isinstance(coef, mpmath.mpf) else None
    exp_q = exact_fraction(exponent) if not isinstance(exponent, mpmath.mpf) else None
    if lhs_q is not None and coef_q is not None:
        if base == 1 or exp_q == 0:
            return _sign(lhs_q - coef_q)
        if exp_q is not None:
            a, b = exp_q.numerator, exp_q.denominator
            if b == 1:
                return _sign(lhs_q - coef_q * Fraction(base) ** a)
            # x -> x**b is increasing on [0, inf), so compare b-th powers.
            return _sign(lhs_q**b - coef_q**b * Fraction(base) ** a)
    with mpmath.workdps(_MP_DPS):
        diff = to_mpf(lhs) - to_mpf(coef) * mpmath.power(base, to_mpf(exponent))
        scale = abs(to_mpf(lhs)) + 1
        if abs(diff) <= scale * mpmath.mpf(10) ** (-(_MP_DPS - 10)):
            return 0
        return 1 if diff > 0 else -1


def _sign(x) -> int:
    return (x > 0) - (x < 0)
