"""Finite-precision p-adic integers and threshold discretisation.

A :class:`PadicInt` stores the first ``L`` base-p digits of an element of
Z_p, least significant first.  Nothing here silently extends a digit
sequence: asking for more digits than were stored raises
:class:`~padicount.errors.InsufficientPrecision`.

Approximation functions are turned into integer exponents ``t`` with
:func:`threshold_exponent`, which compares ``p**-t`` against the value
exactly whenever the value is rational or a rational power of an integer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from ._exact import cmp_power, exact_fraction
from .errors import InsufficientPrecision, NotPrime, PDividesDenominator, PadicountError

INFINITY = math.inf


def is_prime(p: int) -> bool:
    if not isinstance(p, int) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p!r} is not a prime", p=p)


def valuation(y: int, p: int) -> int | float:
    """Largest ``v`` with ``p**v`` dividing ``y``; ``math.inf`` for ``y == 0``.

    >>> valuation(12, 2), valuation(45, 3), valuation(0, 5)
    (2, 2, inf)
    """
    check_prime(p)
    y = int(y)
    if y == 0:
        return INFINITY
    y = abs(y)
    v = 0
    while y % p == 0:
        y //= p
        v += 1
    return v


def padic_norm(y: int, p: int) -> Fraction:
    """``|y|_p`` as an exact rational (0 for ``y == 0``)."""
    v = valuation(y, p)
    if v == INFINITY:
        return Fraction(0)
    return Fraction(1, p**v)


@dataclass(frozen=True)
class PadicInt:
    """An element of Z_p known to ``precision`` base-p digits."""

    p: int
    digits: tuple[int, ...]

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if not self.digits:
            raise ValueError("a PadicInt needs at least one digit")
        if any(d < 0 or d >= self.p for d in self.digits):
            raise ValueError(f"digits must lie in [0, {self.p})")

    @property
    def precision(self) -> int:
        return len(self.digits)

    @cached_property
    def residue(self) -> int:
        """The integer sum(digits[i] * p**i), i.e. the value mod p**precision."""
        value = 0
        for d in reversed(self.digits):
            value = value * self.p + d
        return value

    def truncate(self, t: int) -> int:
        return truncate(self, t)

    def to_dict(self) -> dict:
        return {"p": self.p, "digits": list(self.digits), "precision": self.precision}

    @classmethod
    def from_dict(cls, data: dict) -> "PadicInt":
        x = cls(int(data["p"]), tuple(data["digits"]))
        if "precision" in data and int(data["precision"]) != x.precision:
            raise ValueError("precision field disagrees with the digit count")
        return x

    @classmethod
    def from_residue(cls, value: int, p: int, precision: int) -> "PadicInt":
        check_prime(p)
        if precision < 1:
            raise ValueError("precision must be at least 1")
        value %= p**precision
        digits = []
        for _ in range(precision):
            value, d = divmod(value, p)
            digits.append(d)
        return cls(p, tuple(digits))

    def __repr__(self) -> str:
        shown = "".join(str(d) if self.p <= 10 else f"{d}," for d in self.digits[:12])
        more = "..." if self.precision > 12 else ""
        return f"PadicInt(p={self.p}, L={self.precision}, digits={shown}{more})"


def from_rational(a: int, b: int, p: int, precision: int) -> PadicInt:
    """Embed ``a/b`` (which must lie in Z_p) with ``precision`` digits.

    >>> from_rational(1, 3, 2, 4).digits
    (1, 1, 0, 1)
    """
    check_prime(p)
    if b == 0:
        raise ZeroDivisionError("denominator is zero")
    g = math.gcd(a, b)
    a, b = a // g, b // g
    if b % p == 0:
        raise PDividesDenominator(f"{a}/{b} is not in Z_{p}", a=a, b=b, p=p)
    modulus = p**precision
    return PadicInt.from_residue(a * pow(b, -1, modulus), p, precision)


def from_integer(y: int, p: int, precision: int) -> PadicInt:
    return from_rational(y, 1, p, precision)


def truncate(x: PadicInt, t: int) -> int:
    """The integer ``X_t = sum_{i<t} x_i p**i``, so ``0 <= X_t < p**t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t > x.precision:
        raise InsufficientPrecision(
            f"need {t} digits but only {x.precision} are stored", needed=t, have=x.precision
        )
    return x.residue % x.p**t


def random_padic(p: int, precision: int, seed: int) -> PadicInt:
    """Haar-random element of Z_p: i.i.d. uniform digits from a seeded PCG64 stream."""
    check_prime(p)
    rng = np.random.default_rng(seed)
    return PadicInt(p, tuple(rng.integers(0, p, size=precision).tolist()))


def random_padic_vector(p: int, precision: int, n: int, seed: int) -> tuple[PadicInt, ...]:
    """``n`` independent Haar-random coordinates, each from its own spawned stream."""
    children = np.random.SeedSequence(seed).spawn(n)
    out = []
    for child in children:
        rng = np.random.default_rng(child)
        out.append(PadicInt(p, tuple(rng.integers(0, p, size=precision).tolist())))
    return tuple(out)


class ThresholdMode(enum.Enum):
    """How a real radius is discretised to an exponent of p.

    ``NON_STRICT``: the t with ``p**-t <= psi < p**(1-t)`` (closed balls).
    ``STRICT``: the smallest t with ``p**-t < psi``; then ``|y|_p < psi``
    holds exactly when ``valuation(y) >= t``.
    """

    NON_STRICT = "non_strict"
    STRICT = "strict"


@dataclass(frozen=True)
class Power:
    """The positive real ``scale * base**(-exponent)``, kept symbolic.

    ``Power(N, tau)`` is the power-law value ``N**-tau`` and stays exact for
    rational ``tau``.
    """

    base: int
    exponent: Union[int, Fraction, float]
    scale: Union[int, Fraction] = 1

    def __post_init__(self):
        if self.base < 1:
            raise ValueError("base must be a positive integer")
        if Fraction(self.scale) <= 0:
            raise ValueError("scale must be positive")

    def __float__(self) -> float:
        return float(self.scale) * float(self.base) ** (-float(self.exponent))

    def log(self) -> float:
        return math.log(self.scale) - float(self.exponent) * math.log(self.base)


Radius = Union[int, Fraction, float, Power]


def _as_radius(psi) -> Radius:
    if isinstance(psi, Power):
        return psi
    q = exact_fraction(psi)
    if q is None:
        q = Fraction(psi)
    if q <= 0:
        raise PadicountError(f"approximation value must be positive, got {psi!r}")
    return q


def compare_to_radius(t: int, p: int, psi: Radius) -> int:
    """Sign of ``p**-t - psi``, decided exactly."""
    psi = _as_radius(psi)
    lhs = Fraction(1, p**t) if t >= 0 else Fraction(p ** (-t))
    if isinstance(psi, Power):
        return cmp_power(lhs, psi.scale, psi.base, -psi.exponent)
    return (lhs > psi) - (lhs < psi)


def _log_radius(psi: Radius) -> float:
    if isinstance(psi, Power):
        return psi.log()
    return math.log(psi.numerator) - math.log(psi.denominator)


def threshold_exponent(psi: Radius, p: int, mode: ThresholdMode = ThresholdMode.NON_STRICT) -> int:
    """Discretise a radius ``psi > 0`` to an exponent of ``p``.

    >>> threshold_exponent(Fraction(1, 27), 3)
    3
    >>> threshold_exponent(Fraction(1, 4), 2, ThresholdMode.STRICT)
    3

    Values ``psi > 1`` give ``t <= 0`` under NON_STRICT; callers that need
    a genuine p-adic ball reject those.
    """
    check_prime(p)
    psi = _as_radius(psi)
    guess = -_log_radius(psi) / math.log(p)
    if mode is ThresholdMode.NON_STRICT:
        t = math.ceil(guess)
        while compare_to_radius(t, p, psi) > 0:  # need p^-t <= psi
            t += 1
        while compare_to_radius(t - 1, p, psi) <= 0:
            t -= 1
        return t
    t = math.floor(guess) + 1
    while compare_to_radius(t, p, psi) >= 0:  # need p^-t < psi
        t += 1
    while compare_to_radius(t - 1, p, psi) < 0:
        t -= 1
    return t


def norm_below(y: int, p: int, psi: Radius) -> bool:
    """``|y|_p < psi``, decided from the valuation directly."""
    v = valuation(y, p)
    if v == INFINITY:
        return True
    return compare_to_radius(v, p, psi) < 0


def digits_of(xs: Sequence[PadicInt]) -> list[dict]:
    return [x.to_dict() for x in xs]
