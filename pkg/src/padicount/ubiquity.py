"""Exact Haar measure of finite unions of p-adic balls, and resonant families.

In an ultrametric space two balls of the same radius are either equal or
disjoint, so a union of product balls of per-coordinate radii ``p**-t_i`` is
just a set of residue vectors modulo ``(p**t_1, ..., p**t_d)`` and its
measure is ``#centers * prod p**-t_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .counting import _c1_value
from .dimension import WeightSplit, v_vector
from .errors import ConstraintViolation, InfeasibleSize, InsufficientPrecision, OutOfRange
from .padic import PadicInt, Power, ThresholdMode, compare_to_radius, threshold_exponent, truncate

DEFAULT_BALL_BUDGET = 5 * 10**7
# residue * inverse must stay below 2**63 in int64
_MAX_NUMPY_MODULUS = 2**31


@dataclass(frozen=True)
class Ball:
    """The product ball ``{y : y_i = center_i mod p**level_i}``; level 0 means all of Z_p."""

    p: int
    levels: tuple[int, ...]
    center: tuple[int, ...]

    @classmethod
    def whole(cls, p: int, d: int) -> "Ball":
        return cls(p, (0,) * d, (0,) * d)

    @property
    def measure(self) -> Fraction:
        return Fraction(1, self.p ** sum(self.levels))


@dataclass
class BallUnion:
    p: int
    t: tuple[int, ...]
    centers: np.ndarray  # shape (count, d), canonical residues, unique, lexicographically sorted

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.int64).reshape(-1, len(self.t))
        mods = np.array([self.p**ti for ti in self.t], dtype=np.int64)
        c = np.mod(c, mods)
        self.centers = np.unique(c, axis=0) if len(c) else c

    @property
    def d(self) -> int:
        return len(self.t)

    def __len__(self) -> int:
        return len(self.centers)

    def measure(self) -> Fraction:
        return Fraction(len(self.centers), self.p ** sum(self.t))

    def intersect_measure(self, ball: Ball) -> Fraction:
        """``measure(U ∩ B)``: a center contributes iff it agrees with ``B`` on the coarser level."""
        if not len(self.centers):
            return Fraction(0)
        keep = np.ones(len(self.centers), dtype=bool)
        for i, (ti, si, bi) in enumerate(zip(self.t, ball.levels, ball.center)):
            mod = self.p ** min(ti, si)
            keep &= np.mod(self.centers[:, i], mod) == bi % mod
        levels = sum(max(ti, si) for ti, si in zip(self.t, ball.levels))
        return Fraction(int(keep.sum()), self.p**levels)

    def to_dict(self) -> dict:
        return {"p": self.p, "t": list(self.t), "centers": self.centers.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "BallUnion":
        return cls(int(data["p"]), tuple(data["t"]), np.array(data["centers"], dtype=np.int64))


def measure(U: BallUnion) -> Fraction:
    return U.measure()


@dataclass
class ResonantFamily:
    p: int
    tau_m: tuple
    window: tuple[int, int]
    members: list[int] = field(default_factory=list)
    witnesses: list[tuple[int, ...]] = field(default_factory=list)
    coprime_to_p: list[bool] = field(default_factory=list)


def _coprime_numerator(q0: int, r: int, P: int) -> Optional[int]:
    """Smallest-magnitude ``|q| <= q0`` with ``q = r mod P`` and ``gcd(q, q0) = 1``."""
    first = -q0 + ((r + q0) % P)
    cands = range(first, q0 + 1, P)
    for q in sorted(cands, key=lambda c: (abs(c), c)):
        if math.gcd(q, q0) == 1:
            return q
    return None


def resonant_denominators(
    alpha: Sequence[PadicInt],
    tau_m: Sequence,
    window: tuple[int, int],
    *,
    require_coprime_p: bool = False,
) -> ResonantFamily:
    """Denominators ``q0`` in ``(l, u]`` with a coprime numerator close to each ``alpha_i``.

    ``q0`` is a member when for every ``i`` some ``|q| <= q0`` with
    ``gcd(q, q0) = 1`` satisfies ``|q0 * alpha_i - q|_p < q0**-tau_i``.
    """
    lo, hi = map(int, window)
    if lo < 0 or hi < lo:
        raise ValueError("window must satisfy 0 <= l <= u")
    p = alpha[0].p
    taus = [Fraction(t) if not isinstance(t, float) else t for t in tau_m]
    if len(taus) != len(alpha):
        raise ValueError("alpha and tau_m must have the same length")
    fam = ResonantFamily(p, tuple(tau_m), (lo, hi))
    if hi == lo:
        return fam
    # STRICT thresholds are nondecreasing in q0; track them incrementally.
    ts = [max(0, threshold_exponent(Power(lo + 1, t), p, ThresholdMode.STRICT)) for t in taus]
    t_top = [threshold_exponent(Power(hi, t), p, ThresholdMode.STRICT) for t in taus]
    for a, t in zip(alpha, t_top):
        if t > a.precision:
            raise InsufficientPrecision(f"need {t} digits", needed=t, have=a.precision)
    for q0 in range(lo + 1, hi + 1):
        witness = []
        for i, tau in enumerate(taus):
            while compare_to_radius(ts[i], p, Power(q0, tau)) >= 0:
                ts[i] += 1
            P = p ** ts[i]
            q = _coprime_numerator(q0, (q0 * truncate(alpha[i], ts[i])) % P, P)
            if q is None:
                break
            witness.append(q)
        else:
            coprime = q0 % p != 0
            if require_coprime_p and not coprime:
                continue
            fam.members.append(q0)
            fam.witnesses.append(tuple(witness))
            fam.coprime_to_p.append(coprime)
    return fam


def _radius_level(radius, p: int) -> int:
    r = radius if isinstance(radius, Power) else Fraction(radius)
    if (float(r) if isinstance(r, Power) else r) >= 1:
        raise OutOfRange(f"radius {radius} must be < 1")
    return threshold_exponent(r, p, ThresholdMode.NON_STRICT)


@dataclass
class DeltaUnion:
    union: BallUnion
    used: int
    excluded: int
    generated: int


def delta_union(
    family: ResonantFamily,
    d: int,
    radii: Sequence,
    restrict_to: Optional[Ball] = None,
    *,
    budget: int = DEFAULT_BALL_BUDGET,
) -> DeltaUnion:
    """Union over members ``q0`` of the balls around ``(q_1/q0, ..., q_d/q0)``.

    Numerators range over ``|q_i| <= q0`` with ``gcd(q_i, q0) = 1``; ball
    levels are the NON_STRICT thresholds of ``radii``.  Members divisible by
    ``p`` are skipped and counted in ``excluded``.
    """
    if len(radii) != d:
        raise ValueError("need one radius per free coordinate")
    p = family.p
    t = tuple(_radius_level(r, p) for r in radii)
    mods = [p**ti for ti in t]
    if max(mods) > _MAX_NUMPY_MODULUS:
        raise InfeasibleSize(f"ball level {max(t)} too deep for the int64 path")
    ball = restrict_to or Ball.whole(p, d)
    chunks, used, excluded, generated = [], 0, 0, 0
    for q0 in family.members:
        if q0 % p == 0:
            excluded += 1
            continue
        used += 1
        q = np.arange(-q0, q0 + 1, dtype=np.int64)
        q = q[np.gcd(q, q0) == 1]
        per_coord = []
        for i, P in enumerate(mods):
            c = np.mod(np.mod(q, P) * (pow(q0, -1, P)), P)
            mod = p ** min(t[i], ball.levels[i])
            c = c[np.mod(c, mod) == ball.center[i] % mod]
            per_coord.append(np.unique(c))
        size = math.prod(len(c) for c in per_coord)
        generated += size
        if generated > budget:
            raise InfeasibleSize(f"more than {budget} candidate balls")
        if size:
            grid = np.meshgrid(*per_coord, indexing="ij")
            chunks.append(np.stack([g.ravel() for g in grid], axis=1))
    centers = np.concatenate(chunks) if chunks else np.zeros((0, d), dtype=np.int64)
    return DeltaUnion(BallUnion(p, t, centers), used, excluded, generated)


@dataclass
class DensityReport:
    p: int
    d: int
    m: int
    tau_m: tuple
    M: int
    k: int
    members: int
    excluded: int
    balls: int
    density: Fraction
    c: float
    passed: bool

    def row(self) -> dict:
        return {
            "p": self.p,
            "d": self.d,
            "m": self.m,
            "tau_m": " ".join(str(t) for t in self.tau_m),
            "M": self.M,
            "k": self.k,
            "members": self.members,
            "balls": self.balls,
            "density": f"{float(self.density):.12g}",
            "c": f"{self.c:.12g}",
            "pass": self.passed,
        }


def density_constant(split: WeightSplit, M: int) -> mpmath.mpf:
    """``1 - 3**d * C1(m) * M**-(n + 1 - sum(tau_m))``."""
    with mpmath.workdps(40):
        c1 = _c1_value(split.m)
        c1 = mpmath.mpf(c1.numerator) / c1.denominator if isinstance(c1, Fraction) else mpmath.mpf(c1)
        budget = split.budget
        e = mpmath.mpf(budget.numerator) / budget.denominator if isinstance(budget, Fraction) else mpmath.mpf(budget)
        return 1 - 3**split.d * c1 * mpmath.power(M, -e)


def ubiquity_density_check(
    alpha: Sequence[PadicInt],
    split: WeightSplit,
    M: int,
    k: int,
    B: Optional[Ball] = None,
    *,
    budget: int = DEFAULT_BALL_BUDGET,
) -> DensityReport:
    """Fraction of ``B`` covered at stage ``k`` versus the guaranteed constant ``c``."""
    split.require_valid()
    c = density_constant(split, M)
    if c <= 0:
        raise ConstraintViolation(f"M={M} too small: density constant {float(c):.4g} <= 0")
    p = alpha[0].p
    v_sorted, _ = v_vector(split.tau_d_sorted, split.budget)
    v = [None] * split.d
    for pos, i in enumerate(split.order):
        v[i] = v_sorted[pos]
    fam = resonant_denominators(alpha, split.tau_m, (M**k, M ** (k + 1)))
    radii = [Power(M ** (k + 1), vi) for vi in v]
    ball = B or Ball.whole(p, split.d)
    du = delta_union(fam, split.d, radii, ball, budget=budget)
    density = du.union.intersect_measure(ball) / ball.measure
    with mpmath.workdps(40):
        passed = bool(mpmath.mpf(density.numerator) / density.denominator >= c)
    return DensityReport(
        p, split.d, split.m, split.tau_m, M, k, len(fam.members), du.excluded, len(du.union),
        density, float(c), passed,
    )
