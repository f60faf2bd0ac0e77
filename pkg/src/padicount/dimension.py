"""Hausdorff dimension of weighted approximable points on coordinate hyperplanes.

A :class:`WeightSplit` splits a weight vector into ``d`` free coordinates
and ``m`` frozen ones.  The closed form in :func:`theorem2_dimension` is
cross-checked against the rectangle-to-rectangle transference bound
(:func:`mtprr_lower_bound`) fed with the shrinking vector from
:func:`v_vector`.

Rational inputs (ints, Fractions, decimal strings) are evaluated in exact
arithmetic; if any float is present everything is done in floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ConstraintViolation, InfeasibleSize, OutOfRange, PadicountError
from .padic import PadicInt, Power, ThresholdMode, threshold_exponent

Number = Union[int, Fraction, float]


def as_number(x) -> Number:
    """Ints, Fractions and numeric strings become Fractions; floats stay floats."""
    if isinstance(x, bool):
        raise TypeError("booleans are not weights")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def _unify(values: Sequence) -> list[Number]:
    vals = [as_number(v) for v in values]
    if any(isinstance(v, float) for v in vals):
        return [float(v) for v in vals]
    return vals


@dataclass(frozen=True)
class WeightSplit:
    """Weights ``tau_d`` on the free coordinates and ``tau_m`` on the frozen ones."""

    tau_d: tuple
    tau_m: tuple

    def __post_init__(self):
        if not self.tau_d or not self.tau_m:
            raise ValueError("both d and m must be positive")
        vals = _unify(list(self.tau_d) + list(self.tau_m))
        object.__setattr__(self, "tau_d", tuple(vals[: len(self.tau_d)]))
        object.__setattr__(self, "tau_m", tuple(vals[len(self.tau_d) :]))

    @property
    def d(self) -> int:
        return len(self.tau_d)

    @property
    def m(self) -> int:
        return len(self.tau_m)

    @property
    def n(self) -> int:
        return self.d + self.m

    @property
    def taus(self) -> tuple:
        return self.tau_d + self.tau_m

    @property
    def order(self) -> tuple[int, ...]:
        """Permutation putting ``tau_d`` in descending order (stable)."""
        return tuple(sorted(range(self.d), key=lambda i: -self.tau_d[i]))

    @property
    def tau_d_sorted(self) -> tuple:
        return tuple(self.tau_d[i] for i in self.order)

    @property
    def budget(self) -> Number:
        return self.n + 1 - sum(self.tau_m)

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "frozen_sum_below_m_plus_1": sum(self.tau_m) < self.m + 1,
            "total_sum_above_n_plus_1": sum(self.taus) > self.n + 1,
            "all_weights_above_1": all(t > 1 for t in self.taus),
        }

    @property
    def valid(self) -> bool:
        return all(self.flags.values())

    def require_valid(self) -> None:
        failed = [k for k, ok in self.flags.items() if not ok]
        if failed:
            raise ConstraintViolation(f"weight split violates: {', '.join(failed)}", failed=failed)

    def to_dict(self) -> dict:
        return {"tau_d": [str(t) for t in self.tau_d], "tau_m": [str(t) for t in self.tau_m]}

    @classmethod
    def from_dict(cls, data: dict) -> "WeightSplit":
        return cls(tuple(data["tau_d"]), tuple(data["tau_m"]))


def v_vector(tau_d: Sequence, budget) -> tuple[tuple, tuple]:
    """Shrink descending weights ``tau_d`` to ``v`` with ``sum(v) == budget``.

    Filled from the smallest weight upwards: each entry is capped by its own
    weight and by an even share of what is left.  Returns ``(v, tau_d - v)``.

    >>> v, t = v_vector((Fraction(2), Fraction(6, 5)), Fraction(13, 5))
    >>> [str(a) for a in v], [str(a) for a in t]
    (['7/5', '6/5'], ['3/5', '0'])
    """
    vals = _unify(list(tau_d) + [budget])
    taus, budget = vals[:-1], vals[-1]
    if any(a < b for a, b in zip(taus, taus[1:])):
        raise ValueError("tau_d must be in descending order")
    d = len(taus)
    v = [None] * d
    spent = 0 * budget
    for idx in range(d - 1, -1, -1):
        share = (budget - spent) / (idx + 1)
        v[idx] = min(taus[idx], share)
        spent += v[idx]
    if any(vi <= 1 for vi in v):
        raise OutOfRange(f"v = {v} has an entry <= 1", v=v)
    return tuple(v), tuple(t - vi for t, vi in zip(taus, v))


@dataclass(frozen=True)
class MTPRRInput:
    a: tuple
    t: tuple
    delta: tuple
    k: Number = 0

    def __post_init__(self):
        if not len(self.a) == len(self.t) == len(self.delta):
            raise ValueError("a, t and delta must have equal length")
        vals = _unify(list(self.a) + list(self.t) + list(self.delta) + [self.k])
        n = len(self.a)
        object.__setattr__(self, "a", tuple(vals[:n]))
        object.__setattr__(self, "t", tuple(vals[n : 2 * n]))
        object.__setattr__(self, "delta", tuple(vals[2 * n : 3 * n]))
        object.__setattr__(self, "k", vals[-1])
        if any(x <= 0 for x in self.a) or any(x < 0 for x in self.t) or any(x <= 0 for x in self.delta):
            raise ValueError("need a > 0, t >= 0, delta > 0")
        if not 0 <= self.k < 1:
            raise ValueError("k must lie in [0, 1)")

    @property
    def candidates(self) -> tuple:
        """The set ``{a_i} ∪ {a_i + t_i}`` in ascending order."""
        return tuple(sorted(set(self.a) | {a + t for a, t in zip(self.a, self.t)}))


@dataclass
class MTPRRTerm:
    A: Number
    K1: tuple[int, ...]
    K2: tuple[int, ...]
    K3: tuple[int, ...]
    value: Number


@dataclass
class MTPRRResult:
    s: Number
    argmin: Number
    terms: list[MTPRRTerm] = field(default_factory=list)


def mtprr_lower_bound(inp: MTPRRInput) -> MTPRRResult:
    """Minimum over candidates ``A`` of the K1/K2/K3 partition formula."""
    idx = range(len(inp.a))
    terms = []
    for A in inp.candidates:
        K1 = tuple(j for j in idx if inp.a[j] >= A)
        K2 = tuple(j for j in idx if inp.a[j] + inp.t[j] <= A and j not in K1)
        K3 = tuple(j for j in idx if j not in K1 and j not in K2)
        dl = inp.delta
        value = (
            sum(dl[j] for j in K1)
            + sum(dl[j] for j in K2)
            + inp.k * sum(dl[j] for j in K3)
            + (1 - inp.k)
            * (sum(inp.a[j] * dl[j] for j in K3) - sum(inp.t[j] * dl[j] for j in K2))
            / A
        )
        terms.append(MTPRRTerm(A, K1, K2, K3, value))
    best = min(terms, key=lambda term: term.value)
    return MTPRRResult(best.value, best.A, terms)


def theorem2_dimension(split: WeightSplit) -> Number:
    """Closed-form dimension on the hyperplane with frozen weights ``tau_m``.

    >>> theorem2_dimension(WeightSplit(("5/2",), ("3/2",)))
    Fraction(3, 5)
    """
    split.require_valid()
    taus = split.tau_d_sorted
    budget = split.budget
    best = None
    for i, ti in enumerate(taus):
        value = (budget + sum(ti - tj for tj in taus[i:])) / ti
        best = value if best is None else min(best, value)
    return best


def dimension_via_transference(split: WeightSplit) -> Number:
    """The transference bound evaluated at ``a = v``, ``t = tau_d - v``, unit deltas, ``k = 0``."""
    split.require_valid()
    v, t = v_vector(split.tau_d_sorted, split.budget)
    one = 1.0 if isinstance(v[0], float) else Fraction(1)
    return mtprr_lower_bound(MTPRRInput(v, t, (one,) * len(v), 0 * one)).s


def equal_weight_dimension(n: int, m: int, tau) -> Number:
    """``(n + 1) / tau - m``, the value for a constant weight vector."""
    tau = as_number(tau)
    return (n + 1) / tau - m


def remark_upper_bound(taus: Sequence, tau_alpha) -> Number:
    """Upper bound on a hyperplane whose single frozen coordinate has exponent ``tau_alpha``.

    ``taus[-1]`` is the frozen weight; the minimum runs over the others.
    """
    vals = _unify(list(taus) + [tau_alpha])
    taus, tau_alpha = vals[:-1], vals[-1]
    n = len(taus)
    if n < 2:
        raise ValueError("need at least one free coordinate")
    tn = taus[-1]
    if not (max(1, tau_alpha - 1) < tn < tau_alpha):
        raise ConstraintViolation(
            f"need max(1, tau_alpha - 1) < tau_n < tau_alpha, got tau_n={tn}, tau_alpha={tau_alpha}"
        )
    free = taus[:-1]
    best = None
    for ti in free:
        value = (n + tau_alpha - 1 - tn + sum(ti - tj for tj in free if tj <= ti)) / ti
        best = value if best is None else min(best, value)
    return best


@dataclass
class PsiStarEstimate:
    estimate: float
    trace: list[tuple[int, float]]
    converged: bool
    flags: list[str]


def psi_star_estimate(
    psi: Callable[[int], float],
    q_max: int,
    *,
    ratio: int = 2,
    tolerance: float = 0.05,
    window: int = 8,
) -> PsiStarEstimate:
    """Estimate ``lim -log psi(q) / log q`` on the grid ``ratio**j <= q_max``.

    ``psi`` may return a float, an mpmath number or a :class:`Power`.
    """
    import mpmath

    grid = []
    q = ratio
    while q <= q_max:
        grid.append(q)
        q *= ratio
    if len(grid) < 2:
        raise ValueError("grid too short; raise q_max")
    tail = grid[-window:]
    trace, values = [], []
    for q in tail:
        val = psi(q)
        if isinstance(val, Power):
            log_val = val.log()
        else:
            if not val > 0:
                raise ValueError(f"psi({q}) must be positive")
            log_val = float(mpmath.log(val))
        values.append(log_val)
        trace.append((q, -log_val / math.log(q)))
    estimates = [e for _, e in trace]
    flags = []
    if any(b > a for a, b in zip(values, values[1:])):
        flags.append("NOT_NONINCREASING")
    if estimates[-1] <= 0 or values[-1] >= values[0]:
        flags.append("NOT_A_VALID_PROFILE")
    converged = max(estimates) - min(estimates) < tolerance
    if not converged:
        flags.append("NOT_CONVERGED")
    return PsiStarEstimate(estimates[-1], trace, converged, flags)


# --------------------------------------------------------------------------
# Finite-stage cover cost
# --------------------------------------------------------------------------


@dataclass
class StageCost:
    k: int
    members: int
    log_weight: list[float]  # per free coordinate i: log of sum_q0 (#numerators)^d * #cover


@dataclass
class CriticalExponent:
    s: float
    per_coordinate: list[float]
    stages: list[StageCost]
    flags: list[str]
    taus: tuple = ()

    def cost(self, k: int, s: float, i: int = 0) -> float:
        """``log cost_k(s)`` for free coordinate ``i`` (``-inf`` if the stage is empty)."""
        st = self.stages[k - 1]
        tau = self.taus[i]
        return st.log_weight[i] - tau * s * k * math.log(2)


def _coprime_count(q0: int) -> int:
    """Number of integers ``|q| <= q0`` coprime to ``q0``."""
    if q0 == 1:
        return 3
    return 2 * int(np.count_nonzero(np.gcd(np.arange(1, q0 + 1), q0) == 1))


def _slope(ks: Sequence[int], ys: Sequence[float]) -> float:
    return float(np.polyfit(np.asarray(ks, float), np.asarray(ys, float), 1)[0])


def cover_critical_exponent(
    alpha: Sequence[PadicInt],
    split: WeightSplit,
    K_max: int,
    *,
    tol: float = 1e-6,
    fit_from: Optional[int] = None,
    max_stage: int = 24,
) -> CriticalExponent:
    """Empirical critical exponent of the natural covers, stage by stage.

    Stage ``k`` collects the resonant denominators ``q0`` in ``(2**(k-1), 2**k]``;
    each contributes its coprime numerator vectors times the number of balls of
    radius ``(2**k)**-tau_i`` needed to cover one rectangle, weighted by
    ``(2**k)**(-tau_i * s)``.  The critical ``s`` is where the least-squares
    slope of ``log cost_k(s)`` over the tail stages changes sign, found by
    bisection; the minimum over free coordinates is reported.
    """
    from .ubiquity import resonant_denominators

    split.require_valid()
    if K_max > max_stage:
        raise InfeasibleSize(f"K_max={K_max} exceeds the stage limit {max_stage}")
    p = alpha[0].p
    taus = [float(t) for t in split.tau_d]
    stages: list[StageCost] = []
    for k in range(1, K_max + 1):
        fam = resonant_denominators(alpha, split.tau_m, (2 ** (k - 1), 2**k))
        ts = [threshold_exponent(Power(2**k, t), p, ThresholdMode.NON_STRICT) for t in split.tau_d]
        logs = []
        for i in range(split.d):
            cover = sum(ts[i] - tj for tj in ts if tj < ts[i])
            total = sum(_coprime_count(q0) ** split.d for q0 in fam.members)
            logs.append(math.log(total) + cover * math.log(p) if total else -math.inf)
        stages.append(StageCost(k, len(fam.members), logs))

    flags: list[str] = []
    if all(st.members == 0 for st in stages):
        return CriticalExponent(0.0, [0.0] * split.d, stages, ["NO_RESONANT_DENOMINATORS"], tuple(taus))
    start = fit_from if fit_from is not None else max(1, K_max // 2)
    tail = [st for st in stages if st.k >= start and st.members > 0]
    if len(tail) < 2:
        flags.append("TOO_FEW_STAGES")
        tail = [st for st in stages if st.members > 0]
    per_coordinate = []
    for i, tau in enumerate(taus):
        ks = [st.k for st in tail]

        def slope(s: float) -> float:
            return _slope(ks, [st.log_weight[i] - tau * s * st.k * math.log(2) for st in tail]) if len(ks) > 1 else -tau * s

        lo, hi = 0.0, float(split.n + 1)
        if slope(lo) <= 0:
            per_coordinate.append(0.0)
            continue
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if slope(mid) > 0:
                lo = mid
            else:
                hi = mid
        per_coordinate.append((lo + hi) / 2)
    return CriticalExponent(min(per_coordinate), per_coordinate, stages, flags, tuple(taus))
