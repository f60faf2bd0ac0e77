"""Counting rational points near a p-adic vector.

The central object is the set of integer vectors ``(q0, q1, ..., qn)`` with
``0 < q0 <= N``, ``max |qi| <= N`` and ``|q0*x_i - q_i|_p < psi_i(N)`` for
every coordinate.  :func:`count_brute` enumerates it, :func:`count_fast`
counts it per denominator with floor arithmetic, and the two must agree.

Also here: the upper/lower bound evaluator, the constructive pigeonhole
witness, the p-adic Minkowski linear-forms solver and an estimator for the
Diophantine exponent of a point.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import mpmath
import numpy as np

from ._exact import cmp_power, exact_fraction
from .errors import (
    ConstraintViolation,
    InfeasibleSize,
    InsufficientPrecision,
    NoOverfullBucket,
    PadicountError,
)
from .padic import (
    PadicInt,
    Power,
    Radius,
    ThresholdMode,
    compare_to_radius,
    threshold_exponent,
    truncate,
    valuation,
)

STRICT = ThresholdMode.STRICT
DEFAULT_BRUTE_BUDGET = 10**8
DEFAULT_BUCKET_BUDGET = 10**7

Number = Union[int, Fraction, float]


# --------------------------------------------------------------------------
# Approximation profiles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ApproxProfile:
    """An n-tuple of approximation functions.

    Each coordinate is either a power law ``psi(N) = N**-tau`` (stored as the
    exponent ``tau``) or a table of sampled values ``{N: psi(N)}`` (stored as
    a sorted tuple of pairs).  ``mode`` selects how ``|y|_p < psi`` or
    ``|y|_p <= psi`` is discretised; counting defaults to STRICT.
    """

    coords: tuple
    mode: ThresholdMode = STRICT

    def __post_init__(self):
        coords = []
        for c in self.coords:
            if isinstance(c, Mapping) or (isinstance(c, tuple) and c and isinstance(c[0], tuple)):
                table = tuple(sorted((int(k), v) for k, v in dict(c).items()))
                if any(Fraction(v) <= 0 for _, v in table):
                    raise ValueError("tabulated approximation values must be positive")
                coords.append(table)
            else:
                if c <= 0:
                    raise ValueError("power-law exponents must be positive")
                coords.append(c)
        object.__setattr__(self, "coords", tuple(coords))

    @classmethod
    def power(cls, taus: Sequence[Number], mode: ThresholdMode = STRICT) -> "ApproxProfile":
        return cls(tuple(taus), mode)

    @classmethod
    def table(cls, tables: Sequence[Mapping[int, Number]], mode: ThresholdMode = STRICT):
        return cls(tuple(dict(t) for t in tables), mode)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def is_power(self) -> bool:
        return all(not isinstance(c, tuple) for c in self.coords)

    @property
    def taus(self) -> tuple:
        if not self.is_power:
            raise PadicountError("profile has tabulated coordinates, not power laws")
        return self.coords

    def with_mode(self, mode: ThresholdMode) -> "ApproxProfile":
        return ApproxProfile(self.coords, mode)

    def psi(self, i: int, N: int) -> Radius:
        c = self.coords[i]
        if isinstance(c, tuple):
            table = dict(c)
            if N not in table:
                raise KeyError(f"coordinate {i} has no tabulated value at N={N}")
            value = table[N]
            q = exact_fraction(value)
            return q if q is not None else Fraction(value)
        return Power(N, c)

    def thresholds(self, N: int, p: int, mode: Optional[ThresholdMode] = None) -> tuple[int, ...]:
        mode = self.mode if mode is None else mode
        return tuple(threshold_exponent(self.psi(i, N), p, mode) for i in range(self.n))

    def log_psi_product(self, N: int) -> float:
        total = 0.0
        for i in range(self.n):
            psi = self.psi(i, N)
            total += psi.log() if isinstance(psi, Power) else math.log(psi)
        return total


def _check_points(x: Sequence[PadicInt], profile: ApproxProfile) -> int:
    if not x:
        raise ValueError("need at least one coordinate")
    p = x[0].p
    if any(xi.p != p for xi in x):
        raise ValueError("all coordinates must use the same prime")
    if len(x) != profile.n:
        raise ValueError(f"profile has {profile.n} coordinates but x has {len(x)}")
    return p


def _count_thresholds(x, profile, N) -> tuple[int, ...]:
    p = x[0].p
    ts = tuple(max(t, 0) for t in profile.thresholds(N, p))
    for xi, t in zip(x, ts):
        if t > xi.precision:
            raise InsufficientPrecision(
                f"threshold {t} exceeds stored precision {xi.precision}", needed=t, have=xi.precision
            )
    return ts


# --------------------------------------------------------------------------
# Counting
# --------------------------------------------------------------------------


@dataclass
class CountResult:
    count: int
    N: int
    thresholds: tuple[int, ...]
    method: str
    solutions: Optional[list[tuple[int, ...]]] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["thresholds"] = list(self.thresholds)
        if self.solutions is not None:
            d["solutions"] = [list(s) for s in self.solutions]
        return d


def is_member(x: Sequence[PadicInt], profile: ApproxProfile, N: int, q: Sequence[int]) -> bool:
    """Check one vector against the set definition, straight from valuations."""
    q0, rest = q[0], q[1:]
    if not 0 < q0 <= N or any(abs(qi) > N for qi in rest):
        return False
    p = x[0].p
    outside = 0 if profile.mode is STRICT else 1
    for i, (xi, qi) in enumerate(zip(x, rest)):
        v = valuation(q0 * xi.residue - qi, p)
        known = min(v, xi.precision)
        if compare_to_radius(known, p, profile.psi(i, N)) >= outside:
            if v >= xi.precision:
                raise InsufficientPrecision("membership undecided at stored precision")
            return False
    return True


def _first_valuation_inside(p: int, psi: Radius, limit: int, strict: bool) -> int:
    # smallest v >= 0 with p**-v < psi (or <= psi), found by walking v upward
    v = 0
    while compare_to_radius(v, p, psi) >= (0 if strict else 1):
        v += 1
        if v > limit:
            raise InsufficientPrecision("approximation radius needs more digits than stored")
    return v


def count_brute(
    x: Sequence[PadicInt], profile: ApproxProfile, N: int, *, budget: int = DEFAULT_BRUTE_BUDGET
) -> CountResult:
    """Exhaustively scan ``(0, N] x [-N, N]**n`` and keep every member.

    Per denominator the n coordinate tests are evaluated on the full grid of
    numerators (numpy broadcasting), so each tuple is visited once.
    """
    p = _check_points(x, profile)
    if N < 1:
        raise ValueError("N must be at least 1")
    ts = _count_thresholds(x, profile, N)
    n = len(x)
    if N * (2 * N + 1) ** n > budget:
        raise InfeasibleSize(f"scan of {N * (2 * N + 1) ** n} tuples exceeds budget {budget}")

    strict = profile.mode is STRICT
    caps = [
        _first_valuation_inside(p, profile.psi(i, N), xi.precision, strict) for i, xi in enumerate(x)
    ]
    moduli = [p**c for c in caps]
    residues = [xi.residue % m for xi, m in zip(x, moduli)]
    numerators = np.arange(-N, N + 1, dtype=object if max(moduli) * N > 2**62 else np.int64)

    solutions: list[tuple[int, ...]] = []
    for q0 in range(1, N + 1):
        masks = [((q0 * r - numerators) % m) == 0 for r, m in zip(residues, moduli)]
        grid = masks[0]
        for mk in masks[1:]:
            grid = np.logical_and.outer(grid, mk)
        for idx in np.argwhere(grid):
            solutions.append((q0, *(int(j) - N for j in idx)))
    return CountResult(len(solutions), N, ts, "BRUTE", solutions)


def residue_count(r: int, m: int, N: int) -> int:
    """Number of integers in ``[-N, N]`` congruent to ``r`` modulo ``m``.

    >>> residue_count(5, 8, 16)
    4
    """
    return (N - r) // m - (-N - 1 - r) // m


def _fast_chunk(lo: int, hi: int, residues, moduli, N: int) -> int:
    q0 = np.arange(lo, hi, dtype=np.int64)
    total = None
    for X, m in zip(residues, moduli):
        if m < 2**31:
            r = (q0 % m) * X % m
            c = (N - r) // m - (-N - 1 - r) // m
        else:
            r = np.array([(int(q) * X) % m for q in q0], dtype=object)
            c = (N - r) // m - (-N - 1 - r) // m
        total = c if total is None else total * c
    return int(sum(int(v) for v in total)) if total.dtype == object else int(total.sum(dtype=np.int64))


def count_fast(
    x: Sequence[PadicInt],
    profile: ApproxProfile,
    N: int,
    *,
    chunk: int = 1 << 20,
    workers: int = 1,
) -> CountResult:
    """Count the set without enumerating it.

    For a denominator ``q0`` the admissible ``q_i`` are exactly the integers
    in ``[-N, N]`` congruent to ``q0 * X_i`` modulo ``p**t_i``; their number
    is a difference of floors.  The total is the sum over ``q0`` of the
    per-coordinate products.
    """
    _check_points(x, profile)
    if N < 1:
        raise ValueError("N must be at least 1")
    ts = _count_thresholds(x, profile, N)
    p = x[0].p
    moduli = [p**t for t in ts]
    residues = [truncate(xi, t) for xi, t in zip(x, ts)]
    bounds = [(lo, min(lo + chunk, N + 1)) for lo in range(1, N + 1, chunk)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _fast_chunk(b[0], b[1], residues, moduli, N), bounds))
    else:
        parts = [_fast_chunk(lo, hi, residues, moduli, N) for lo, hi in bounds]
    return CountResult(sum(parts), N, ts, "FAST")


# --------------------------------------------------------------------------
# Bounds
# --------------------------------------------------------------------------


def c1(n: int) -> float:
    """The counting constant max{3(6 sqrt n)^n, (n+2)! pi^(n/2) sqrt(n)^(n+1) / Gamma(n/2+1)}."""
    return float(_c1_value(n))


def _c1_terms(n: int):
    with mpmath.workdps(60):
        first = 3 * (6 * mpmath.sqrt(n)) ** n
        second = (
            mpmath.factorial(n + 2) * mpmath.pi ** (mpmath.mpf(n) / 2) * mpmath.sqrt(n) ** (n + 1)
            / mpmath.gamma(mpmath.mpf(n) / 2 + 1)
        )
    return first, second


def _c1_value(n: int):
    """C1 as an exact Fraction when the winning term is rational, else an mpf."""
    if n < 1:
        raise ValueError("n must be positive")
    first, second = _c1_terms(n)
    root = math.isqrt(n)
    if first >= second:
        if n % 2 == 0:
            return Fraction(3 * 6**n * n ** (n // 2))
        if root * root == n:
            return Fraction(3 * (6 * root) ** n)
        return first
    if n == 1:
        return Fraction(12)
    return second


def c2(n: int, p: int) -> float:
    """The shortest-vector constant 2 (Gamma((n+1)/2 + 1) p^n / pi^((n+1)/2))^(1/(n+1))."""
    k = n + 1
    return 2 * (math.gamma(k / 2 + 1) * p**n / math.pi ** (k / 2)) ** (1 / k)


@dataclass
class BoundReport:
    count: int
    N: int
    p: int
    taus: tuple
    lemma2_lower_statement: Optional[float]
    lemma2_lower_proof: Optional[float]
    theorem1_upper: Optional[float]
    lemma1_upper: Optional[float]
    flags: dict = field(default_factory=dict)

    def status(self, name: str) -> str:
        flag = self.flags.get(name)
        return "NOT_APPLICABLE" if flag is None else ("PASS" if flag else "FAIL")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["taus"] = [str(t) for t in self.taus]
        d["flags"] = {k: self.status(k) for k in self.flags}
        return d


def evaluate_bounds(
    x: Sequence[PadicInt],
    profile: ApproxProfile,
    N: int,
    eps: Number = Fraction(1, 100),
    tau_hat: Optional[Number] = None,
) -> BoundReport:
    """Count at ``N`` and test the counting bounds that apply to ``profile``.

    Bounds whose hypotheses fail are reported with a ``None`` flag instead of
    raising, since sweeps deliberately cross validity boundaries.
    """
    taus = profile.taus
    p = x[0].p
    n = len(taus)
    count = count_fast(x, profile, N).count
    total = sum(Fraction(t) if exact_fraction(t) is not None else t for t in taus)
    excess = (n + 1) - total
    flags: dict = {"lemma2_proof": None, "lemma2_statement": None, "theorem1": None, "lemma1": None}
    lower_stmt = lower_proof = upper = lemma1 = None

    if excess > 0 and all(t > 1 for t in taus):
        lower_proof = float(N) ** float(excess) / p**n - 1
        lower_stmt = float(N) ** float(excess) / p - 1
        flags["lemma2_proof"] = cmp_power(count + 1, Fraction(1, p**n), N, excess) >= 0
        flags["lemma2_statement"] = cmp_power(count + 1, Fraction(1, p), N, excess) >= 0
        const = _c1_value(n)
        upper = float(const) * float(N) ** float(excess)
        flags["theorem1"] = cmp_power(count, const, N, excess) <= 0

    if n == 1 and tau_hat is not None:
        tau = taus[0]
        if max(1, tau_hat - 1) < tau < tau_hat:
            exponent = tau_hat - tau + eps
            lemma1 = 2 * float(N) ** float(exponent)
            flags["lemma1"] = cmp_power(count, 2, N, exponent) <= 0

    return BoundReport(count, N, p, tuple(taus), lower_stmt, lower_proof, upper, lemma1, flags)


# --------------------------------------------------------------------------
# Pigeonhole constructions
# --------------------------------------------------------------------------


def _first_collision(residues, moduli, H: int, n: int, budget: int) -> tuple[int, ...]:
    """Scan ``[0, H]**(n+1)`` in lexicographic order until two points share a
    residue vector ``(x0*A_i - x_i) mod m_i``; return later minus earlier."""
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for steps, point in enumerate(itertools.product(range(H + 1), repeat=n + 1)):
        if steps > budget:
            raise InfeasibleSize(f"bucket search exceeded {budget} points")
        x0 = point[0]
        key = tuple((x0 * a - xi) % m for a, xi, m in zip(residues, point[1:], moduli))
        earlier = seen.get(key)
        if earlier is not None:
            return tuple(b - a for a, b in zip(earlier, point))
        seen[key] = point
    raise NoOverfullBucket("every bucket holds at most one point")


def pigeonhole_witness(
    x: Sequence[PadicInt], taus: Sequence[Number], N: int, *, budget: int = DEFAULT_BUCKET_BUDGET
) -> tuple[int, ...]:
    """A member of the counting set with ``q0 > 0``, built by bucketing.

    The points ``q0*x - q`` with all ``q_i`` in ``[0, N]`` are sorted into
    residue classes modulo ``p**t_i``; the first class to receive a second
    point yields the difference of that point and the class's smallest one.
    """
    profile = ApproxProfile.power(taus, STRICT)
    p = _check_points(x, profile)
    n = len(taus)
    total = sum(Fraction(t) if exact_fraction(t) is not None else t for t in taus)
    if not total < n + 1 or not all(t > 1 for t in taus):
        raise ConstraintViolation("need sum(tau) < n+1 and every tau_i > 1")
    # (N+1)^(n+1) / #buckets > p^-n N^(n+1-sum tau), so >= 1 forces a shared bucket
    if N < 2 or cmp_power(1, Fraction(1, p**n), N, n + 1 - total) > 0:
        raise NoOverfullBucket(f"N={N} is below the pigeonhole threshold p^-n N^(n+1-sum tau) >= 1")
    ts = _count_thresholds(x, profile, N)
    moduli = [p**t for t in ts]
    residues = [truncate(xi, t) for xi, t in zip(x, ts)]
    witness = _first_collision(residues, moduli, N, n, budget)
    if witness[0] <= 0 or not is_member(x, profile, N, witness):
        raise AssertionError(f"pigeonhole produced an invalid vector {witness}")
    return witness


def minkowski_solve(
    alpha: Sequence[PadicInt], taus: Sequence[Number], H: int, *, budget: int = DEFAULT_BUCKET_BUDGET
) -> tuple[int, ...]:
    """Nonzero ``(x0, ..., xn)`` with ``max |x_i| <= H`` and
    ``|x0*alpha_i - x_i|_p < p * H**-tau_i`` for every i.

    The weights must be rationals summing to exactly ``n + 1``.  Existence is
    guaranteed, so a failed search is a bug and raises AssertionError.
    """
    if H < 1:
        raise ValueError("H must be at least 1")
    exact = [exact_fraction(t) for t in taus]
    if any(t is None or t <= 0 for t in exact) or sum(exact) != len(taus) + 1:
        raise ConstraintViolation("weights must be positive rationals summing to n+1")
    p = alpha[0].p
    n = len(alpha)
    radii = [Power(H, t, scale=p) for t in exact]
    ts = [max(threshold_exponent(r, p, STRICT), 0) for r in radii]
    for a, t in zip(alpha, ts):
        if t > a.precision:
            raise InsufficientPrecision(f"need {t} digits", needed=t, have=a.precision)
    moduli = [p**t for t in ts]
    residues = [truncate(a, t) for a, t in zip(alpha, ts)]
    sol = _first_collision(residues, moduli, H, n, budget)
    assert any(sol) and max(abs(v) for v in sol) <= H
    for a, r, xi in zip(alpha, radii, sol[1:]):
        v = valuation(sol[0] * a.residue - xi, p)
        assert compare_to_radius(min(v, a.precision), p, r) < 0, "solution violates a form"
    return sol


# --------------------------------------------------------------------------
# Diophantine exponent
# --------------------------------------------------------------------------


@dataclass
class ExponentEstimate:
    tau_hat: float
    truncated: bool
    trace: list[dict]

    def to_dict(self) -> dict:
        return asdict(self)


def _min_numerators(x: PadicInt, q_max: int) -> np.ndarray:
    """``out[q0-1, k-1]`` = least ``|q|`` with ``q = q0*x (mod p**k)``, for k = 1..L."""
    p, L = x.p, x.precision
    q0 = np.arange(1, q_max + 1, dtype=np.int64)
    wide = p**L * q_max >= 2**62
    if wide:
        q0 = q0.astype(object)
    out = np.empty((q_max, L), dtype=object if wide else np.int64)
    for k in range(1, L + 1):
        m = p**k
        r = (q0 * (x.residue % m)) % m
        out[:, k - 1] = np.minimum(r, m - r)
    return out


def diophantine_exponent_estimate(
    x: Sequence[PadicInt], N_max: int, *, q_min: int = 1024, base: int = 2
) -> ExponentEstimate:
    """Running-max estimate of the Diophantine exponent over ``Q = base**k``.

    For each ``Q`` in the schedule, ``sigma(Q)`` is the largest value of
    ``sum_i log_Q(1 / |q0*x_i - q_i|_p)`` over ``0 < q0 <= Q``, ``|q_i| <= Q``;
    the per-coordinate optimum is found from least residues, so nothing
    scans the ``q_i``.  Valuations are capped at the stored precision and
    a capped optimum marks the estimate as truncated.
    """
    p = x[0].p
    schedule = []
    Q = base
    while Q <= N_max:
        if Q >= q_min:
            schedule.append(Q)
        Q *= base
    if not schedule:
        raise ValueError("schedule is empty; raise N_max or lower q_min")
    tables = [_min_numerators(xi, schedule[-1]) for xi in x]
    trace: list[dict] = []
    best = -math.inf
    truncated = False
    for Q in schedule:
        kstars = [(tab[:Q] <= Q).sum(axis=1) for tab in tables]
        total = np.sum(kstars, axis=0)
        j = int(np.argmax(total))
        sigma = float(total[j]) * math.log(p) / math.log(Q)
        capped = any(int(ks[j]) >= xi.precision for ks, xi in zip(kstars, x))
        truncated |= capped
        best = max(best, sigma)
        trace.append({"Q": Q, "sigma": sigma, "q0": j + 1, "capped": capped, "tau_hat": best})
    return ExponentEstimate(best, truncated, trace)
