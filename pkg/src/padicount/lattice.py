"""p-adic approximation lattices and their geometry.

For a point ``x`` in Z_p^n and an approximation profile at level ``N`` the
lattice holds the integer vectors ``(a0, ..., an)`` with
``|a0*x_i - a_i|_p <= psi_i(N)``.  With ``t_i`` the NON_STRICT threshold
and ``X_i = x_i mod p**t_i`` it has the triangular basis

    (1, X_1, ..., X_n),  p**t_1 * e_1,  ...,  p**t_n * e_n.

Points are enumerated exactly, successive minima come from a greedy
independent selection over norm-sorted points, and the Minkowski,
Blichfeldt and Henk inequalities are checked with interval arithmetic so a
reported failure is never a rounding artefact.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath import iv

from ._exact import cmp_power, exact_fraction, to_mpf
from .counting import ApproxProfile, c2
from .errors import InfeasibleSize, InsufficientPrecision, ThresholdNonpositive
from .padic import PadicInt, Power, ThresholdMode, truncate

DEFAULT_ENUM_BUDGET = 5 * 10**6
iv.dps = 50


@dataclass(frozen=True)
class ApproxLattice:
    p: int
    t: tuple[int, ...]
    X: tuple[int, ...]

    def __post_init__(self):
        if len(self.t) != len(self.X):
            raise ValueError("t and X must have the same length")
        if any(ti < 1 for ti in self.t):
            raise ThresholdNonpositive("thresholds must be positive")
        if any(not 0 <= Xi < self.p**ti for Xi, ti in zip(self.X, self.t)):
            raise ValueError("truncations must satisfy 0 <= X_i < p**t_i")

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**ti for ti in self.t)

    @property
    def basis(self) -> list[list[int]]:
        """Basis matrix with the generators as columns."""
        k = self.n + 1
        rows = [[0] * k for _ in range(k)]
        rows[0][0] = 1
        for i in range(self.n):
            rows[i + 1][0] = self.X[i]
            rows[i + 1][i + 1] = self.moduli[i]
        return rows

    @property
    def det(self) -> int:
        return int_det(self.basis)

    def contains(self, v: Sequence[int]) -> bool:
        """Congruence test: ``v_i = v_0 * X_i (mod p**t_i)`` for every i."""
        return all((v[0] * Xi - vi) % m == 0 for Xi, vi, m in zip(self.X, v[1:], self.moduli))

    def contains_via_basis(self, v: Sequence[int]) -> bool:
        """Solve ``B c = v`` by forward substitution and test integrality of ``c``."""
        B = self.basis
        k = self.n + 1
        c: list[Fraction] = []
        for i in range(k):
            acc = Fraction(v[i]) - sum(B[i][j] * c[j] for j in range(i))
            ci = acc / B[i][i]
            if ci.denominator != 1:
                return False
            c.append(ci)
        return True

    def to_dict(self) -> dict:
        return {"p": self.p, "t": list(self.t), "X": list(self.X)}

    @classmethod
    def from_dict(cls, data: dict) -> "ApproxLattice":
        return cls(int(data["p"]), tuple(data["t"]), tuple(data["X"]))


def int_det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (Bareiss elimination)."""
    a = [list(map(int, r)) for r in rows]
    k = len(a)
    sign, prev = 1, 1
    for i in range(k - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if a[r][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[-1][-1]


class RowSpace:
    """Incrementally maintained echelon basis over Q, for exact rank tests."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[tuple[int, list[Fraction]]] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Sequence[int]) -> list[Fraction]:
        w = [Fraction(c) for c in v]
        for pivot, row in self.rows:
            if w[pivot]:
                f = w[pivot]
                w = [a - f * b for a, b in zip(w, row)]
        return w

    def add(self, v: Sequence[int]) -> bool:
        w = self.reduce(v)
        pivot = next((i for i, c in enumerate(w) if c), None)
        if pivot is None:
            return False
        lead = w[pivot]
        self.rows.append((pivot, [c / lead for c in w]))
        return True


def int_rank(vectors: Sequence[Sequence[int]]) -> int:
    if not vectors:
        return 0
    space = RowSpace(len(vectors[0]))
    for v in vectors:
        space.add(v)
    return space.rank


def build_lattice(x: Sequence[PadicInt], profile: ApproxProfile, N: int) -> ApproxLattice:
    """The approximation lattice of ``x`` at level ``N`` (closed-ball thresholds)."""
    p = x[0].p
    ts = profile.thresholds(N, p, ThresholdMode.NON_STRICT)
    if any(t < 1 for t in ts):
        raise ThresholdNonpositive(f"thresholds {ts}: some psi_i(N) >= 1")
    for xi, t in zip(x, ts):
        if t > xi.precision:
            raise InsufficientPrecision(f"need {t} digits", needed=t, have=xi.precision)
    return ApproxLattice(p, tuple(ts), tuple(truncate(xi, t) for xi, t in zip(x, ts)))


def _psi_product(profile: ApproxProfile, N: int):
    """``prod psi_i(N)`` as ``(coef, exponent)`` meaning ``coef * N**-exponent``."""
    coef, exponent = Fraction(1), Fraction(0)
    exact = True
    for i in range(profile.n):
        psi = profile.psi(i, N)
        if isinstance(psi, Power):
            e = exact_fraction(psi.exponent)
            if e is None:
                exact = False
                e = psi.exponent
            exponent = exponent + e
            coef *= Fraction(psi.scale)
        else:
            coef *= psi
    return coef, (exponent if exact else float(exponent))


def det_bounds_hold(lattice: ApproxLattice, profile: ApproxProfile, N: int) -> tuple[bool, bool]:
    """Exact check of ``1/prod(psi) <= det <= p**n / prod(psi)``."""
    coef, e = _psi_product(profile, N)
    det = lattice.det
    # det * coef * N**-e >= 1  <=>  det * coef >= N**e
    lower = cmp_power(det * coef, 1, N, e) >= 0
    upper = cmp_power(det * coef, lattice.p**lattice.n, N, e) <= 0
    return lower, upper


def _radius_sq(radius, radius_sq) -> Fraction:
    if radius_sq is not None:
        return Fraction(radius_sq)
    if radius is None:
        raise ValueError("give radius or radius_sq")
    r = exact_fraction(radius)
    return (r if r is not None else Fraction(radius)) ** 2


def _floor_sqrt(q: Fraction) -> int:
    return math.isqrt(q.numerator // q.denominator) if q >= 0 else -1


def enumeration_cost(lattice: ApproxLattice, radius_sq: Fraction) -> int:
    R = _floor_sqrt(Fraction(radius_sq))
    cost = 2 * R + 1
    for m in lattice.moduli:
        cost *= 2 * R // m + 2
    return cost


def enumerate_points(
    lattice: ApproxLattice,
    radius=None,
    *,
    radius_sq=None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> list[tuple[int, ...]]:
    """Every lattice vector with euclidean norm at most ``radius``.

    Vectors are parametrised as ``(q0, q0*X_i + k_i*p**t_i)``, so each is
    produced once.  Output is sorted by squared norm, then lexicographically.
    Pass ``radius_sq`` for radii that are square roots (e.g. a minimum).
    """
    R2 = _radius_sq(radius, radius_sq)
    if R2 < 0:
        return []
    if enumeration_cost(lattice, R2) > budget:
        raise InfeasibleSize(f"enumeration cost {enumeration_cost(lattice, R2)} exceeds {budget}")
    out: list[tuple[int, ...]] = []
    R = _floor_sqrt(R2)
    n, X, moduli = lattice.n, lattice.X, lattice.moduli

    def extend(q0: int, i: int, prefix: list[int], rem: Fraction):
        if i == n:
            out.append((q0, *prefix))
            return
        m = moduli[i]
        bound = _floor_sqrt(rem)
        lo = -bound
        q = lo + ((q0 * X[i] - lo) % m)
        while q <= bound:
            prefix.append(q)
            extend(q0, i + 1, prefix, rem - q * q)
            prefix.pop()
            q += m

    for q0 in range(-R, R + 1):
        extend(q0, 0, [], R2 - q0 * q0)
    out.sort(key=lambda v: (sum(c * c for c in v), v))
    return out


@dataclass
class MinimaProfile:
    lambdas_sq: tuple[int, ...]
    witnesses: tuple[tuple[int, ...], ...]
    radius_sq: Fraction

    @property
    def lambdas(self) -> tuple[float, ...]:
        return tuple(math.sqrt(v) for v in self.lambdas_sq)

    def to_dict(self) -> dict:
        return {
            "lambdas": list(self.lambdas),
            "lambdas_sq": list(self.lambdas_sq),
            "witnesses": [list(w) for w in self.witnesses],
            "radius_sq": str(self.radius_sq),
        }


def successive_minima(lattice: ApproxLattice, *, budget: int = DEFAULT_ENUM_BUDGET) -> MinimaProfile:
    """Euclidean successive minima with witnesses.

    Enumerate within a radius, walk the nonzero points in (norm, lexicographic)
    order and keep each point independent of those already kept; double the
    radius until ``n + 1`` points are kept.  Starts at ``det**(1/(n+1))``.
    """
    k = lattice.n + 1
    R2 = Fraction(math.ceil(lattice.det ** (2 / k)))
    while True:
        if enumeration_cost(lattice, R2) > budget:
            raise InfeasibleSize(f"radius^2 {R2} needed before reaching rank {k}")
        space = RowSpace(k)
        kept: list[tuple[int, ...]] = []
        for v in enumerate_points(lattice, radius_sq=R2, budget=budget):
            if any(v) and space.add(v):
                kept.append(v)
                if len(kept) == k:
                    return MinimaProfile(
                        tuple(sum(c * c for c in w) for w in kept), tuple(kept), R2
                    )
        R2 *= 4


# --------------------------------------------------------------------------
# Geometry checks
# --------------------------------------------------------------------------


def unit_ball_volume(k: int) -> tuple[Fraction, int]:
    """Volume of the unit ball in R^k as ``(rational, j)`` meaning ``rational * pi**j``."""
    m = k // 2
    if k % 2 == 0:
        return Fraction(1, math.factorial(m)), m
    return Fraction(2 * math.factorial(m) * 4**m, math.factorial(k)), m


def _ball_volume_iv(k: int, radius_sq: Fraction):
    rational, j = unit_ball_volume(k)
    vol = iv.mpf(rational.numerator) / rational.denominator * iv.pi**j
    r2 = iv.mpf(radius_sq.numerator) / radius_sq.denominator
    vol = vol * r2 ** (k // 2)
    if k % 2:
        vol = vol * iv.sqrt(r2)
    return vol


def _iv_of(x):
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / x.denominator
    return iv.mpf(x)


def _hi(x) -> mpmath.mpf:
    return mpmath.mpf(x.b)


def _lo(x) -> mpmath.mpf:
    return mpmath.mpf(x.a)


@dataclass
class GeometryReport:
    radius_sq: Fraction
    count: int
    rank: int
    det: int
    lambdas: tuple[float, ...]
    minkowski_ok: bool
    blichfeldt_ok: bool
    blichfeldt_applicable: bool
    henk_ok: bool
    bounds: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.minkowski_ok and self.blichfeldt_ok and self.henk_ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radius_sq"] = str(self.radius_sq)
        return d


def minkowski_holds(lattice: ApproxLattice, minima: MinimaProfile) -> tuple[bool, float]:
    """``vol(B_{n+1}) * prod(lambda_i) <= 2**(n+1) * det``; violation only if certain."""
    k = lattice.n + 1
    lhs = _ball_volume_iv(k, Fraction(1))
    for s in minima.lambdas_sq:
        lhs = lhs * iv.sqrt(iv.mpf(s))
    rhs = 2**k * lattice.det
    return not (_lo(lhs) > rhs), float(_hi(lhs))


def verify_geometry(
    lattice: ApproxLattice,
    radius=None,
    *,
    radius_sq=None,
    minima: Optional[MinimaProfile] = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> GeometryReport:
    """Count ``Lambda ∩ B(0, R)`` and test Minkowski, Blichfeldt and Henk.

    Both counting theorems are applied in the lattice's own dimension
    ``n + 1``.  Blichfeldt needs the intersection to have full rank; when it
    does not, the check is marked inapplicable and passes.
    """
    R2 = _radius_sq(radius, radius_sq)
    minima = minima or successive_minima(lattice, budget=budget)
    points = enumerate_points(lattice, radius_sq=R2, budget=budget)
    k = lattice.n + 1
    count = len(points)
    rank = int_rank([v for v in points if any(v)])
    det = lattice.det

    mink_ok, mink_lhs = minkowski_holds(lattice, minima)

    blich_rhs = math.factorial(k) * _ball_volume_iv(k, R2) / det + k
    blich_applicable = rank == k
    blich_ok = (not blich_applicable) or count <= _hi(blich_rhs)

    henk_rhs = 2 ** (k - 1)
    for s in minima.lambdas_sq:
        # floor(2R/lambda + 1) = 1 + floor(sqrt(4 R^2 / lambda^2))
        henk_rhs *= 1 + _floor_sqrt(4 * R2 / s)
    henk_ok = count < henk_rhs

    bounds = {
        "minkowski_lhs": mink_lhs,
        "minkowski_rhs": float(2**k * det),
        "blichfeldt": float(_hi(blich_rhs)),
        "henk": henk_rhs,
    }
    return GeometryReport(
        R2, count, rank, det, minima.lambdas, mink_ok, bool(blich_ok), blich_applicable, henk_ok, bounds
    )


@dataclass
class Lambda1Report:
    lambda1: float
    upper_bound: float
    lower_bound: float
    upper_ok: bool
    lower_ok: bool
    lower_applicable: bool

    def to_dict(self) -> dict:
        return asdict(self)


def check_lambda1_bounds(
    lattice: ApproxLattice,
    profile: ApproxProfile,
    N: int,
    eps=Fraction(1, 10),
    *,
    minima: Optional[MinimaProfile] = None,
) -> Lambda1Report:
    """Test ``P**-(1/(n+1) - eps) <= lambda_1 <= C2 * P**(-1/(n+1))`` with ``P = prod psi_i(N)``.

    The upper inequality follows from Minkowski and must always hold; the
    lower one needs a generic point and a large N, so it is only reported.
    """
    minima = minima or successive_minima(lattice)
    n, p = lattice.n, lattice.p
    k = n + 1
    lam_sq = minima.lambdas_sq[0]
    coef, e = _psi_product(profile, N)

    with mpmath.workdps(50):
        log_P = mpmath.log(coef.numerator) - mpmath.log(coef.denominator) - to_mpf(e) * mpmath.log(N)
        upper = c2(n, p) * float(mpmath.exp(-log_P / k))
        lower_exp = mpmath.mpf(1) / k - to_mpf(Fraction(eps) if not isinstance(eps, float) else eps)
        lower = float(mpmath.exp(-log_P * lower_exp))
        lower_ok = mpmath.log(lam_sq) / 2 >= -log_P * lower_exp
        lower_applicable = bool(log_P < -n * mpmath.log(N))

    # lambda_1^k * vol(B_k) * P <= 2^k p^n, evaluated with outward rounding
    P_iv = iv.mpf(coef.numerator) / coef.denominator * iv.exp(-_iv_of(e) * iv.log(N))
    lhs = iv.sqrt(iv.mpf(lam_sq)) ** k * _ball_volume_iv(k, Fraction(1)) * P_iv
    upper_ok = not (_lo(lhs) > 2**k * p**n)
    return Lambda1Report(math.sqrt(lam_sq), upper, lower, upper_ok, bool(lower_ok), lower_applicable)
