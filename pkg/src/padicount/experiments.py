"""Seeded batch runs over parameter grids, written as canonical CSV.

A config names a subcommand, a grid (a list of values per parameter) and a
list of seeds.  Every (grid point, seed) pair is one run and one CSV row;
rows come out in grid order (first parameter slowest) and then seed order,
whatever the parallel width, so identical configs give identical bytes.

Row status is one of ``OK``, ``SOFT`` (a hypothesis failed or a statistical
bound missed; recorded in ``flags``), ``TIMEOUT`` (budget exhausted),
``ERROR`` (unexpected exception) or ``VIOLATION`` (a proven invariant
failed).  :func:`run` returns 2 if any row is a violation, 1 on errors and
0 otherwise.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import counting, dimension, lattice, padic, ubiquity
from .errors import InfeasibleSize, PadicountError

SUBCOMMANDS = ("count", "lattice", "dimension", "ubiquity", "exponent")

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "count": {"p": [2], "taus": [["3/2"]], "N": [2**k for k in range(6, 13)]},
    "lattice": {"p": [2], "taus": [["3/2"]], "N": [2**8, 2**10, 2**12]},
    "dimension": {"tau_d": [["5/2"], ["2", "6/5"]], "tau_m": [["3/2"], ["7/5"]]},
    "ubiquity": {"p": [2], "tau_d": [["5/2"]], "tau_m": [["7/5"]], "M": [13], "k": [1, 2]},
    "exponent": {"p": [2], "n": [1, 2], "N_max": [2**12]},
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    subcommand: str
    grid: dict[str, list] = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [0])
    budget_ops: Optional[int] = None
    budget_seconds: Optional[float] = None
    out: Optional[str] = None
    parallel: int = 1

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}; expected one of {SUBCOMMANDS}")
        if not isinstance(self.grid, dict):
            raise ConfigError("grid must be an object mapping parameter names to lists")
        merged = dict(DEFAULT_GRIDS[self.subcommand])
        for key, values in self.grid.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"grid[{key!r}] must be a non-empty list")
            merged[key] = values
        self.grid = merged
        if not self.seeds or not all(isinstance(s, int) and s >= 0 for s in self.seeds):
            raise ConfigError("seeds must be a non-empty list of non-negative integers")
        if self.budget_ops is not None and (not isinstance(self.budget_ops, int) or self.budget_ops < 1):
            raise ConfigError("budget_ops must be a positive integer")
        if not isinstance(self.parallel, int) or self.parallel < 1:
            raise ConfigError("parallel must be a positive integer")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        allowed = {"subcommand", "grid", "seeds", "budgets", "budget_ops", "budget_seconds", "out", "parallel"}
        extra = set(data) - allowed
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "subcommand" not in data:
            raise ConfigError("config needs a subcommand")
        budgets = data.get("budgets", {})
        return cls(
            subcommand=data["subcommand"],
            grid=data.get("grid", {}),
            seeds=data.get("seeds", [0]),
            budget_ops=data.get("budget_ops", budgets.get("ops")),
            budget_seconds=data.get("budget_seconds", budgets.get("seconds")),
            out=data.get("out"),
            parallel=data.get("parallel", 1),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            # decimals are read as exact fractions: 1.4 means 7/5
            data = json.loads(Path(path).read_text(), parse_float=Fraction)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def points(self) -> list[dict]:
        keys = list(self.grid)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(self.grid[k] for k in keys))]


def derived_seed(seed: int, point_index: int) -> int:
    """Stream for one run: the user seed split by the grid point's position."""
    ss = np.random.SeedSequence(seed, spawn_key=(point_index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# --------------------------------------------------------------------------
# Per-subcommand runners.  Each returns (fields, flags, violations).
# --------------------------------------------------------------------------


def _taus(values) -> tuple:
    return tuple(dimension.as_number(v) for v in values)


def _run_count(params: dict, rng_seed: int, budget_ops: Optional[int]):
    p, N = int(params["p"]), int(params["N"])
    taus = _taus(params["taus"])
    profile = counting.ApproxProfile.power(taus)
    x = padic.random_padic_vector(p, int(params.get("precision", 64)), len(taus), rng_seed)
    report = counting.evaluate_bounds(x, profile, N)
    fields: dict[str, Any] = {"count": report.count, "thresholds": profile.thresholds(N, p)}
    flags, violations = [], []
    brute_budget = budget_ops or counting.DEFAULT_BRUTE_BUDGET
    if N * (2 * N + 1) ** len(taus) <= brute_budget:
        brute = counting.count_brute(x, profile, N).count
        fields["count_brute"] = brute
        if brute != report.count:
            violations.append("FAST_NE_BRUTE")
    else:
        fields["count_brute"] = None
    fields["lower_bound"] = report.lemma2_lower_proof
    fields["upper_bound"] = report.theorem1_upper
    for name in ("lemma2_proof", "lemma2_statement", "theorem1"):
        fields[name] = report.status(name)
    if report.flags["lemma2_proof"] is None:
        flags.append("CONSTRAINT_VIOLATION")
    if report.flags["lemma2_proof"] is False:
        violations.append("LOWER_BOUND_FAILED")
    if report.flags["lemma2_statement"] is False:
        flags.append("STATEMENT_LOWER_MISSED")
    if report.flags["theorem1"] is False:
        flags.append("UPPER_BOUND_EXCEEDED")
    return fields, flags, violations


def _run_lattice(params: dict, rng_seed: int, budget_ops: Optional[int]):
    p, N = int(params["p"]), int(params["N"])
    taus = _taus(params["taus"])
    n = len(taus)
    profile = counting.ApproxProfile.power(taus)
    x = padic.random_padic_vector(p, int(params.get("precision", 96)), n, rng_seed)
    budget = budget_ops or lattice.DEFAULT_ENUM_BUDGET
    lat = lattice.build_lattice(x, profile, N)
    flags, violations = [], []
    det_ok = lat.det == math.prod(lat.moduli)
    lo_ok, hi_ok = lattice.det_bounds_hold(lat, profile, N)
    if not (det_ok and lo_ok and hi_ok):
        violations.append("DETERMINANT")
    minima = lattice.successive_minima(lat, budget=budget)
    lam1_sq = minima.lambdas_sq[0]
    fields: dict[str, Any] = {"t": lat.t, "det": lat.det, "lambdas": minima.lambdas}
    for label, r2 in (("lambda1", lam1_sq), ("2lambda1", 4 * lam1_sq), ("sqrtnN", n * N * N)):
        rep = lattice.verify_geometry(lat, radius_sq=r2, minima=minima, budget=budget)
        fields[f"count_{label}"] = rep.count
        if not rep.ok:
            violations.append(f"GEOMETRY_{label}")
    l1 = lattice.check_lambda1_bounds(lat, profile, N, Fraction(params.get("eps", Fraction(1, 10))), minima=minima)
    fields.update(lambda1_upper=l1.upper_bound, lambda1_lower=l1.lower_bound, lower_ok=l1.lower_ok)
    if not l1.upper_ok:
        violations.append("LAMBDA1_UPPER")
    if l1.lower_applicable and not l1.lower_ok:
        flags.append("LAMBDA1_LOWER_MISSED")
    return fields, flags, violations


def _run_dimension(params: dict, rng_seed: int, budget_ops: Optional[int]):
    split = dimension.WeightSplit(tuple(params["tau_d"]), tuple(params["tau_m"]))
    fields: dict[str, Any] = {"n": split.n, "d": split.d, "m": split.m}
    flags, violations = [], []
    try:
        closed = dimension.theorem2_dimension(split)
        via = dimension.dimension_via_transference(split)
    except PadicountError as exc:
        fields.update(s_closed_form=None, s_mtprr=None, s_empirical=None)
        return fields, [exc.code], []
    fields.update(s_closed_form=closed, s_mtprr=via)
    if isinstance(closed, float) or isinstance(via, float):
        if abs(float(closed) - float(via)) >= 1e-12:
            violations.append("CLOSED_FORM_NE_TRANSFERENCE")
    elif closed != via:
        violations.append("CLOSED_FORM_NE_TRANSFERENCE")
    K_max = params.get("K_max")
    if K_max:
        p = int(params.get("p", 2))
        alpha = padic.random_padic_vector(p, int(params.get("precision", 96)), split.m, rng_seed)
        est = dimension.cover_critical_exponent(alpha, split, int(K_max))
        fields["s_empirical"] = est.s
        flags += est.flags
    else:
        fields["s_empirical"] = None
    return fields, flags, violations


def _run_ubiquity(params: dict, rng_seed: int, budget_ops: Optional[int]):
    p = int(params["p"])
    split = dimension.WeightSplit(tuple(params["tau_d"]), tuple(params["tau_m"]))
    alpha = padic.random_padic_vector(p, int(params.get("precision", 48)), split.m, rng_seed)
    ball = None
    if params.get("ball_levels"):
        ball = ubiquity.Ball(p, tuple(params["ball_levels"]), tuple(params.get("ball_center", [0] * split.d)))
    rep = ubiquity.ubiquity_density_check(
        alpha, split, int(params["M"]), int(params["k"]), ball, budget=budget_ops or ubiquity.DEFAULT_BALL_BUDGET
    )
    fields = rep.row()
    fields.pop("p")
    violations = [] if 0 <= rep.density <= 1 else ["DENSITY_OUT_OF_RANGE"]
    return fields, ([] if rep.passed else ["DENSITY_BELOW_C"]), violations


def _run_exponent(params: dict, rng_seed: int, budget_ops: Optional[int]):
    p, n = int(params["p"]), int(params["n"])
    x = padic.random_padic_vector(p, int(params.get("precision", 64)), n, rng_seed)
    est = counting.diophantine_exponent_estimate(x, int(params["N_max"]), q_min=int(params.get("q_min", 1024)))
    flags = ["TRUNCATED"] if est.truncated else []
    return {"tau_hat": est.tau_hat, "truncated": est.truncated}, flags, []


RUNNERS: dict[str, Callable] = {
    "count": _run_count,
    "lattice": _run_lattice,
    "dimension": _run_dimension,
    "ubiquity": _run_ubiquity,
    "exponent": _run_exponent,
}


def run_one(subcommand: str, index: int, params: dict, seed: int, budget_ops, deadline) -> dict:
    row: dict[str, Any] = {"subcommand": subcommand, "point": index, "seed": seed}
    row.update({k: params[k] for k in params})
    if deadline is not None and time.time() > deadline:
        row.update(status="TIMEOUT", flags="TIMEOUT")
        return row
    try:
        fields, flags, violations = RUNNERS[subcommand](params, derived_seed(seed, index), budget_ops)
    except InfeasibleSize as exc:
        row.update(status="TIMEOUT", flags=f"TIMEOUT {exc.code}")
        return row
    except PadicountError as exc:
        row.update(status="SOFT", flags=exc.code)
        return row
    except Exception as exc:  # noqa: BLE001 - recorded, reported via exit code
        row.update(status="ERROR", flags=f"ERROR {type(exc).__name__}")
        return row
    row.update(fields)
    if violations:
        status = "VIOLATION"
    elif flags:
        status = "SOFT"
    else:
        status = "OK"
    row["status"] = status
    row["flags"] = " ".join(violations + flags)
    return row


def _run_packed(args):
    return run_one(*args)


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, (list, tuple)):
        return " ".join(format_value(x) for x in v)
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    # status and flags last, for readability
    columns = [c for c in columns if c not in ("status", "flags")] + ["status", "flags"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


@dataclass
class RunResult:
    rows: list[dict]
    csv: str
    exit_code: int


def execute(config: ExperimentConfig) -> RunResult:
    jobs = []
    deadline = time.time() + config.budget_seconds if config.budget_seconds else None
    for index, params in enumerate(config.points()):
        for seed in config.seeds:
            jobs.append((config.subcommand, index, params, seed, config.budget_ops, deadline))
    if config.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.parallel) as pool:
            rows = list(pool.map(_run_packed, jobs, chunksize=max(1, len(jobs) // (4 * config.parallel))))
    else:
        rows = [_run_packed(job) for job in jobs]
    statuses = {row["status"] for row in rows}
    code = 2 if "VIOLATION" in statuses else (1 if "ERROR" in statuses else 0)
    return RunResult(rows, rows_to_csv(rows), code)


def run(config: ExperimentConfig) -> int:
    """Execute ``config``, write its CSV to ``config.out`` (if set) and return the exit code."""
    result = execute(config)
    if config.out:
        out = Path(config.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(result.csv)
    return result.exit_code
