"""
Convergence studies: run the solver over a list of N, compare against the exact
solution when one is known, attach rate constants, serialize the report and judge
it against the reference tables.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.contour import theoretical_rate
from src.exceptions import InvalidConfigError, NonlocalEvolveError
from src.models import ConvergenceReport, ReportRow, StepRule, StudyConfig
from src.node_pool import NodePool
from src.presets import (
    REFERENCE_TABLES,
    RESIDUAL_N,
    RESIDUAL_PHI,
    Problem,
    build_problem,
    example_problem,
)
from src.solver_hom import estimate_rate_constant, make_plan
from src.solver_inhom import nonlocal_residual, solve_full
from src.symbol import check_solvability

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["N", "value_re", "error", "rate_c", "floor_flag"]
FLOAT_FORMAT = "%.16e"
FLOOR_FACTOR = 100.0

EXAMPLE1_FACTOR = 3.0
EXAMPLE1_FLOOR = 1e-12
EXAMPLE1_RATE_BAND = (1.3, 1.7)
EXAMPLE1_RATE_ROWS = (16, 32, 64, 128)
EXAMPLE2_TARGET = -1.92907820e-2
EXAMPLE2_TOL = 1e-6
EXAMPLE2_STABLE_TOL = 1e-7
EXAMPLE2_SLACK = 1e-11
EXAMPLE3_FACTOR = 10.0
EXAMPLE3_MIN_RATE = 1.0
RESIDUAL_TOL = 1e-6


@dataclass
class AcceptanceCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class AcceptanceResult:
    example_id: int
    checks: List[AcceptanceCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(AcceptanceCheck(name=name, passed=bool(passed), detail=detail))


def resolve_problem(cfg: StudyConfig) -> Problem:
    if cfg.example_id in (1, 2, 3):
        return example_problem(cfg.example_id)
    return build_problem(cfg.problem)


def run_study(cfg: StudyConfig, problem: Optional[Problem] = None) -> ConvergenceReport:
    """One row per N; solver failures are recorded in the row and the study goes on"""
    problem = problem or resolve_problem(cfg)
    model = problem.model
    alpha = cfg.alpha if cfg.alpha is not None else problem.alpha
    pool = NodePool(cfg.threads)

    logger.info(f"Study {problem.name}: N={cfg.N_list}, x={cfg.x}, t={cfg.t}, mode={cfg.mode.value}")
    rows: List[ReportRow] = []
    for N in cfg.N_list:
        try:
            plan = make_plan(model.spec, alpha, N, cfg.mode, cfg.c1, problem.nl)
            vector = solve_full(plan, model, problem.nl, problem.u0, problem.source, cfg.t,
                                pool=pool, force=cfg.force)
            value = model.evaluate(vector, cfg.x).real
        except NonlocalEvolveError as e:
            logger.error(f"Row N={N} failed: {e}")
            rows.append(ReportRow(N=N, value=None, note=str(e)))
            continue

        error = None
        floor_flag = False
        if problem.exact is not None:
            error = abs(value - problem.exact(cfg.x, cfg.t))
            floor_flag = error <= FLOOR_FACTOR * np.finfo(float).eps * abs(value)
        logger.info(f"N={N}: value={value:.16e}" + (f", error={error:.6e}" if error is not None else ""))
        rows.append(ReportRow(N=N, value=value, error=error, floor_flag=floor_flag))

    _attach_rates(rows)
    report = ConvergenceReport(rows=rows, metadata=_metadata(cfg, problem, alpha))
    if cfg.output_path:
        write_report(report, cfg.output_path, cfg.format)
    return report


def _attach_rates(rows: List[ReportRow]) -> None:
    for current, following in zip(rows, rows[1:]):
        if current.error is None or following.error is None:
            continue
        if current.floor_flag or following.floor_flag:
            continue
        scale = abs(current.value) if current.value else 1.0
        estimate = estimate_rate_constant([(current.N, current.error), (following.N, following.error)],
                                          scale=scale)[0]
        if estimate.valid:
            current.rate_c = estimate.c


def _metadata(cfg: StudyConfig, problem: Problem, alpha: float) -> Dict[str, Any]:
    spec = problem.model.spec
    metadata: Dict[str, Any] = {
        "example_id": cfg.example_id,
        "problem": problem.name,
        "x": cfg.x,
        "t": cfg.t,
        "mode": cfg.mode.value,
        "c1": cfg.c1,
        "alpha": alpha,
        "rho0": spec.rho0,
        "phi": spec.phi,
        "rho1": spec.rho1,
        "verdict": check_solvability(problem.nl, spec).value,
    }
    try:
        metadata["theoretical_rate"] = theoretical_rate(spec, alpha)
    except NonlocalEvolveError as e:
        logger.warning(f"No theoretical rate: {e}")
    return metadata


def _format_float(value: Optional[float]) -> Optional[str]:
    if value is None or not math.isfinite(value):
        return None
    return format(value, ".16e")


def report_frame(report: ConvergenceReport) -> pd.DataFrame:
    records = [
        {"N": r.N, "value_re": r.value, "error": r.error, "rate_c": r.rate_c, "floor_flag": r.floor_flag}
        for r in report.rows
    ]
    frame = pd.DataFrame(records, columns=REPORT_COLUMNS)
    frame["N"] = frame["N"].astype(int)
    frame["floor_flag"] = frame["floor_flag"].astype(bool)
    for column in ("value_re", "error", "rate_c"):
        frame[column] = frame[column].astype(float).replace([np.inf, -np.inf], np.nan)
    return frame


def metadata_path(path) -> Path:
    """example-1.csv -> example-1.meta.json"""
    return Path(path).with_suffix(".meta.json")


def write_report(report: ConvergenceReport, path: str, fmt: str = "csv") -> Path:
    """Overwrite path with the report rows in csv or jsonl, and the metadata next to it"""
    if fmt not in ("csv", "jsonl"):
        raise InvalidConfigError(f"Unknown report format: {fmt!r}")
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        report_frame(report).to_csv(out, index=False, float_format=FLOAT_FORMAT, na_rep="")
    else:
        with open(out, "w", encoding="utf-8") as f:
            for r in report.rows:
                tokens = {
                    "N": str(r.N),
                    "value_re": _format_float(r.value),
                    "error": _format_float(r.error),
                    "rate_c": _format_float(r.rate_c),
                    "floor_flag": "true" if r.floor_flag else "false",
                }
                body = ", ".join(f'"{k}": {v if v is not None else "null"}' for k, v in tokens.items())
                f.write("{" + body + "}\n")
    meta = metadata_path(out)
    meta.write_text(report.metadata_json() + "\n", encoding="utf-8")
    logger.info(f"Wrote {out}")
    return out


def _optional(value: Any) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return None if math.isnan(value) else value


def read_report(path: str, fmt: str = "csv") -> ConvergenceReport:
    rows: List[ReportRow] = []
    if fmt == "csv":
        frame = pd.read_csv(path, float_precision="round_trip")
        for record in frame.to_dict(orient="records"):
            rows.append(ReportRow(
                N=int(record["N"]),
                value=_optional(record["value_re"]),
                error=_optional(record["error"]),
                rate_c=_optional(record["rate_c"]),
                floor_flag=bool(record["floor_flag"]),
            ))
    elif fmt == "jsonl":
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                record = json.loads(line)
                rows.append(ReportRow(
                    N=int(record["N"]),
                    value=_optional(record["value_re"]),
                    error=_optional(record["error"]),
                    rate_c=_optional(record["rate_c"]),
                    floor_flag=bool(record["floor_flag"]),
                ))
    else:
        raise InvalidConfigError(f"Unknown report format: {fmt!r}")
    return ConvergenceReport(rows=rows)


def _check_error_rows(result: AcceptanceResult, report: ConvergenceReport, table: Dict[int, float],
                      factor: float, rows) -> None:
    for n in rows:
        row = report.row(n)
        if row is None or row.error is None:
            result.add(f"N={n} error", False, "row missing or failed")
            continue
        limit = factor * table[n]
        result.add(f"N={n} error", row.error <= limit, f"{row.error:.3e} <= {limit:.3e}")


def evaluate_acceptance(example_id: int, report: ConvergenceReport) -> AcceptanceResult:
    """
    Tolerances against the reference tables. Error checks are upper bounds: rows
    more accurate than the reference ones pass.
    """
    result = AcceptanceResult(example_id=example_id)
    table = REFERENCE_TABLES.get(example_id)
    if table is None:
        raise InvalidConfigError(f"No reference table for example {example_id!r}")

    if example_id == 1:
        _check_error_rows(result, report, table, EXAMPLE1_FACTOR, [4, 8, 16, 32, 64, 128, 256])
        last = report.row(512)
        if last is not None and last.error is not None:
            result.add("N=512 error", last.error <= EXAMPLE1_FLOOR, f"{last.error:.3e} <= {EXAMPLE1_FLOOR:g}")
        else:
            result.add("N=512 error", False, "row missing or failed")
        low, high = EXAMPLE1_RATE_BAND
        for n in EXAMPLE1_RATE_ROWS:
            row = report.row(n)
            c = row.rate_c if row is not None else None
            result.add(f"rate c at N={n}", c is not None and low <= c <= high,
                       f"c={c:.4f}" if c is not None else "no valid pair")

    elif example_id == 2:
        values = {r.N: r.value for r in report.rows if r.value is not None}
        v256 = values.get(256)
        result.add("value at N=256", v256 is not None and abs(v256 - EXAMPLE2_TARGET) <= EXAMPLE2_TOL,
                   f"{v256!r} vs {EXAMPLE2_TARGET}")
        ns = sorted(n for n in values if n >= 16)
        diffs = [(n, abs(values[b] - values[n])) for n, b in zip(ns, ns[1:]) if b == 2 * n]
        monotone = all(d2 <= d1 + EXAMPLE2_SLACK for (_, d1), (_, d2) in zip(diffs, diffs[1:]))
        result.add("successive differences non-increasing", monotone and len(diffs) >= 2,
                   ", ".join(f"{n}:{d:.2e}" for n, d in diffs))
        v512 = values.get(512)
        stable = v256 is not None and v512 is not None and abs(v256 - v512) <= EXAMPLE2_STABLE_TOL
        result.add("N=256 agrees with N=512", stable,
                   f"|diff|={abs(v256 - v512):.2e}" if v256 is not None and v512 is not None else "missing rows")

    elif example_id == 3:
        _check_error_rows(result, report, table, EXAMPLE3_FACTOR, [4, 8, 16, 32, 64, 128, 256])
        c = report.fitted_rate()
        result.add("fitted rate", c is not None and c >= EXAMPLE3_MIN_RATE,
                   f"c={c:.4f}" if c is not None else "not enough rows")

    return result


def residual_check(example_id: int, N: int = RESIDUAL_N, pool: Optional[NodePool] = None) -> AcceptanceCheck:
    """max-norm of u_N(0) + sum alpha_k u_N(t_k) - u0 on the residual contour, uniform rule"""
    problem = example_problem(example_id, phi=RESIDUAL_PHI)
    plan = make_plan(problem.model.spec, problem.alpha, N, StepRule.UNIFORM, nl=problem.nl)
    residual = nonlocal_residual(plan, problem.model, problem.nl, problem.u0, problem.source, pool=pool)
    logger.info(f"Example {example_id}: nonlocal residual {residual:.3e} at N={N}")
    return AcceptanceCheck(name=f"nonlocal residual at N={N}", passed=residual <= RESIDUAL_TOL,
                           detail=f"{residual:.3e} <= {RESIDUAL_TOL:g}")
