"""Scenario execution behind the CLI: single runs with per-branch
reports, and parameter sweeps emitting deterministic CSV.

CSV contract: fixed column order (param_value, avg_neg_round1,
avg_neg_round2, paper_formula_round1, paper_formula_round2,
max_branch_negativity), header row, '.' decimal separator, every value
printed with 15 significant digits, newline-terminated rows.  Rows are
written in grid order regardless of how many workers evaluated them, so
output is byte-stable across runs.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classify import classify_element, verdict_label
from .config import ScenarioConfig
from .engine import ALL_BRANCHES, SwapScenario, average_negativity, chain
from .errors import ConfigError
from .tolerances import PROB_TOL

__all__ = ["SweepRow", "run_scenario", "run_sweep", "sweep_rows", "worker_count"]

CSV_COLUMNS = (
    "param_value",
    "avg_neg_round1",
    "avg_neg_round2",
    "paper_formula_round1",
    "paper_formula_round2",
    "max_branch_negativity",
)


def _fmt(x: float) -> str:
    return format(float(x), ".15g")


@dataclass(frozen=True)
class SweepRow:
    param_value: float
    avg_neg_round1: float
    avg_neg_round2: float
    paper_formula_round1: float
    paper_formula_round2: float
    max_branch_negativity: float

    def as_csv(self) -> str:
        return ",".join(
            _fmt(v)
            for v in (
                self.param_value,
                self.avg_neg_round1,
                self.avg_neg_round2,
                self.paper_formula_round1,
                self.paper_formula_round2,
                self.max_branch_negativity,
            )
        )


def worker_count(grid_size: int) -> int:
    """Parallelism cap from SWAPFORGE_THREADS (0 or unset = auto)."""
    raw = os.environ.get("SWAPFORGE_THREADS", "0").strip() or "0"
    try:
        requested = int(raw)
    except ValueError:
        raise ConfigError(f"SWAPFORGE_THREADS must be an integer, got {raw!r}")
    if requested < 0:
        raise ConfigError("SWAPFORGE_THREADS must be nonnegative")
    if requested == 0:
        requested = os.cpu_count() or 1
    return max(1, min(requested, grid_size))


def _reference_curves(config: ScenarioConfig, lam: float) -> tuple[float, float]:
    """Known closed-form averages for the white-noise Bell scenario.

    The single-round formula (3*lam - 1)/2 goes negative below lam = 1/3
    while the measured average clamps at zero; both are emitted so the
    discrepancy stays visible in the data.  Rows for scenarios without a
    known formula carry nan.
    """
    round1 = math.nan
    round2 = math.nan
    if config.sweep is not None and config.sweep.param_name == "lambda":
        swept = config.swept_round_index()
        if swept is not None and config.rounds[swept].family == "noisy_bell":
            if swept == 0:
                round1 = (3.0 * lam - 1.0) / 2.0
            if (
                swept == 0
                and len(config.rounds) >= 2
                and config.rounds[1].family == "wire2_computational"
            ):
                round2 = (lam - 1.0 + math.sqrt(1.0 - 2.0 * lam + 5.0 * lam * lam)) / 2.0
    return round1, round2


def _evaluate_point(config: ScenarioConfig, lam: float, prob_tol: float) -> SweepRow:
    rounds = config.build_rounds(param_value=lam)
    first = SwapScenario(config.local_dim, rounds[:1], ALL_BRANCHES)
    avg1 = average_negativity(chain(first, prob_tol=prob_tol))
    if len(rounds) >= 2:
        full_records = chain(SwapScenario(config.local_dim, rounds, ALL_BRANCHES), prob_tol)
        avg2 = average_negativity(full_records)
        final_records = full_records
    else:
        avg2 = math.nan
        final_records = chain(first, prob_tol=prob_tol)
    f1, f2 = _reference_curves(config, lam)
    return SweepRow(
        param_value=lam,
        avg_neg_round1=avg1,
        avg_neg_round2=avg2,
        paper_formula_round1=f1,
        paper_formula_round2=f2,
        max_branch_negativity=max(rec.negativity14 for rec in final_records),
    )


def sweep_rows(config: ScenarioConfig) -> list[SweepRow]:
    """Evaluate every grid point; grid order is preserved in the output."""
    if config.sweep is None:
        raise ConfigError("config has no sweep block")
    config.swept_round_index()
    prob_tol = config.tolerance_overrides.get("prob_tol", PROB_TOL)
    grid = np.linspace(config.sweep.start, config.sweep.stop, config.sweep.steps)
    workers = worker_count(len(grid))
    if workers == 1:
        return [_evaluate_point(config, float(lam), prob_tol) for lam in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda lam: _evaluate_point(config, float(lam), prob_tol), grid))


def run_sweep(config: ScenarioConfig, csv_path: str | None = None) -> list[SweepRow]:
    """Run the sweep and write the CSV (to the configured path unless
    overridden); returns the rows."""
    rows = sweep_rows(config)
    target = csv_path if csv_path is not None else config.resolve_output(config.outputs.csv_path)
    text = ",".join(CSV_COLUMNS) + "\n" + "".join(row.as_csv() + "\n" for row in rows)
    if target is not None:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return rows


def run_scenario(config: ScenarioConfig) -> dict:
    """Execute the measurement chain once and build the per-branch report."""
    prob_tol = config.tolerance_overrides.get("prob_tol", PROB_TOL)
    rounds = config.build_rounds()
    scenario = SwapScenario(config.local_dim, rounds, ALL_BRANCHES)
    records = chain(scenario, prob_tol=prob_tol)
    element_classes = [
        [classify_element(el) for el in povm.elements] for povm in rounds
    ]
    branches = []
    for rec in records:
        per_round = [
            element_classes[r][outcome] for r, outcome in enumerate(rec.outcome_path)
        ]
        branches.append(
            {
                "outcome_path": list(rec.outcome_path),
                "probability": _sig15(rec.probability),
                "negativity14": _sig15(rec.negativity14),
                "c14vs23": _sig15(rec.c14vs23),
                "c12vs34": _sig15(rec.c12vs34),
                "classification": [
                    {"verdict": verdict_label(ec.verdict, ec.local_dim), "operation_kind": ec.operation_kind}
                    for ec in per_round
                ],
            }
        )
    report = {
        "local_dim": config.local_dim,
        "rounds": [
            {"family": spec.family, "params": spec.params} for spec in config.rounds
        ],
        "branches": branches,
        "average_negativity": _sig15(average_negativity(records)),
    }
    target = config.resolve_output(config.outputs.report_path)
    if target is not None:
        with open(target, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return report


def _sig15(x: float) -> float:
    return float(format(float(x), ".15g"))
