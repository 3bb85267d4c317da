"""End-to-end reproduction of the bundled worked examples.

Each case loads its scenario fixture, runs the normalization or sweep
pipeline, and compares the result against the published reference values
at a per-case tolerance. The variation-norm case carries a wider
tolerance: its reference matrix was produced from unrounded deflections,
while the bundled table is published at one decimal, which shifts the
recomputed cells by up to 0.07.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fairness import marginal_outcome, sweep_alpha
from .normalize import NormalizationConfig, normalize_mapping
from .scenario import Scenario, fixture_scenario_path, load_scenario

CASE_IDS = (
    "hiring-simple",
    "hiring-revised",
    "hiring-variation",
    "marketing-bias",
    "marketing-marginal",
)

_SCENARIO_FILES = {
    "hiring-simple": "hiring.toml",
    "hiring-revised": "hiring_revised.toml",
    "hiring-variation": "hiring_variation.toml",
    "marketing-bias": "marketing.toml",
    "marketing-marginal": "marketing_marginal.toml",
}

# Published normalized matrices per case and alpha.
_EXPECTED_MATRICES = {
    "hiring-simple": {
        0.5: [[0.87, 0.63], [0.91, 0.63]],
        1.0: [[0.95, 0.82], [0.99, 0.91]],
        1.3: [[0.97, 0.88], [0.997, 0.96]],
    },
    "hiring-revised": {0.35: [[0.81, 0.38], [0.73, 0.38]]},
    "hiring-variation": {0.6: [[0.75, 0.26], [0.78, 0.41]]},
    "marketing-bias": {0.2: [[0.76, 0.58], [0.76, 0.25]]},
    "marketing-marginal": {0.4: [[0.54, 0.04], [0.54, 0.06]]},
}

_MATRIX_TOLERANCES = {
    "hiring-simple": 0.01,
    "hiring-revised": 0.02,
    "hiring-variation": 0.08,
    "marketing-bias": 0.01,
    "marketing-marginal": 0.01,
}

# hiring-revised: the sweep's combined minimum must land in this window.
_BEST_ALPHA_WINDOW = (0.25, 0.45)

# marketing-marginal: population-weighted outcome per protected group.
_EXPECTED_MARGINALS_ORIGINAL = [0.74, 0.26]
_EXPECTED_MARGINALS_NORMALIZED = [0.44, 0.156]
_MARGINAL_ORIGINAL_TOL = 1e-9
_MARGINAL_NORMALIZED_TOL = 0.01

_VARIATION_WARNING = (
    "reference matrix for the variation-norm case was produced from "
    "unrounded deflections; recomputation from the one-decimal table "
    "differs by up to 0.07 per cell, so the tolerance is widened to 0.08"
)


@dataclass(frozen=True)
class CheckRow:
    """One expected/actual comparison in a reproduction report."""

    label: str
    expected: str
    actual: str
    delta: str
    tolerance: str
    ok: bool


@dataclass
class ReproReport:
    case: str
    rows: list[CheckRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.ok for row in self.rows)

    def add_scalar(self, label: str, expected: float, actual: float, tol: float):
        delta = abs(actual - expected)
        self.rows.append(
            CheckRow(
                label=label,
                expected=f"{expected:.6g}",
                actual=f"{actual:.6f}",
                delta=f"{delta:.6f}",
                tolerance=f"{tol:.3g}",
                ok=delta <= tol,
            )
        )

    def add_interval(self, label: str, low: float, high: float, actual: float):
        self.rows.append(
            CheckRow(
                label=label,
                expected=f"[{low:.6g}, {high:.6g}]",
                actual=f"{actual:.6f}",
                delta="-",
                tolerance="interval",
                ok=low <= actual <= high,
            )
        )


def _cell_labels(scenario: Scenario) -> list[list[str]]:
    return [
        [f"[{p},{u}]" for u in scenario.mapping.unprotected_values]
        for p in scenario.mapping.protected_values
    ]


def _normalized_at(scenario: Scenario, alpha: float) -> np.ndarray:
    config = NormalizationConfig(
        alpha=alpha,
        success_deflections=scenario.success_deflections,
        mode=scenario.mode,
        failure_deflections=scenario.failure_deflections,
    )
    return normalize_mapping(scenario.mapping, config).prob


def _check_matrix(
    report: ReproReport,
    scenario: Scenario,
    alpha: float,
    expected: list[list[float]],
    tol: float,
):
    actual = _normalized_at(scenario, alpha)
    labels = _cell_labels(scenario)
    for i, row in enumerate(expected):
        for j, value in enumerate(row):
            report.add_scalar(
                f"alpha={alpha:g} {labels[i][j]}", value, float(actual[i, j]), tol
            )


def load_case_scenario(case_id: str) -> Scenario:
    if case_id not in CASE_IDS:
        raise ValidationError(
            f"unknown reproduction case {case_id!r}; expected one of {', '.join(CASE_IDS)}"
        )
    return load_scenario(fixture_scenario_path(_SCENARIO_FILES[case_id]))


def run_case(case_id: str) -> ReproReport:
    """Run one reproduction case and return its comparison report."""
    scenario = load_case_scenario(case_id)
    report = ReproReport(case=case_id)
    tol = _MATRIX_TOLERANCES[case_id]
    for alpha, expected in _EXPECTED_MATRICES[case_id].items():
        _check_matrix(report, scenario, alpha, expected, tol)

    if case_id == "hiring-revised":
        curve = sweep_alpha(
            scenario.mapping,
            scenario.success_deflections,
            scenario.failure_deflections,
            mode=scenario.mode,
            alphas=scenario.grid,
            metric=scenario.metric,
            marginal=scenario.marginal,
        )
        low, high = _BEST_ALPHA_WINDOW
        report.add_interval("sweep best_alpha", low, high, curve.best_alpha)

    if case_id == "hiring-variation":
        report.warnings.append(_VARIATION_WARNING)

    if case_id == "marketing-marginal":
        alpha = next(iter(_EXPECTED_MATRICES[case_id]))
        normalized = scenario.mapping.with_prob(_normalized_at(scenario, alpha))
        originals = marginal_outcome(scenario.mapping)
        normals = marginal_outcome(normalized)
        for (group, value), expected in zip(originals, _EXPECTED_MARGINALS_ORIGINAL):
            report.add_scalar(
                f"marginal original [{group}]", expected, value, _MARGINAL_ORIGINAL_TOL
            )
        for (group, value), expected in zip(normals, _EXPECTED_MARGINALS_NORMALIZED):
            report.add_scalar(
                f"marginal normalized [{group}]",
                expected,
                value,
                _MARGINAL_NORMALIZED_TOL,
            )
    return report


def run_all() -> list[ReproReport]:
    return [run_case(case_id) for case_id in CASE_IDS]


def format_report(report: ReproReport) -> str:
    """Fixed-width expected/actual/|delta| table, one line per check."""
    header = ("check", "expected", "actual", "|delta|", "tol", "status")
    rows = [
        (r.label, r.expected, r.actual, r.delta, r.tolerance, "ok" if r.ok else "FAIL")
        for r in report.rows
    ]
    widths = [
        max(len(header[k]), *(len(row[k]) for row in rows)) for k in range(len(header))
    ]
    lines = [f"reproduce {report.case}"]
    lines.append("  " + "  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        lines.append("  " + "  ".join(v.ljust(w) for v, w in zip(row, widths)))
    for warning in report.warnings:
        lines.append(f"  warning: {warning}")
    lines.append(f"{report.case}: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines)
