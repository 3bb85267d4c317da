"""Command-line front end.

Subcommands:

* ``deflect``    score actor-[behavior]-object event grids from a sentiment
  dictionary and an impression equation file, printing a deflection CSV;
* ``normalize``  run one scenario at its single alpha and emit a JSON report;
* ``sweep``      trace the discrimination/divergence trade-off curve over an
  alpha grid, writing ``curve.csv`` and ``best.json``;
* ``reproduce``  re-run a bundled worked example against its reference values.

Exit codes: 0 success, 1 reproduction tolerance failure, 2 usage or
validation error. Outputs carry no timestamps, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import AffectNormError, ScenarioError
from .fairness import degenerate_check, lipschitz_gap, marginal_outcome, sweep_alpha
from .impressions import deflection_table, load_impression_model
from .normalize import NormalizationConfig, normalize_mapping
from .repro import CASE_IDS, format_report, run_all, run_case
from .scenario import bundled_fixture_names, fixture_scenario_path, load_scenario
from .sentiments import load_dictionary


def _matrix(values) -> list[list[float]]:
    return [[float(v) for v in row] for row in values]


def _split_labels(raw: str) -> list[str]:
    return [item for item in (part.strip() for part in raw.split(",")) if item]


def _resolve_scenario(arg: str) -> Path:
    path = Path(arg)
    if path.exists():
        return path
    if "/" not in arg and arg in bundled_fixture_names():
        return fixture_scenario_path(arg)
    raise ScenarioError(f"scenario file not found: {arg}")


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_deflect(args: argparse.Namespace) -> int:
    dictionary = load_dictionary(Path(args.dict), provenance=args.dict)
    model = load_impression_model(Path(args.eq), name=args.eq)
    table = deflection_table(
        model,
        dictionary,
        args.actor,
        _split_labels(args.behaviors),
        _split_labels(args.objects),
    )
    _write_or_print(table.to_csv(), args.out)
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    scenario = load_scenario(_resolve_scenario(args.scenario))
    if scenario.alpha is None:
        raise ScenarioError("normalize requires a single alpha in [normalize]")
    config = NormalizationConfig(
        alpha=scenario.alpha,
        success_deflections=scenario.success_deflections,
        mode=scenario.mode,
        failure_deflections=scenario.failure_deflections,
    )
    normalized = normalize_mapping(scenario.mapping, config)
    report = {
        "scenario": scenario.name,
        "mode": scenario.mode,
        "alpha": scenario.alpha,
        "axes": {
            "protected": scenario.protected_axis,
            "unprotected": scenario.unprotected_axis,
        },
        "protected_values": list(scenario.mapping.protected_values),
        "unprotected_values": list(scenario.mapping.unprotected_values),
        "original": _matrix(scenario.mapping.prob),
        "weights": {
            "success": _matrix(normalized.w_plus),
            "failure": _matrix(normalized.w_minus),
        },
        "normalized": _matrix(normalized.prob),
        "lipschitz_gap": {
            "original": lipschitz_gap(scenario.mapping),
            "normalized": lipschitz_gap(normalized),
        },
    }
    if scenario.mapping.populations is not None:
        report["marginals"] = {
            "original": dict(marginal_outcome(scenario.mapping)),
            "normalized": dict(marginal_outcome(normalized)),
        }
    _write_or_print(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(_resolve_scenario(args.scenario))
    curve = sweep_alpha(
        scenario.mapping,
        scenario.success_deflections,
        scenario.failure_deflections,
        mode=scenario.mode,
        alphas=scenario.grid,
        metric=scenario.metric,
        marginal=scenario.marginal,
    )
    Path(args.curve).write_text(curve.to_csv(), encoding="utf-8")
    best = {
        "scenario": scenario.name,
        "metric": scenario.metric,
        "mode": scenario.mode,
        "marginal": scenario.marginal,
        "best_alpha": curve.best_alpha,
        "discrimination": float(curve.discrimination[curve.best_index]),
        "divergence": float(curve.divergence[curve.best_index]),
        "combined": float(curve.combined[curve.best_index]),
        "normalized": _matrix(curve.best_mapping.prob),
        "degenerate": degenerate_check(curve),
    }
    if scenario.mapping.populations is not None:
        best["marginals"] = dict(marginal_outcome(curve.best_mapping))
    Path(args.best).write_text(json.dumps(best, indent=2) + "\n", encoding="utf-8")
    print(f"best_alpha={curve.best_alpha:g}")
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    reports = run_all() if args.case == "all" else [run_case(args.case)]
    for report in reports:
        print(format_report(report))
    return 0 if all(report.passed for report in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affectnorm",
        description=(
            "Measure the affective bias in decision outcome mappings via "
            "Affect Control Theory deflections and remove it by affective "
            "normalization."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    deflect = sub.add_parser(
        "deflect", help="score an actor-[behavior]-object grid and print a deflection CSV"
    )
    deflect.add_argument("--dict", required=True, help="sentiment dictionary CSV")
    deflect.add_argument("--eq", required=True, help="impression equation CSV")
    deflect.add_argument("--actor", required=True, help="actor identity label")
    deflect.add_argument(
        "--behaviors", required=True, help="comma-separated behavior labels"
    )
    deflect.add_argument(
        "--objects", required=True, help="comma-separated object identity labels"
    )
    deflect.add_argument("--out", help="write the CSV here instead of stdout")
    deflect.set_defaults(func=cmd_deflect)

    normalize = sub.add_parser(
        "normalize", help="normalize a scenario at its configured alpha"
    )
    normalize.add_argument("scenario", help="scenario TOML file or bundled name")
    normalize.add_argument("--out", help="write the JSON report here instead of stdout")
    normalize.set_defaults(func=cmd_normalize)

    sweep = sub.add_parser(
        "sweep", help="trace the discrimination/divergence curve over the alpha grid"
    )
    sweep.add_argument("scenario", help="scenario TOML file or bundled name")
    sweep.add_argument("--curve", default="curve.csv", help="curve CSV output path")
    sweep.add_argument("--best", default="best.json", help="best point JSON output path")
    sweep.set_defaults(func=cmd_sweep)

    reproduce = sub.add_parser(
        "reproduce", help="re-run a bundled worked example against reference values"
    )
    reproduce.add_argument(
        "case", choices=CASE_IDS + ("all",), help="which worked example to run"
    )
    reproduce.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AffectNormError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
