"""Scenario documents: one TOML file describing a full analysis setup.

A scenario bundles the outcome mapping (inline or CSV), the deflection
inputs (a published table, inline matrices, or events scored against an
impression equation file), the normalization mode, and the sweep settings.
Relative paths resolve against the scenario file's directory; bare names
matching a bundled fixture resolve to the packaged copy.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import AffectNormError, ScenarioError
from .fairness import METRICS, default_alpha_grid
from .impressions import (
    DeflectionTable,
    deflection_table,
    load_deflection_fixture,
    load_impression_model,
)
from .normalize import (
    MODES,
    Mode,
    OutcomeMapping,
    deflection_matrix_from_csv,
    outcome_mapping_from_csv,
)
from .sentiments import load_dictionary

FIXTURE_PACKAGE = "affectnorm"
FIXTURE_DIR = "fixtures"


def bundled_fixture_names() -> tuple[str, ...]:
    root = resources.files(FIXTURE_PACKAGE) / FIXTURE_DIR
    return tuple(sorted(entry.name for entry in root.iterdir() if entry.is_file()))


def read_fixture(name: str) -> str:
    """Return the text of a bundled fixture data file."""
    return (resources.files(FIXTURE_PACKAGE) / FIXTURE_DIR / name).read_text(
        encoding="utf-8"
    )


def fixture_scenario_path(name: str) -> Path:
    """Filesystem path of a bundled scenario file (``hiring.toml`` etc.)."""
    path = resources.files(FIXTURE_PACKAGE) / FIXTURE_DIR / name
    return Path(str(path))


def resolve_data(name: str, base_dir: Path | None) -> str:
    """Return file text for a scenario data reference.

    Plain filenames that exist next to the scenario win over bundled
    fixtures of the same name; bare names otherwise fall back to the
    packaged fixtures directory.
    """
    candidate = Path(name)
    if base_dir is not None and not candidate.is_absolute():
        local = base_dir / candidate
        if local.exists():
            return local.read_text(encoding="utf-8")
    if candidate.is_absolute() or os.sep in name:
        if candidate.exists():
            return candidate.read_text(encoding="utf-8")
        raise ScenarioError(f"data file not found: {name}")
    if name in bundled_fixture_names():
        return read_fixture(name)
    raise ScenarioError(f"data file not found: {name}")


@dataclass(frozen=True)
class Scenario:
    """A fully resolved analysis setup ready for normalize/sweep runs."""

    name: str
    mapping: OutcomeMapping
    protected_axis: str
    unprotected_axis: str
    mode: Mode
    success_deflections: np.ndarray
    failure_deflections: np.ndarray | None
    alpha: float | None
    metric: str
    grid: np.ndarray
    marginal: bool


def _require(table: dict, key: str, section: str):
    if key not in table:
        raise ScenarioError(f"missing {key!r} in [{section}]")
    return table[key]


def _load_mapping(doc: dict, base_dir: Path | None) -> tuple[OutcomeMapping, str, str]:
    section = _require(doc, "mapping", "scenario")
    if "csv" in section:
        populations = section.get("populations_csv")
        mapping = outcome_mapping_from_csv(
            resolve_data(section["csv"], base_dir),
            None if populations is None else resolve_data(populations, base_dir),
        )
        return mapping, section.get("rows", "protected"), section.get("cols", "unprotected")

    rows = _require(section, "rows", "mapping")
    cols = _require(section, "cols", "mapping")
    protected = _require(section, "protected", "mapping")
    if protected not in (rows, cols):
        raise ScenarioError(
            f"protected axis {protected!r} must name one of rows={rows!r} or cols={cols!r}"
        )
    row_values = [str(v) for v in _require(section, "row_values", "mapping")]
    col_values = [str(v) for v in _require(section, "col_values", "mapping")]
    prob = np.asarray(_require(section, "prob", "mapping"), dtype=float)
    populations = section.get("populations")
    if populations is not None:
        populations = np.asarray(populations, dtype=float)
    if protected == cols:
        # Normalize orientation: protected values always index mapping rows.
        prob = prob.T
        populations = None if populations is None else populations.T
        row_values, col_values = col_values, row_values
        protected_axis, unprotected_axis = cols, rows
    else:
        protected_axis, unprotected_axis = rows, cols
    mapping = OutcomeMapping(
        protected_values=tuple(row_values),
        unprotected_values=tuple(col_values),
        prob=prob,
        populations=populations,
    )
    return mapping, protected_axis, unprotected_axis


def _matrix_from_table(
    table: DeflectionTable, behavior: str, object_labels: list[list[str]]
) -> np.ndarray:
    return np.array(
        [[table.get(behavior, obj) for obj in row] for row in object_labels]
    )


def _load_deflections(
    doc: dict, mapping: OutcomeMapping, base_dir: Path | None
) -> tuple[np.ndarray, np.ndarray | None]:
    section = _require(doc, "deflections", "scenario")
    source = _require(section, "source", "deflections")
    if source not in ("fixture", "compute"):
        raise ScenarioError(f"deflection source must be 'fixture' or 'compute', got {source!r}")

    if source == "fixture":
        if "success" in section:
            success = np.asarray(section["success"], dtype=float)
            failure = section.get("failure")
            failure = None if failure is None else np.asarray(failure, dtype=float)
        elif "success_csv" in section:
            success = deflection_matrix_from_csv(
                resolve_data(section["success_csv"], base_dir),
                mapping.protected_values,
                mapping.unprotected_values,
            )
            failure = None
            if "failure_csv" in section:
                failure = deflection_matrix_from_csv(
                    resolve_data(section["failure_csv"], base_dir),
                    mapping.protected_values,
                    mapping.unprotected_values,
                )
        else:
            table = load_deflection_fixture(
                resolve_data(_require(section, "table", "deflections"), base_dir)
            )
            object_labels = [
                [str(v) for v in row]
                for row in _require(section, "object_labels", "deflections")
            ]
            success = _matrix_from_table(
                table, _require(section, "success_behavior", "deflections"), object_labels
            )
            failure = None
            if "failure_behavior" in section:
                failure = _matrix_from_table(
                    table, section["failure_behavior"], object_labels
                )
        return success, failure

    dictionary = load_dictionary(
        resolve_data(_require(section, "dictionary", "deflections"), base_dir),
        provenance=str(section["dictionary"]),
    )
    model = load_impression_model(
        resolve_data(_require(section, "equations", "deflections"), base_dir),
        name=str(section["equations"]),
    )
    actor = _require(section, "actor", "deflections")
    object_labels = [
        [str(v) for v in row] for row in _require(section, "object_labels", "deflections")
    ]
    success_behavior = _require(section, "success_behavior", "deflections")
    behaviors = [success_behavior]
    failure_behavior = section.get("failure_behavior")
    if failure_behavior is not None:
        behaviors.append(failure_behavior)
    objects = sorted({obj for row in object_labels for obj in row})
    table = deflection_table(model, dictionary, actor, behaviors, objects)
    success = _matrix_from_table(table, success_behavior, object_labels)
    failure = None
    if failure_behavior is not None:
        failure = _matrix_from_table(table, failure_behavior, object_labels)
    return success, failure


def load_scenario(source: str | os.PathLike) -> Scenario:
    """Parse and resolve a scenario TOML file."""
    path = Path(source)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}") from None
    except tomllib.TOMLDecodeError as err:
        raise ScenarioError(f"invalid scenario document {path}: {err}") from err
    base_dir = path.parent

    try:
        mapping, protected_axis, unprotected_axis = _load_mapping(doc, base_dir)
        success, failure = _load_deflections(doc, mapping, base_dir)
    except ScenarioError:
        raise
    except AffectNormError as err:
        raise ScenarioError(f"invalid scenario {path.name}: {err}") from err

    if success.shape != mapping.shape:
        raise ScenarioError(
            f"success deflections shape {success.shape} does not match mapping {mapping.shape}"
        )

    norm_section = doc.get("normalize", {})
    mode = norm_section.get("mode", "simple")
    if mode not in MODES:
        raise ScenarioError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "revised" and failure is None:
        raise ScenarioError("revised mode requires failure deflections")
    alpha = norm_section.get("alpha")
    if alpha is not None:
        alpha = float(alpha)

    sweep_section = doc.get("sweep", {})
    metric = sweep_section.get("metric", "kl")
    if metric not in METRICS:
        raise ScenarioError(f"metric must be one of {METRICS}, got {metric!r}")
    marginal = bool(sweep_section.get("marginal", False))
    if marginal and mapping.populations is None:
        raise ScenarioError("marginal sweep requires mapping populations")
    grid_section = sweep_section.get("grid", {})
    grid = default_alpha_grid(
        start=float(grid_section.get("start", 0.0)),
        stop=float(grid_section.get("stop", 2.0)),
        step=float(grid_section.get("step", 0.01)),
    )

    return Scenario(
        name=str(doc.get("name", path.stem)),
        mapping=mapping,
        protected_axis=str(protected_axis),
        unprotected_axis=str(unprotected_axis),
        mode=mode,
        success_deflections=success,
        failure_deflections=failure,
        alpha=alpha,
        metric=str(metric),
        grid=grid,
        marginal=marginal,
    )
