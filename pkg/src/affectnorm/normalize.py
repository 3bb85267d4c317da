"""Affective normalization of outcome mappings.

An outcome mapping records P(positive outcome) over a grid of protected x
unprotected attribute values. The affective weight of a cell is the
Boltzmann transform of the deflection of the matching ACT event,
``exp(-alpha * deflection)``. Dividing the observed probabilities by these
weights and renormalizing over the two outcomes recovers the rational
decision component:

    normalized = (p / w_plus) / (p / w_plus + (1 - p) / w_minus)

with ``w_plus = exp(-alpha * d_success)`` and ``w_minus`` either
``1 - w_plus`` (simple mode) or ``exp(-alpha * d_failure)`` (revised mode,
where failure has its own event, e.g. firing instead of hiring).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from ._csvio import Source, iter_rows, parse_float
from .errors import DuplicateEntryError, ValidationError

Mode = Literal["simple", "revised"]
MODES = ("simple", "revised")

MATRIX_HEADER = ("protected", "unprotected", "value")


def _as_matrix(values, what: str) -> np.ndarray:
    matrix = np.asarray(values, dtype=float)
    if matrix.ndim != 2:
        raise ValidationError(f"{what} must be a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{what} must contain only finite values")
    return matrix


@dataclass(frozen=True)
class OutcomeMapping:
    """Grid of positive-outcome probabilities with optional cell populations.

    Rows are protected attribute values, columns unprotected ones.
    """

    protected_values: tuple[str, ...]
    unprotected_values: tuple[str, ...]
    prob: np.ndarray
    populations: np.ndarray | None = None

    def __post_init__(self):
        protected = tuple(str(v) for v in self.protected_values)
        unprotected = tuple(str(v) for v in self.unprotected_values)
        object.__setattr__(self, "protected_values", protected)
        object.__setattr__(self, "unprotected_values", unprotected)
        prob = _as_matrix(self.prob, "prob")
        if prob.shape != (len(protected), len(unprotected)):
            raise ValidationError(
                f"prob shape {prob.shape} does not match axis lengths "
                f"({len(protected)}, {len(unprotected)})"
            )
        if np.any(prob < 0) or np.any(prob > 1):
            raise ValidationError("probabilities must lie in [0, 1]")
        prob = prob.copy()
        prob.setflags(write=False)
        object.__setattr__(self, "prob", prob)
        if self.populations is not None:
            pops = _as_matrix(self.populations, "populations")
            if pops.shape != prob.shape:
                raise ValidationError(
                    f"populations shape {pops.shape} does not match prob {prob.shape}"
                )
            if np.any(pops < 0):
                raise ValidationError("populations must be nonnegative")
            pops = pops.copy()
            pops.setflags(write=False)
            object.__setattr__(self, "populations", pops)

    @property
    def shape(self) -> tuple[int, int]:
        return self.prob.shape

    def with_prob(self, prob: np.ndarray) -> "OutcomeMapping":
        """Same axes and populations, new probability matrix."""
        return OutcomeMapping(
            protected_values=self.protected_values,
            unprotected_values=self.unprotected_values,
            prob=prob,
            populations=self.populations,
        )


@dataclass(frozen=True)
class NormalizationConfig:
    """Scale factor, failure-weight mode, and per-cell deflection inputs."""

    alpha: float
    success_deflections: np.ndarray
    mode: Mode = "simple"
    failure_deflections: np.ndarray | None = None

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha < 0:
            raise ValidationError(f"alpha must be finite and nonnegative, got {alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        success = _as_matrix(self.success_deflections, "success_deflections")
        if np.any(success < 0):
            raise ValidationError("success deflections must be nonnegative")
        success = success.copy()
        success.setflags(write=False)
        object.__setattr__(self, "success_deflections", success)
        if self.failure_deflections is not None:
            failure = _as_matrix(self.failure_deflections, "failure_deflections")
            if np.any(failure < 0):
                raise ValidationError("failure deflections must be nonnegative")
            if failure.shape != success.shape:
                raise ValidationError(
                    f"failure deflections shape {failure.shape} does not match "
                    f"success {success.shape}"
                )
            failure = failure.copy()
            failure.setflags(write=False)
            object.__setattr__(self, "failure_deflections", failure)
        elif self.mode == "revised":
            raise ValidationError("revised mode requires failure_deflections")


@dataclass(frozen=True)
class NormalizedMapping:
    """A normalized outcome mapping plus the weights that produced it."""

    mapping: OutcomeMapping
    config: NormalizationConfig
    w_plus: np.ndarray
    w_minus: np.ndarray

    # Convenience passthroughs so metric code accepts either mapping kind.
    @property
    def prob(self) -> np.ndarray:
        return self.mapping.prob

    @property
    def protected_values(self) -> tuple[str, ...]:
        return self.mapping.protected_values

    @property
    def unprotected_values(self) -> tuple[str, ...]:
        return self.mapping.unprotected_values

    @property
    def populations(self) -> np.ndarray | None:
        return self.mapping.populations


def affective_weight(deflection: float, alpha: float) -> float:
    """Boltzmann transform of a deflection: ``exp(-alpha * deflection)``.

    Lies in (0, 1]; strictly decreasing in both arguments.
    """
    deflection = float(deflection)
    alpha = float(alpha)
    if not math.isfinite(deflection) or deflection < 0:
        raise ValidationError(f"deflection must be finite and nonnegative, got {deflection!r}")
    if not math.isfinite(alpha) or alpha < 0:
        raise ValidationError(f"alpha must be finite and nonnegative, got {alpha!r}")
    return math.exp(-alpha * deflection)


def normalize_cell(
    p: float,
    d_success: float,
    d_failure: float | None = None,
    *,
    alpha: float,
    mode: Mode = "simple",
) -> float:
    """Divide the affective weights out of one outcome probability.

    Success weight is ``exp(-alpha * d_success)``; failure weight is its
    complement in simple mode or ``exp(-alpha * d_failure)`` in revised
    mode. Endpoints are fixed (0 -> 0, 1 -> 1). In simple mode a zero
    failure weight (alpha * d_success == 0) is resolved by the limit that
    keeps alpha = 0 an exact identity: the cell is returned unchanged.
    """
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ValidationError(f"probability must lie in [0, 1], got {p!r}")
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "revised" and d_failure is None:
        raise ValidationError("revised mode requires a failure deflection")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    w_plus = affective_weight(d_success, alpha)
    if mode == "simple":
        w_minus = -math.expm1(-alpha * float(d_success))
        if w_minus == 0.0:
            return p
    else:
        w_minus = affective_weight(d_failure, alpha)
    # Algebraically (p/w+) / (p/w+ + (1-p)/w-), rearranged so tiny weights
    # cannot overflow the intermediate quotients.
    numerator = p * w_minus
    return numerator / (numerator + (1.0 - p) * w_plus)


def normalize_mapping(
    mapping: OutcomeMapping, config: NormalizationConfig
) -> NormalizedMapping:
    """Apply :func:`normalize_cell` to every cell of a mapping.

    Populations pass through untouched; the returned object carries the
    per-cell success/failure weights and the config that produced them.
    """
    if config.success_deflections.shape != mapping.shape:
        raise ValidationError(
            f"success deflections shape {config.success_deflections.shape} does not "
            f"match mapping {mapping.shape}"
        )
    n_rows, n_cols = mapping.shape
    normalized = np.empty((n_rows, n_cols))
    for i in range(n_rows):
        for j in range(n_cols):
            d_failure = (
                None
                if config.failure_deflections is None
                else config.failure_deflections[i, j]
            )
            normalized[i, j] = normalize_cell(
                mapping.prob[i, j],
                config.success_deflections[i, j],
                d_failure,
                alpha=config.alpha,
                mode=config.mode,
            )
    w_plus = np.exp(-config.alpha * config.success_deflections)
    if config.mode == "simple":
        w_minus = -np.expm1(-config.alpha * config.success_deflections)
    else:
        w_minus = np.exp(-config.alpha * config.failure_deflections)
    return NormalizedMapping(
        mapping=mapping.with_prob(normalized),
        config=config,
        w_plus=w_plus,
        w_minus=w_minus,
    )


def load_matrix_csv(
    source: Source,
) -> tuple[tuple[str, ...], tuple[str, ...], np.ndarray]:
    """Read a ``protected,unprotected,value`` triplet CSV into a dense matrix.

    Axis value order follows first appearance; the grid must be complete
    with no duplicate cells.
    """
    cells: dict[tuple[str, str], float] = {}
    protected: list[str] = []
    unprotected: list[str] = []
    for lineno, (prot, unprot, value) in iter_rows(source, MATRIX_HEADER):
        key = (prot, unprot)
        if key in cells:
            raise DuplicateEntryError(f"line {lineno}: duplicate cell {key!r}")
        cells[key] = parse_float(value, lineno, "value")
        if prot not in protected:
            protected.append(prot)
        if unprot not in unprotected:
            unprotected.append(unprot)
    missing = [
        (p, u) for p in protected for u in unprotected if (p, u) not in cells
    ]
    if missing:
        raise ValidationError(f"incomplete grid, missing cells: {missing}")
    matrix = np.array([[cells[(p, u)] for u in unprotected] for p in protected])
    return tuple(protected), tuple(unprotected), matrix


def outcome_mapping_from_csv(
    prob_source: Source, populations_source: Source | None = None
) -> OutcomeMapping:
    """Build an OutcomeMapping from triplet CSVs (see :func:`load_matrix_csv`)."""
    protected, unprotected, prob = load_matrix_csv(prob_source)
    populations = None
    if populations_source is not None:
        pops_protected, pops_unprotected, populations = load_matrix_csv(
            populations_source
        )
        if (pops_protected, pops_unprotected) != (protected, unprotected):
            raise ValidationError(
                "populations CSV axes do not match the probability CSV"
            )
    return OutcomeMapping(
        protected_values=protected,
        unprotected_values=unprotected,
        prob=prob,
        populations=populations,
    )


def deflection_matrix_from_csv(
    source: Source,
    protected_values: Sequence[str],
    unprotected_values: Sequence[str],
) -> np.ndarray:
    """Load a deflection matrix from triplet CSV, aligned to the given axes."""
    protected, unprotected, matrix = load_matrix_csv(source)
    try:
        row_index = [protected.index(str(v)) for v in protected_values]
        col_index = [unprotected.index(str(v)) for v in unprotected_values]
    except ValueError as err:
        raise ValidationError(f"deflection CSV axes do not cover the mapping: {err}") from None
    return matrix[np.ix_(row_index, col_index)]
