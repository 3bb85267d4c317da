"""Fairness and divergence metrics, the alpha-sweep optimizer, and the
intersectional regress check.

Discrimination measures how unequal a mapping is across the protected
axis; model divergence measures how far a normalized mapping has moved
from the original. Both are computed per Bernoulli cell with symmetrized
KL (or absolute difference for the variation norm), and the sweep picks
the alpha minimizing their sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, Sequence, Union

import numpy as np

from .errors import ValidationError
from .impressions import DeflectionTable
from .normalize import (
    Mode,
    NormalizationConfig,
    NormalizedMapping,
    OutcomeMapping,
    normalize_mapping,
)

Metric = Literal["kl", "variation"]
METRICS = ("kl", "variation")

# Probabilities are clamped away from {0, 1} before any logarithm.
CLAMP_EPS = 1e-12

MappingLike = Union[OutcomeMapping, NormalizedMapping]


def _as_mapping(m: MappingLike) -> OutcomeMapping:
    return m.mapping if isinstance(m, NormalizedMapping) else m


def clamp_probability(p: float, eps: float = CLAMP_EPS) -> float:
    return min(max(float(p), eps), 1.0 - eps)


def kl_bernoulli(p: float, q: float, eps: float = CLAMP_EPS) -> float:
    """KL(p || q) between Bernoulli distributions, clamped for stability."""
    p = clamp_probability(p, eps)
    q = clamp_probability(q, eps)
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


def symmetrized_kl(p: float, q: float, eps: float = CLAMP_EPS) -> float:
    """Order-free Bernoulli divergence: the mean of both KL directions."""
    return 0.5 * (kl_bernoulli(p, q, eps) + kl_bernoulli(q, p, eps))


def _cell_distance(p: float, q: float, metric: Metric) -> float:
    if metric == "kl":
        return symmetrized_kl(p, q)
    return abs(float(p) - float(q))


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise ValidationError(f"metric must be one of {METRICS}, got {metric!r}")


def _row_pairs(n_rows: int) -> list[tuple[int, int]]:
    return list(combinations(range(n_rows), 2))


def _discrimination(prob: np.ndarray, metric: Metric) -> float:
    """Mean pairwise per-column distance across protected rows.

    With two protected values this is the mean over unprotected columns of
    the binary metric; larger cardinalities average over unordered row
    pairs.
    """
    n_rows, n_cols = prob.shape
    if n_rows < 2:
        raise ValidationError("discrimination requires at least two protected values")
    if n_cols < 1:
        raise ValidationError("discrimination requires at least one unprotected value")
    pairs = _row_pairs(n_rows)
    total = 0.0
    for i, k in pairs:
        total += sum(_cell_distance(prob[i, j], prob[k, j], metric) for j in range(n_cols))
    return total / (len(pairs) * n_cols)


def _marginal_discrimination(mapping: OutcomeMapping, metric: Metric) -> float:
    marginals = [value for _, value in marginal_outcome(mapping)]
    if len(marginals) < 2:
        raise ValidationError("discrimination requires at least two protected values")
    pairs = _row_pairs(len(marginals))
    return sum(_cell_distance(marginals[i], marginals[k], metric) for i, k in pairs) / len(pairs)


def discrimination_kl(mapping: MappingLike) -> float:
    """Symmetrized Bernoulli KL across the protected axis, averaged over
    the unprotected one."""
    return _discrimination(_as_mapping(mapping).prob, "kl")


def model_divergence_kl(normalized: MappingLike, original: MappingLike) -> float:
    """Mean cellwise symmetrized KL between two same-shape mappings."""
    a = _as_mapping(normalized).prob
    b = _as_mapping(original).prob
    if a.shape != b.shape:
        raise ValidationError(f"mapping shapes differ: {a.shape} vs {b.shape}")
    return float(
        np.mean([symmetrized_kl(x, y) for x, y in zip(a.ravel(), b.ravel())])
    )


def variation_metric(
    normalized: MappingLike, original: MappingLike
) -> tuple[float, float]:
    """(discrimination, divergence) under the variation norm.

    Discrimination is the mean over unprotected values of the absolute
    row gap; divergence is the mean absolute cellwise change.
    """
    a = _as_mapping(normalized).prob
    b = _as_mapping(original).prob
    if a.shape != b.shape:
        raise ValidationError(f"mapping shapes differ: {a.shape} vs {b.shape}")
    return _discrimination(a, "variation"), float(np.mean(np.abs(a - b)))


def lipschitz_gap(mapping: MappingLike) -> float:
    """Worst per-column spread across protected values.

    Zero exactly when all protected rows are identical, i.e. when outcomes
    depend only on unprotected attributes; single-row mappings score 0.
    """
    prob = _as_mapping(mapping).prob
    if prob.shape[0] < 2 or prob.shape[1] < 1:
        return 0.0
    return float(np.max(prob.max(axis=0) - prob.min(axis=0)))


def marginal_outcome(mapping: MappingLike) -> list[tuple[str, float]]:
    """Population-weighted outcome probability per protected value."""
    m = _as_mapping(mapping)
    if m.populations is None:
        raise ValidationError("marginal outcome requires cell populations")
    row_totals = m.populations.sum(axis=1)
    if np.any(row_totals <= 0):
        raise ValidationError("every protected value needs a positive total population")
    weighted = (m.populations * m.prob).sum(axis=1) / row_totals
    return list(zip(m.protected_values, (float(v) for v in weighted)))


def default_alpha_grid(
    start: float = 0.0, stop: float = 2.0, step: float = 0.01
) -> np.ndarray:
    """Evenly spaced scale-factor grid, endpoints included."""
    if step <= 0 or stop < start:
        raise ValidationError("grid requires step > 0 and stop >= start")
    n = int(round((stop - start) / step))
    return np.linspace(start, stop, n + 1)


@dataclass(frozen=True)
class SweepCurve:
    """Per-alpha trade-off records plus the minimizing point."""

    alphas: np.ndarray
    discrimination: np.ndarray
    divergence: np.ndarray
    combined: np.ndarray
    best_alpha: float
    best_index: int
    best_mapping: NormalizedMapping

    def __post_init__(self):
        n = len(self.alphas)
        for name in ("discrimination", "divergence", "combined"):
            if len(getattr(self, name)) != n:
                raise ValidationError(f"{name} length does not match alphas")
        if not (0 <= self.best_index < n):
            raise ValidationError("best_index out of range")

    def to_csv(self) -> str:
        lines = ["alpha,discrimination,divergence,combined"]
        for a, disc, div, comb in zip(
            self.alphas, self.discrimination, self.divergence, self.combined
        ):
            lines.append(f"{float(a)!r},{float(disc)!r},{float(div)!r},{float(comb)!r}")
        return "\n".join(lines) + "\n"


def sweep_alpha(
    mapping: OutcomeMapping,
    success_deflections,
    failure_deflections=None,
    *,
    mode: Mode = "simple",
    alphas: Sequence[float] | None = None,
    metric: Metric = "kl",
    marginal: bool = False,
) -> SweepCurve:
    """Trace discrimination and divergence over an alpha grid.

    For each alpha the mapping is normalized, discrimination is computed
    cellwise (or between population-weighted marginals when ``marginal``)
    and divergence against the original; ``combined`` is their sum. The
    best alpha minimizes ``combined``, ties broken toward the smallest
    alpha (least intervention). Grid points are independent, so results
    never depend on evaluation order.
    """
    _check_metric(metric)
    grid = np.asarray(
        default_alpha_grid() if alphas is None else list(alphas), dtype=float
    )
    if grid.size == 0:
        raise ValidationError("alpha grid must be nonempty")
    if np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise ValidationError("alpha grid must be finite and nonnegative")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("alpha grid must be strictly increasing")
    if marginal and mapping.populations is None:
        raise ValidationError("marginal sweep requires cell populations")

    discrimination = np.empty(grid.size)
    divergence = np.empty(grid.size)
    normalized_maps: list[NormalizedMapping] = []
    for idx, alpha in enumerate(grid):
        config = NormalizationConfig(
            alpha=float(alpha),
            success_deflections=success_deflections,
            mode=mode,
            failure_deflections=failure_deflections,
        )
        normalized = normalize_mapping(mapping, config)
        normalized_maps.append(normalized)
        if marginal:
            discrimination[idx] = _marginal_discrimination(normalized.mapping, metric)
        else:
            discrimination[idx] = _discrimination(normalized.prob, metric)
        if metric == "kl":
            divergence[idx] = model_divergence_kl(normalized, mapping)
        else:
            divergence[idx] = float(np.mean(np.abs(normalized.prob - mapping.prob)))
    combined = discrimination + divergence
    best_index = int(np.argmin(combined))  # first minimum == smallest alpha
    return SweepCurve(
        alphas=grid,
        discrimination=discrimination,
        divergence=divergence,
        combined=combined,
        best_alpha=float(grid[best_index]),
        best_index=best_index,
        best_mapping=normalized_maps[best_index],
    )


def degenerate_check(curve: SweepCurve, floor: float = 0.01) -> bool:
    """Flag sweeps whose best mapping collapsed toward all-zero outcomes.

    A best mapping with every probability below ``floor`` means the
    divergence term was effectively ignored (e.g. the degenerate policy of
    never granting the outcome to anyone).
    """
    return bool(curve.best_mapping.prob.max() < floor)


@dataclass(frozen=True)
class RegressVerdict:
    """Outcome of comparing subgroup deflections to their super-group."""

    max_gap: float
    threshold: float
    decision: Literal["differentiate", "cap"]

    def __post_init__(self):
        expected = "differentiate" if self.max_gap > self.threshold else "cap"
        if self.decision != expected:
            raise ValidationError(
                f"decision {self.decision!r} inconsistent with max_gap={self.max_gap} "
                f"and threshold={self.threshold}"
            )


def _aligned_deflections(
    super_table: DeflectionTable, sub_table: DeflectionTable
) -> list[tuple[float, float]]:
    if set(super_table.rows) == set(sub_table.rows):
        return [(super_table.rows[k], sub_table.rows[k]) for k in super_table.rows]
    # Object labels may legitimately differ between the super-group and the
    # subgroup (the object role is what matches); align by behavior when
    # each behavior occurs exactly once on both sides.
    super_by_behavior = {b: v for (b, _), v in super_table.rows.items()}
    sub_by_behavior = {b: v for (b, _), v in sub_table.rows.items()}
    if (
        len(super_by_behavior) == len(super_table.rows)
        and len(sub_by_behavior) == len(sub_table.rows)
        and set(super_by_behavior) == set(sub_by_behavior)
    ):
        return [(super_by_behavior[b], sub_by_behavior[b]) for b in super_by_behavior]
    raise ValidationError(
        "deflection tables do not share comparable keys: "
        f"{sorted(super_table.rows)} vs {sorted(sub_table.rows)}"
    )


def regress_check(
    super_table: DeflectionTable,
    sub_table: DeflectionTable,
    threshold: float = 0.5,
) -> RegressVerdict:
    """Decide whether a subgroup is affectively distinct from its super-group.

    The gap is the largest absolute deflection difference over matching
    rows. A gap above the threshold means the attributes intersect
    affectively and the subgroup deserves its own outcome mapping;
    otherwise the intersectional regress is capped at the super-group.
    """
    threshold = float(threshold)
    if not math.isfinite(threshold) or threshold < 0:
        raise ValidationError(f"threshold must be finite and nonnegative, got {threshold!r}")
    pairs = _aligned_deflections(super_table, sub_table)
    max_gap = max((abs(sub - sup) for sup, sub in pairs), default=0.0)
    decision = "differentiate" if max_gap > threshold else "cap"
    return RegressVerdict(max_gap=max_gap, threshold=threshold, decision=decision)
