"""Transient impressions and deflection for actor-behavior-object events.

An impression coefficient set predicts the nine post-event transient
sentiments (Ae', Ap', Aa', Be', Bp', Ba', Oe', Op', Oa') as a polynomial in
the nine event fundamentals. Deflection is the squared distance between
fundamentals and transients over all nine dimensions; it is the standard
ACT measure of how unlikely an event feels to the surveyed population.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._csvio import Source, iter_rows, parse_float
from .errors import (
    CsvFormatError,
    DuplicateEntryError,
    NotFoundError,
    ValidationError,
)
from .sentiments import AboEvent, SentimentDictionary, build_event

# Factor tokens in canonical order: actor before behavior before object,
# e before p before a within each role.
FACTORS = ("Ae", "Ap", "Aa", "Be", "Bp", "Ba", "Oe", "Op", "Oa")
_FACTOR_INDEX = {name: i for i, name in enumerate(FACTORS)}

CONSTANT_TERM = "1"

MODEL_HEADER = ("term",) + FACTORS
DEFLECTION_HEADER = ("behavior", "object", "deflection")

PROVENANCE_COMPUTED = "computed"
PROVENANCE_FIXTURE = "fixture"


def parse_term(descriptor: str) -> tuple[int, ...]:
    """Parse a term descriptor into sorted factor indices.

    ``1`` is the constant term and yields the empty tuple. Any other
    descriptor is a concatenation of distinct factor tokens, e.g. ``AeBe``
    or ``BeOp``; order is normalized by sorting.
    """
    descriptor = descriptor.strip()
    if descriptor == CONSTANT_TERM:
        return ()
    if not descriptor or len(descriptor) % 2 != 0:
        raise ValidationError(f"malformed term descriptor {descriptor!r}")
    indices = []
    for k in range(0, len(descriptor), 2):
        token = descriptor[k : k + 2]
        if token not in _FACTOR_INDEX:
            raise ValidationError(
                f"unknown factor token {token!r} in term {descriptor!r}"
            )
        indices.append(_FACTOR_INDEX[token])
    if len(set(indices)) != len(indices):
        raise ValidationError(f"repeated factor in term {descriptor!r}")
    return tuple(sorted(indices))


def canonical_term(descriptor: str) -> str:
    indices = parse_term(descriptor)
    if not indices:
        return CONSTANT_TERM
    return "".join(FACTORS[i] for i in indices)


@dataclass(frozen=True)
class ImpressionModel:
    """A coefficient table mapping event fundamentals to transients.

    ``terms`` holds canonical descriptors; ``coefficients`` has one row per
    term and one column per predicted transient dimension (9 columns).
    """

    terms: tuple[str, ...]
    coefficients: np.ndarray
    name: str = ""

    def __post_init__(self):
        terms = tuple(canonical_term(t) for t in self.terms)
        object.__setattr__(self, "terms", terms)
        if len(set(terms)) != len(terms):
            raise DuplicateEntryError("duplicate term descriptor in model")
        if terms.count(CONSTANT_TERM) != 1:
            raise ValidationError("model must contain exactly one constant term")
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.shape != (len(terms), 9):
            raise ValidationError(
                f"coefficient matrix must be {len(terms)}x9, got {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise ValidationError("coefficients must be finite")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(
            self, "_term_factors", tuple(parse_term(t) for t in terms)
        )

    @property
    def term_factors(self) -> tuple[tuple[int, ...], ...]:
        return self._term_factors  # type: ignore[attr-defined]


def load_impression_model(source: Source, name: str = "") -> ImpressionModel:
    """Load a coefficient set from ``term,Ae,...,Oa`` CSV."""
    terms: list[str] = []
    rows: list[list[float]] = []
    for lineno, fields in iter_rows(source, MODEL_HEADER):
        try:
            terms.append(canonical_term(fields[0]))
        except ValidationError as err:
            raise CsvFormatError(str(err), line=lineno) from err
        rows.append(
            [parse_float(v, lineno, col) for v, col in zip(fields[1:], FACTORS)]
        )
    if not terms:
        raise ValidationError("impression model has no coefficient rows")
    return ImpressionModel(terms=tuple(terms), coefficients=np.array(rows), name=name)


def transients(model: ImpressionModel, event: AboEvent) -> np.ndarray:
    """Predicted post-event transient sentiments as a 9-vector."""
    fund = event.fundamentals()
    term_values = np.array(
        [math.prod(fund[i] for i in factors) for factors in model.term_factors]
    )
    return term_values @ model.coefficients


def deflection(
    model: ImpressionModel, event: AboEvent, weights: Sequence[float] | None = None
) -> float:
    """Weighted squared distance between fundamentals and transients.

    Weights default to all ones; a 9-vector of nonnegative per-dimension
    weights may be supplied for equation-set variants that use them.
    """
    diff = event.fundamentals() - transients(model, event)
    if weights is None:
        return float(np.dot(diff, diff))
    w = np.asarray(weights, dtype=float)
    if w.shape != (9,):
        raise ValidationError(f"weights must be a 9-vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValidationError("weights must be finite and nonnegative")
    return float(np.sum(w * diff * diff))


@dataclass(frozen=True)
class DeflectionTable:
    """Deflections keyed by (behavior label, object label)."""

    rows: Mapping[tuple[str, str], float]
    provenance: str = PROVENANCE_COMPUTED

    def __post_init__(self):
        if self.provenance not in (PROVENANCE_COMPUTED, PROVENANCE_FIXTURE):
            raise ValidationError(
                f"provenance must be {PROVENANCE_COMPUTED!r} or {PROVENANCE_FIXTURE!r}"
            )
        checked: dict[tuple[str, str], float] = {}
        for key, value in dict(self.rows).items():
            value = float(value)
            if not math.isfinite(value) or value < 0:
                raise ValidationError(
                    f"deflection for {key!r} must be nonnegative, got {value!r}"
                )
            checked[key] = value
        object.__setattr__(self, "rows", MappingProxyType(checked))

    def __len__(self) -> int:
        return len(self.rows)

    def get(self, behavior: str, obj: str) -> float:
        try:
            return self.rows[(behavior, obj)]
        except KeyError:
            raise NotFoundError(f"({behavior}, {obj})", "deflection") from None

    def behaviors(self) -> tuple[str, ...]:
        seen = dict.fromkeys(behavior for behavior, _ in self.rows)
        return tuple(seen)

    def to_csv(self) -> str:
        lines = [",".join(DEFLECTION_HEADER)]
        for (behavior, obj), value in self.rows.items():
            lines.append(f"{behavior},{obj},{value!r}")
        return "\n".join(lines) + "\n"


def deflection_table(
    model: ImpressionModel,
    dictionary: SentimentDictionary,
    actor: str,
    behaviors: Iterable[str],
    objects: Iterable[str],
) -> DeflectionTable:
    """Deflections for ``actor [behavior] object`` over a label grid.

    One row per (behavior, object) pair, behavior-major, with a single
    fixed actor.
    """
    rows: dict[tuple[str, str], float] = {}
    objects = list(objects)
    for behavior in behaviors:
        for obj in objects:
            event = build_event(dictionary, actor, behavior, obj)
            rows[(behavior, obj)] = deflection(model, event)
    return DeflectionTable(rows=rows, provenance=PROVENANCE_COMPUTED)


def load_deflection_fixture(source: Source) -> DeflectionTable:
    """Load published deflections from ``behavior,object,deflection`` CSV."""
    rows: dict[tuple[str, str], float] = {}
    for lineno, (behavior, obj, value) in iter_rows(source, DEFLECTION_HEADER):
        key = (behavior, obj)
        if key in rows:
            raise DuplicateEntryError(f"line {lineno}: duplicate entry for {key!r}")
        d = parse_float(value, lineno, "deflection")
        if not math.isfinite(d) or d < 0:
            raise ValidationError(
                f"line {lineno}: deflection must be nonnegative, got {value}"
            )
        rows[key] = d
    return DeflectionTable(rows=rows, provenance=PROVENANCE_FIXTURE)
