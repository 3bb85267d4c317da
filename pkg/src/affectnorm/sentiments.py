"""EPA sentiment types, sentiment dictionaries, and actor-behavior-object events.

An EPA vector is a point in Osgood's three-dimensional affective meaning
space: evaluation (good/bad), potency (strong/weak), activity (fast/slow).
Sentiment dictionaries map labels such as ``manager`` or ``hire`` to the
EPA ratings elicited from a survey population, e.g. the Indiana 2005 ACT
survey.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from ._csvio import Source, iter_rows, parse_float
from .errors import DuplicateEntryError, NotFoundError, ValidationError

# Historical bounds of published EPA ratings.
EPA_MIN = -4.3
EPA_MAX = 4.3
EPA_BOUND_TOL = 1e-9

CATEGORIES = ("identity", "behavior")

DICTIONARY_HEADER = ("label", "category", "e", "p", "a")


@dataclass(frozen=True)
class EpaVector:
    """A sentiment score triple; each component lies in [-4.3, 4.3]."""

    e: float
    p: float
    a: float

    def __post_init__(self):
        for name in ("e", "p", "a"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not math.isfinite(value):
                raise ValidationError(f"EPA component {name} must be finite, got {value!r}")
            if not (EPA_MIN - EPA_BOUND_TOL <= value <= EPA_MAX + EPA_BOUND_TOL):
                raise ValidationError(
                    f"EPA component {name}={value} outside [{EPA_MIN}, {EPA_MAX}]"
                )

    def as_array(self) -> np.ndarray:
        return np.array([self.e, self.p, self.a], dtype=float)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.e, self.p, self.a)


def _check_category(category: str) -> str:
    if category not in CATEGORIES:
        raise ValidationError(
            f"unknown category {category!r}; expected one of {CATEGORIES}"
        )
    return category


@dataclass(frozen=True)
class SentimentDictionary:
    """Label -> EPA ratings for one survey population.

    Keys are ``(label, category)`` pairs with category ``identity`` or
    ``behavior``. Immutable after construction.
    """

    entries: Mapping[tuple[str, str], EpaVector]
    provenance: str = ""

    def __post_init__(self):
        checked: dict[tuple[str, str], EpaVector] = {}
        for (label, category), vector in dict(self.entries).items():
            _check_category(category)
            if not label:
                raise ValidationError("dictionary labels must be non-empty")
            if not isinstance(vector, EpaVector):
                vector = EpaVector(*vector)
            checked[(label, category)] = vector
        object.__setattr__(self, "entries", MappingProxyType(checked))

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, label: str, category: str) -> EpaVector:
        """Return the stored vector; exact match only, no fuzzy fallback."""
        _check_category(category)
        try:
            return self.entries[(label, category)]
        except KeyError:
            raise NotFoundError(label, category) from None

    def labels(self, category: str) -> tuple[str, ...]:
        _check_category(category)
        return tuple(label for (label, cat) in self.entries if cat == category)

    def to_csv(self) -> str:
        """Serialize back to the loader's CSV format (round-trip safe)."""
        lines = [",".join(DICTIONARY_HEADER)]
        for (label, category), v in self.entries.items():
            lines.append(f"{label},{category},{v.e!r},{v.p!r},{v.a!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AboEvent:
    """An actor-behavior-object triple with fundamental sentiments."""

    actor: EpaVector
    behavior: EpaVector
    obj: EpaVector
    labels: tuple[str, str, str] | None = None

    def fundamentals(self) -> np.ndarray:
        """The 9-vector (Ae, Ap, Aa, Be, Bp, Ba, Oe, Op, Oa)."""
        return np.concatenate(
            [self.actor.as_array(), self.behavior.as_array(), self.obj.as_array()]
        )


def load_dictionary(source: Source, provenance: str = "") -> SentimentDictionary:
    """Load a sentiment dictionary from ``label,category,e,p,a`` CSV.

    Duplicate (label, category) rows, malformed values, and out-of-range
    EPA components are rejected with the offending line number.
    """
    entries: dict[tuple[str, str], EpaVector] = {}
    for lineno, (label, category, e, p, a) in iter_rows(source, DICTIONARY_HEADER):
        if category not in CATEGORIES:
            raise ValidationError(
                f"line {lineno}: unknown category {category!r}; expected one of {CATEGORIES}"
            )
        if not label:
            raise ValidationError(f"line {lineno}: empty label")
        key = (label, category)
        if key in entries:
            raise DuplicateEntryError(
                f"line {lineno}: duplicate entry for ({label!r}, {category!r})"
            )
        values = [parse_float(v, lineno, name) for v, name in ((e, "e"), (p, "p"), (a, "a"))]
        try:
            entries[key] = EpaVector(*values)
        except ValidationError as err:
            raise ValidationError(f"line {lineno}: {err}") from err
    return SentimentDictionary(entries=entries, provenance=provenance)


def build_event(
    dictionary: SentimentDictionary, actor: str, behavior: str, obj: str
) -> AboEvent:
    """Resolve three labels into an event; actor/object are identities."""
    return AboEvent(
        actor=dictionary.lookup(actor, "identity"),
        behavior=dictionary.lookup(behavior, "behavior"),
        obj=dictionary.lookup(obj, "identity"),
        labels=(actor, behavior, obj),
    )
