"""affectnorm: measure and remove the affective bias in outcome mappings.

Pipeline: EPA sentiment dictionaries -> actor-behavior-object events ->
impression transients and deflections -> Boltzmann affective weights ->
normalized outcome mappings -> fairness/divergence trade-off sweeps.
"""

from .errors import (
    AffectNormError,
    CsvFormatError,
    DuplicateEntryError,
    NotFoundError,
    ScenarioError,
    ValidationError,
)
from .fairness import (
    RegressVerdict,
    SweepCurve,
    default_alpha_grid,
    degenerate_check,
    discrimination_kl,
    kl_bernoulli,
    lipschitz_gap,
    marginal_outcome,
    model_divergence_kl,
    regress_check,
    sweep_alpha,
    symmetrized_kl,
    variation_metric,
)
from .impressions import (
    DeflectionTable,
    ImpressionModel,
    deflection,
    deflection_table,
    load_deflection_fixture,
    load_impression_model,
    transients,
)
from .normalize import (
    NormalizationConfig,
    NormalizedMapping,
    OutcomeMapping,
    affective_weight,
    deflection_matrix_from_csv,
    normalize_cell,
    normalize_mapping,
    outcome_mapping_from_csv,
)
from .scenario import Scenario, load_scenario
from .sentiments import (
    AboEvent,
    EpaVector,
    SentimentDictionary,
    build_event,
    load_dictionary,
)

__version__ = "0.1.0"

__all__ = [
    "AboEvent",
    "AffectNormError",
    "CsvFormatError",
    "DeflectionTable",
    "DuplicateEntryError",
    "EpaVector",
    "ImpressionModel",
    "NormalizationConfig",
    "NormalizedMapping",
    "NotFoundError",
    "OutcomeMapping",
    "RegressVerdict",
    "Scenario",
    "ScenarioError",
    "SentimentDictionary",
    "SweepCurve",
    "ValidationError",
    "affective_weight",
    "build_event",
    "default_alpha_grid",
    "deflection",
    "deflection_matrix_from_csv",
    "deflection_table",
    "degenerate_check",
    "discrimination_kl",
    "kl_bernoulli",
    "lipschitz_gap",
    "load_deflection_fixture",
    "load_dictionary",
    "load_impression_model",
    "load_scenario",
    "marginal_outcome",
    "model_divergence_kl",
    "normalize_cell",
    "normalize_mapping",
    "outcome_mapping_from_csv",
    "regress_check",
    "sweep_alpha",
    "symmetrized_kl",
    "transients",
    "variation_metric",
]
