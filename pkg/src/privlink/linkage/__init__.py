"""Probabilistic record linkage: comparison, weighting, EM, thresholds, blocking."""
from .blocking import OVERFLOW_BLOCK, candidate_pairs, make_blocks
from .compare import compare_fields, edit_similarity, levenshtein
from .engine import LinkConfig, LinkageResult, link
from .model import (
    Classification,
    LinkageModel,
    Thresholds,
    agreement_weight,
    choose_thresholds,
    classify,
    default_init,
    fit_em,
    mixture_log_likelihood,
)
from .schema import ComparisonVector, FeatureSpec, Record, Schema

__all__ = [
    "OVERFLOW_BLOCK",
    "candidate_pairs",
    "make_blocks",
    "compare_fields",
    "edit_similarity",
    "levenshtein",
    "LinkConfig",
    "LinkageResult",
    "link",
    "Classification",
    "LinkageModel",
    "Thresholds",
    "agreement_weight",
    "choose_thresholds",
    "classify",
    "default_init",
    "fit_em",
    "mixture_log_likelihood",
    "ComparisonVector",
    "FeatureSpec",
    "Record",
    "Schema",
]
