"""Delimited ingestion and seeded synthetic corpora with known ground truth."""
from .io import load_table, load_truth, write_table, write_truth
from .synth import (
    CITIES,
    DEFAULT_SCHEMA,
    EDIT_OPS,
    FIRST_NAMES,
    LAST_NAMES,
    ErrorProfile,
    TruthSet,
    apply_edit,
    corrupt_value,
    generate_pairs,
)

__all__ = [
    "load_table",
    "load_truth",
    "write_table",
    "write_truth",
    "CITIES",
    "DEFAULT_SCHEMA",
    "EDIT_OPS",
    "FIRST_NAMES",
    "LAST_NAMES",
    "ErrorProfile",
    "TruthSet",
    "apply_edit",
    "corrupt_value",
    "generate_pairs",
]
