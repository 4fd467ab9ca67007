"""Record schema, feature definitions, and comparison vectors."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import SchemaError

FIELD_KINDS = ("text", "categorical", "numeric")
FEATURE_KINDS = ("boolean-equality", "prefix-agreement", "edit-distance-similarity")


@dataclass(frozen=True)
class Schema:
    """Ordered field layout shared by every record in a file."""

    fields: tuple[tuple[str, str], ...]  # (name, kind) pairs
    id_field: str

    def __post_init__(self):
        names = [name for name, _ in self.fields]
        if len(set(names)) != len(names):
            raise SchemaError("field names must be unique")
        for name, kind in self.fields:
            if kind not in FIELD_KINDS:
                raise SchemaError(f"field {name!r} has unknown kind {kind!r}")
        if self.id_field not in names:
            raise SchemaError(f"id field {self.id_field!r} not among fields")

    @property
    def field_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.fields)


@dataclass(frozen=True)
class Record:
    """One row: a unique id plus a field-name -> value map (missing allowed)."""

    id: str
    values: dict[str, object]

    def check_against(self, schema: Schema) -> None:
        unknown = set(self.values) - set(schema.field_names)
        if unknown:
            raise SchemaError(
                f"record {self.id!r} has fields outside the schema: {sorted(unknown)}"
            )

    def get(self, field_name: str):
        """Field value, or None when missing or blank."""
        v = self.values.get(field_name)
        if v is None or v == "":
            return None
        return v


@dataclass(frozen=True)
class FeatureSpec:
    """How one field is compared and how the outcome is discretized.

    Kinds:
      boolean-equality          two levels: 0 disagree, 1 agree
      prefix-agreement          two levels on the first n_chars characters
      edit-distance-similarity  similarity binned by cut-points; level 0 is
                                the least-similar band, the top level the most
    """

    name: str
    source_field: str
    kind: str
    n_chars: int = 0
    bins: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise SchemaError(f"feature {self.name!r} has unknown kind {self.kind!r}")
        if self.kind == "prefix-agreement" and self.n_chars < 1:
            raise SchemaError(f"feature {self.name!r} needs n_chars >= 1")
        if self.kind == "edit-distance-similarity":
            if not self.bins:
                raise SchemaError(f"feature {self.name!r} needs at least one bin cut-point")
            if any(not 0.0 < b < 1.0 for b in self.bins):
                raise SchemaError(f"feature {self.name!r} bins must lie strictly in (0,1)")
            if any(a >= b for a, b in zip(self.bins, self.bins[1:])):
                raise SchemaError(f"feature {self.name!r} bins must be strictly increasing")
        elif self.bins:
            raise SchemaError(f"feature {self.name!r} takes no bins")

    @property
    def arity(self) -> int:
        """Number of discrete outcome levels."""
        if self.kind == "edit-distance-similarity":
            return len(self.bins) + 1
        return 2


@dataclass(frozen=True)
class ComparisonVector:
    """Discrete agreement pattern for one record pair, one level per feature."""

    levels: tuple[int, ...]
    missing_mask: tuple[bool, ...]

    def __post_init__(self):
        if len(self.levels) != len(self.missing_mask):
            raise SchemaError("levels and missing_mask must have equal length")

    def check_arities(self, arities: tuple[int, ...]) -> None:
        if len(self.levels) != len(arities):
            raise SchemaError(
                f"vector has {len(self.levels)} features, expected {len(arities)}"
            )
        for i, (lvl, k) in enumerate(zip(self.levels, arities)):
            if not 0 <= lvl < k:
                raise SchemaError(f"feature {i}: level {lvl} outside arity {k}")
