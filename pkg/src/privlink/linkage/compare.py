"""Pairwise field comparison: build one ComparisonVector per record pair."""
from __future__ import annotations

from bisect import bisect_right

from ..errors import SchemaError
from .schema import ComparisonVector, FeatureSpec, Record, Schema


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, unit costs)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def edit_similarity(a: str, b: str) -> float:
    """1 - distance/max length, in [0,1]; two empty strings count as identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _feature_level(spec: FeatureSpec, va, vb) -> int:
    sa, sb = str(va), str(vb)
    if spec.kind == "boolean-equality":
        return 1 if va == vb else 0
    if spec.kind == "prefix-agreement":
        return 1 if sa[: spec.n_chars] == sb[: spec.n_chars] else 0
    # edit-distance-similarity: level = number of cut-points at or below
    # the similarity, so the top band [last cut, 1] gets the top level
    return bisect_right(spec.bins, edit_similarity(sa, sb))


def compare_fields(
    a: Record, b: Record, specs: list[FeatureSpec], schema: Schema | None = None
) -> ComparisonVector:
    """Compare two records feature by feature.

    A missing value on either side sets the missing flag for that feature
    (its level is recorded as 0 but carries no evidence downstream).
    """
    if schema is not None:
        known = set(schema.field_names)
        for spec in specs:
            if spec.source_field not in known:
                raise SchemaError(
                    f"feature {spec.name!r} reads unknown field {spec.source_field!r}"
                )
    levels = []
    missing = []
    for spec in specs:
        va, vb = a.get(spec.source_field), b.get(spec.source_field)
        if va is None or vb is None:
            levels.append(0)
            missing.append(True)
        else:
            levels.append(_feature_level(spec, va, vb))
            missing.append(False)
    return ComparisonVector(levels=tuple(levels), missing_mask=tuple(missing))
