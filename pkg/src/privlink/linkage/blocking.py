"""Blocking: restrict comparison to record pairs sharing a key value."""
from __future__ import annotations

from ..errors import SchemaError
from .schema import Record, Schema


class _OverflowKey:
    """Reserved block for records whose blocking field is missing."""

    __slots__ = ()

    def __repr__(self):
        return "<overflow>"


OVERFLOW_BLOCK = _OverflowKey()


def make_blocks(
    records: list[Record], block_field: str, schema: Schema | None = None
) -> dict:
    """Partition records by the exact value of block_field.

    Records missing the field go to the reserved overflow block, which is
    compared against every other block so missingness cannot silently drop
    a true match.
    """
    if schema is not None and block_field not in schema.field_names:
        raise SchemaError(f"blocking field {block_field!r} not in schema")
    blocks: dict = {}
    for rec in records:
        key = rec.get(block_field)
        if key is None:
            key = OVERFLOW_BLOCK
        blocks.setdefault(key, []).append(rec)
    return blocks


def candidate_pairs(
    file_a: list[Record], file_b: list[Record], block_field: str | None
) -> list[tuple[Record, Record]]:
    """Candidate (a, b) pairs in deterministic file order.

    Without a blocking field this is the full cross product.  With one, a
    pair qualifies when both sides share a block key or either side sits in
    the overflow block; each qualifying pair appears exactly once.
    """
    if block_field is None:
        return [(a, b) for a in file_a for b in file_b]
    b_blocks = make_blocks(file_b, block_field)
    b_overflow = b_blocks.get(OVERFLOW_BLOCK, [])
    pairs = []
    for a in file_a:
        key = a.get(block_field)
        if key is None:
            pairs.extend((a, b) for b in file_b)
        else:
            pairs.extend((a, b) for b in b_blocks.get(key, []))
            pairs.extend((a, b) for b in b_overflow)
    return pairs
