"""Delimited-file ingestion and emission for record files and truth sets.

Files are UTF-8 CSV with a header row and LF line endings.  Empty cells are
missing values, never empty strings.  Numeric fields are parsed to numbers
on load.
"""
from __future__ import annotations

import csv
from pathlib import Path

from ..errors import IngestError
from ..linkage.schema import Record, Schema


def _parse_cell(raw: str, kind: str, line_no: int, name: str):
    if raw == "":
        return None
    if kind != "numeric":
        return raw
    try:
        f = float(raw)
    except ValueError:
        raise IngestError(f"line {line_no}: field {name!r} is not numeric: {raw!r}")
    return int(f) if f.is_integer() else f


def load_table(path: str | Path, schema: Schema) -> list[Record]:
    """Read one Record per row; reject header mismatches and duplicate ids."""
    path = Path(path)
    expected = list(schema.field_names)
    records = []
    seen_ids = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file, expected a header row")
        if header != expected:
            raise IngestError(
                f"{path}: header {header!r} does not match schema fields {expected!r}"
            )
        kinds = dict(schema.fields)
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(expected):
                raise IngestError(
                    f"line {line_no}: expected {len(expected)} cells, got {len(row)}"
                )
            values = {}
            for name, raw in zip(expected, row):
                parsed = _parse_cell(raw, kinds[name], line_no, name)
                if parsed is not None:
                    values[name] = parsed
            rec_id = values.get(schema.id_field)
            if rec_id is None:
                raise IngestError(f"line {line_no}: missing id field {schema.id_field!r}")
            rec_id = str(rec_id)
            if rec_id in seen_ids:
                raise IngestError(f"line {line_no}: duplicate id {rec_id!r}")
            seen_ids.add(rec_id)
            records.append(Record(id=rec_id, values=values))
    return records


def write_table(path: str | Path, schema: Schema, records: list[Record]) -> None:
    """Emit records in order; missing values become empty cells."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(schema.field_names)
        for rec in records:
            row = []
            for name in schema.field_names:
                v = rec.values.get(name)
                row.append("" if v is None else str(v))
            writer.writerow(row)


def write_truth(path: str | Path, pairs: set[tuple[str, str]]) -> None:
    """Sidecar truth file: sorted (idA, idB) rows under a header."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["idA", "idB"])
        for a, b in sorted(pairs):
            writer.writerow([a, b])


def load_truth(path: str | Path) -> set[tuple[str, str]]:
    path = Path(path)
    pairs = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["idA", "idB"]:
            raise IngestError(f"{path}: expected header idA,idB, got {header!r}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise IngestError(f"line {line_no}: expected 2 cells, got {len(row)}")
            pairs.add((row[0], row[1]))
    return pairs
