"""Numeric microdata tables: the unit of disclosure limitation."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import IngestError
from ..linkage.schema import Record, Schema


@dataclass(frozen=True)
class Microtable:
    """Rectangular numeric table with one unique id per row."""

    columns: tuple[str, ...]
    ids: tuple[str, ...]
    values: np.ndarray  # shape (len(ids), len(columns)), float64

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2 or vals.shape != (len(self.ids), len(self.columns)):
            raise ValueError(
                f"values shape {vals.shape} does not match "
                f"{len(self.ids)} ids x {len(self.columns)} columns"
            )
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("row ids must be unique")

    @property
    def n_rows(self) -> int:
        return len(self.ids)

    def row(self, rid: str) -> np.ndarray:
        return self.values[self.ids.index(rid)]

    def subset(self, keep_ids: list[str]) -> "Microtable":
        index = {rid: i for i, rid in enumerate(self.ids)}
        rows = [index[rid] for rid in keep_ids]
        return Microtable(
            columns=self.columns,
            ids=tuple(keep_ids),
            values=self.values[rows].copy(),
        )

    @classmethod
    def from_rows(cls, columns, rows) -> "Microtable":
        """rows: iterable of (id, vector)."""
        ids = tuple(str(rid) for rid, _ in rows)
        vals = np.array([list(vec) for _, vec in rows], dtype=float)
        if vals.size == 0:
            vals = vals.reshape(0, len(columns))
        return cls(columns=tuple(columns), ids=ids, values=vals)

    @classmethod
    def from_records(
        cls, records: list[Record], schema: Schema, columns: list[str] | None = None
    ) -> "Microtable":
        """Project the numeric fields of linked records into a table.

        Rows with a missing value in any selected column are dropped; the
        methods here have no missing-data story.
        """
        kinds = dict(schema.fields)
        if columns is None:
            columns = [n for n, k in schema.fields if k == "numeric"]
        for c in columns:
            if kinds.get(c) != "numeric":
                raise ValueError(f"column {c!r} is not a numeric field")
        rows = []
        for rec in records:
            vec = [rec.get(c) for c in columns]
            if any(v is None for v in vec):
                continue
            rows.append((rec.id, [float(v) for v in vec]))
        return cls.from_rows(columns, rows)


def load_microtable(path: str | Path, columns: list[str] | None = None) -> Microtable:
    """Read a numeric table from CSV: first column is the id, the rest data.

    `columns` selects a subset of the data columns (default: all of them).
    Blank or non-numeric cells are ingestion errors; this format has no
    missing-data convention.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise IngestError(f"{path}: need an id column plus at least one data column")
        available = header[1:]
        if columns is None:
            columns = available
        missing = [c for c in columns if c not in available]
        if missing:
            raise IngestError(f"{path}: columns not in file: {missing}")
        picks = [available.index(c) + 1 for c in columns]
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise IngestError(
                    f"line {line_no}: expected {len(header)} cells, got {len(row)}"
                )
            try:
                vec = [float(row[i]) for i in picks]
            except ValueError:
                raise IngestError(f"line {line_no}: non-numeric cell in data columns")
            rows.append((row[0], vec))
    try:
        return Microtable.from_rows(columns, rows)
    except ValueError as exc:
        raise IngestError(f"{path}: {exc}")
