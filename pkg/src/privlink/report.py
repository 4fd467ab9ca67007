"""Delimited report emission with a diffable `#` header block."""
from __future__ import annotations

import csv
import sys
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .linkage.engine import LinkageResult


@contextmanager
def open_out(path: str):
    """Writable text handle; `-` means stdout."""
    if path == "-":
        yield sys.stdout
        return
    fh = Path(path).open("w", newline="", encoding="utf-8")
    try:
        yield fh
    finally:
        fh.close()


def write_header(fh, subcommand: str, seed: int | None, params: dict) -> None:
    """Version, seed, and parameters, one `# key: value` line each."""
    fh.write(f"# privlink {__version__}\n")
    fh.write(f"# subcommand: {subcommand}\n")
    if seed is not None:
        fh.write(f"# seed: {seed}\n")
    for key in sorted(params):
        fh.write(f"# {key}: {params[key]}\n")


def write_rows(fh, header: list[str], rows) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


def write_link_report(
    fh, result: LinkageResult, truth: set[tuple[str, str]] | None = None
) -> None:
    """Pair classifications plus a summary block of counts and parameters."""
    fh.write(f"# candidates: {result.candidate_count}\n")
    fh.write(f"# blocked_out: {result.blocked_out_count}\n")
    fh.write(f"# links: {len(result.links)}\n")
    fh.write(f"# possibles: {len(result.possibles)}\n")
    fh.write(f"# nonlinks: {len(result.nonlinks)}\n")
    fh.write(f"# t_mu: {result.thresholds.t_mu!r}\n")
    fh.write(f"# t_lambda: {result.thresholds.t_lambda!r}\n")
    fh.write(f"# model_p: {result.model.p!r}\n")
    for f, (m_row, u_row) in enumerate(zip(result.model.m, result.model.u)):
        fh.write(f"# model_m.{f}: {','.join(repr(x) for x in m_row)}\n")
        fh.write(f"# model_u.{f}: {','.join(repr(x) for x in u_row)}\n")
    if truth is not None:
        precision, recall, f1 = link_scores(result, truth)
        fh.write(f"# precision: {precision!r}\n")
        fh.write(f"# recall: {recall!r}\n")
        fh.write(f"# f1: {f1!r}\n")
    rows = []
    for klass, pairs in (
        ("link", result.links),
        ("possible", result.possibles),
        ("nonlink", result.nonlinks),
    ):
        rows.extend((id_a, id_b, repr(score), klass) for id_a, id_b, score in pairs)
    write_rows(fh, ["idA", "idB", "score", "class"], rows)


def link_scores(
    result: LinkageResult, truth: set[tuple[str, str]]
) -> tuple[float, float, float]:
    """(precision, recall, f1) of the link list against ground truth."""
    predicted = {(a, b) for a, b, _ in result.links}
    tp = len(predicted & truth)
    precision = tp / len(predicted) if predicted else 0.0
    recall = tp / len(truth) if truth else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return precision, recall, f1
