"""Selective-revelation gate: queries answered only through a release plan.

A policy maps each authorization level to a release plan and a maximum
tolerable risk.  Every query is applied to the selected rows via the
level's plan; the sanitized result is released only when its measured
re-identification risk stays within the level's ceiling.  Raw rows never
leave the gate, and every decision, release or refusal, is audited.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from datetime import datetime
from typing import Callable

from .audit import AuditLog, _utc_now
from .metrics import ReleasePlan, reident_risk
from .tables import Microtable

AGGREGATES = ("rows", "mean", "sum", "count")


@dataclass(frozen=True)
class Query:
    """Selection (inclusive column ranges, ANDed) plus an aggregation."""

    agg: str
    where: tuple[tuple[str, float, float], ...] = ()

    def __post_init__(self):
        if self.agg not in AGGREGATES:
            raise ValueError(f"agg must be one of {AGGREGATES}, got {self.agg!r}")

    def canonical(self) -> str:
        clauses = ",".join(f"{c}:{lo!r}:{hi!r}" for c, lo, hi in self.where)
        return f"agg={self.agg};where={clauses}"


def parse_query(text: str) -> Query:
    """Parse `agg=<kind> [where=col:lo:hi[,col:lo:hi...]]`."""
    agg = None
    where = []
    for token in text.split():
        key, sep, value = token.partition("=")
        if not sep:
            raise ValueError(f"bad token {token!r}")
        if key == "agg":
            agg = value
        elif key == "where":
            for clause in value.split(","):
                parts = clause.split(":")
                if len(parts) != 3:
                    raise ValueError(f"bad where clause {clause!r}")
                where.append((parts[0], float(parts[1]), float(parts[2])))
        else:
            raise ValueError(f"unknown key {key!r}")
    if agg is None:
        raise ValueError("query must name an aggregation")
    return Query(agg=agg, where=tuple(where))


@dataclass(frozen=True)
class PolicyLevel:
    """One authorization tier."""

    level: int
    max_risk: float
    plan: ReleasePlan

    def __post_init__(self):
        if not 0.0 <= self.max_risk <= 1.0:
            raise ValueError(f"max_risk must be in [0,1], got {self.max_risk}")


@dataclass(frozen=True)
class Policy:
    """Levels in ascending order with a non-decreasing risk ceiling."""

    levels: tuple[PolicyLevel, ...]

    def __post_init__(self):
        if not self.levels:
            raise ValueError("policy needs at least one level")
        for a, b in zip(self.levels, self.levels[1:]):
            if b.level <= a.level:
                raise ValueError("level ordinals must be strictly increasing")
            if b.max_risk < a.max_risk:
                raise ValueError("max_risk must be non-decreasing in level")

    def lookup(self, level: int) -> PolicyLevel:
        for pl in self.levels:
            if pl.level == level:
                return pl
        raise KeyError(f"no level {level} in policy")


@dataclass(frozen=True)
class GateResponse:
    """A released, sanitized answer; never raw rows."""

    level: int
    agg: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, tuple[float, ...]], ...]  # only for agg == "rows"
    aggregate: tuple[float, ...] | None
    count: int
    measured_risk: float

    def canonical(self) -> str:
        rows = "|".join(f"{rid}:" + ",".join(repr(v) for v in vec) for rid, vec in self.rows)
        aggr = "" if self.aggregate is None else ",".join(repr(v) for v in self.aggregate)
        return (
            f"response;level={self.level};agg={self.agg};count={self.count};"
            f"risk={self.measured_risk!r};aggregate={aggr};rows={rows}"
        )


@dataclass(frozen=True)
class GateRefusal:
    level: int
    reason: str

    def canonical(self) -> str:
        return f"refusal;level={self.level};reason={self.reason}"


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _select_ids(t: Microtable, query: Query) -> list[str]:
    cols = {c: i for i, c in enumerate(t.columns)}
    for c, _, _ in query.where:
        if c not in cols:
            raise ValueError(f"unknown column {c!r}")
    keep = []
    for i, rid in enumerate(t.ids):
        row = t.values[i]
        if all(lo <= row[cols[c]] <= hi for c, lo, hi in query.where):
            keep.append(rid)
    return keep


def gate_evaluate(
    query: Query | str,
    level: PolicyLevel,
    policy: Policy,
    t: Microtable,
    log: AuditLog,
    actor: str = "analyst",
    clock: Callable[[], datetime] = _utc_now,
) -> GateResponse | GateRefusal:
    """Answer one query at one level; always appends an audit entry."""
    if policy.lookup(level.level) != level:
        raise ValueError("level is not part of the supplied policy")

    raw_text = query if isinstance(query, str) else query.canonical()
    query_digest = _digest(raw_text)

    def finish(decision):
        log.append(actor, query_digest, _digest(decision.canonical()), clock=clock)
        return decision

    if isinstance(query, str):
        try:
            query = parse_query(query)
        except ValueError as exc:
            return finish(GateRefusal(level=level.level, reason=f"malformed: {exc}"))

    try:
        selected_ids = _select_ids(t, query)
    except ValueError as exc:
        return finish(GateRefusal(level=level.level, reason=f"malformed: {exc}"))
    if not selected_ids:
        return finish(GateRefusal(level=level.level, reason="empty selection"))

    selection = t.subset(selected_ids)
    try:
        released = level.plan.apply(selection)
    except ValueError as exc:
        return finish(
            GateRefusal(level=level.level, reason=f"plan not applicable: {exc}")
        )

    measured = reident_risk(selection, released)
    if measured > level.max_risk:
        return finish(
            GateRefusal(
                level=level.level,
                reason=f"measured risk {measured:.6f} exceeds ceiling {level.max_risk:.6f}",
            )
        )

    rows: tuple = ()
    aggregate = None
    if query.agg == "rows":
        rows = tuple(
            (rid, tuple(float(v) for v in released.values[i]))
            for i, rid in enumerate(released.ids)
        )
    elif query.agg == "mean":
        aggregate = tuple(float(v) for v in released.values.mean(axis=0))
    elif query.agg == "sum":
        aggregate = tuple(float(v) for v in released.values.sum(axis=0))
    return finish(
        GateResponse(
            level=level.level,
            agg=query.agg,
            columns=released.columns,
            rows=rows,
            aggregate=aggregate,
            count=released.n_rows,
            measured_risk=measured,
        )
    )


def replay_queries(
    queries: list[str],
    level: PolicyLevel,
    policy: Policy,
    t: Microtable,
    log: AuditLog,
    actor: str = "analyst",
    clock: Callable[[], datetime] = _utc_now,
) -> list[GateResponse | GateRefusal]:
    """Run a query log through the gate in order."""
    return [
        gate_evaluate(q, level, policy, t, log, actor=actor, clock=clock)
        for q in queries
    ]
