"""Disclosure limitation: methods, risk/utility metrics, policy gate, audit."""
from .audit import (
    GENESIS_DIGEST,
    AuditEntry,
    AuditLog,
    audit_append,
    audit_verify,
    canonical_bytes,
    entry_digest,
    load_audit_log,
    parse_entry,
    save_audit_log,
    verify_file,
)
from .gate import (
    GateRefusal,
    GateResponse,
    Policy,
    PolicyLevel,
    Query,
    gate_evaluate,
    parse_query,
    replay_queries,
)
from .methods import microaggregate, perturb
from .metrics import ReleasePlan, RUPoint, reident_risk, ru_sweep, utility_loss_complement
from .tables import Microtable, load_microtable

__all__ = [
    "GENESIS_DIGEST",
    "AuditEntry",
    "AuditLog",
    "audit_append",
    "audit_verify",
    "canonical_bytes",
    "entry_digest",
    "load_audit_log",
    "parse_entry",
    "save_audit_log",
    "verify_file",
    "GateRefusal",
    "GateResponse",
    "Policy",
    "PolicyLevel",
    "Query",
    "gate_evaluate",
    "parse_query",
    "replay_queries",
    "microaggregate",
    "perturb",
    "ReleasePlan",
    "RUPoint",
    "reident_risk",
    "ru_sweep",
    "utility_loss_complement",
    "Microtable",
    "load_microtable",
]
