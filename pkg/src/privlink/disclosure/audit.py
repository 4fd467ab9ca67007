"""Hash-chained, append-only audit log with tamper-evident verification.

Every entry embeds the SHA-256 digest of its predecessor's canonical
encoding; the log additionally tracks the digest of its last entry (the
head), so truncating the tail is as detectable as editing the middle.

On disk the log is line-delimited: a head line `# head <hex>` followed by
one hex-encoded canonical entry per line.
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from ..errors import AuditError

GENESIS_DIGEST = "0" * 64
_FIELD_LEN = struct.Struct(">I")
_SEQ = struct.Struct(">Q")


@dataclass(frozen=True)
class AuditEntry:
    """One accountability record; prev_digest chains it to its predecessor."""

    seq: int
    timestamp: datetime
    actor: str
    query_digest: str
    response_digest: str
    prev_digest: str

    def __post_init__(self):
        if self.seq < 0:
            raise ValueError("seq must be non-negative")
        if self.timestamp.tzinfo is None or self.timestamp.utcoffset().total_seconds() != 0:
            raise ValueError("timestamp must be an explicit UTC instant")
        for name in ("query_digest", "response_digest", "prev_digest"):
            v = getattr(self, name)
            if len(v) != 64 or any(c not in "0123456789abcdef" for c in v):
                raise ValueError(f"{name} must be 64 lowercase hex chars")


def canonical_bytes(entry: AuditEntry) -> bytes:
    """Length-prefixed field encoding; the digest input and the disk format."""
    fields = (
        _SEQ.pack(entry.seq),
        entry.timestamp.isoformat().encode("utf-8"),
        entry.actor.encode("utf-8"),
        entry.query_digest.encode("ascii"),
        entry.response_digest.encode("ascii"),
        entry.prev_digest.encode("ascii"),
    )
    return b"".join(_FIELD_LEN.pack(len(f)) + f for f in fields)


def entry_digest(entry: AuditEntry) -> str:
    return hashlib.sha256(canonical_bytes(entry)).hexdigest()


def parse_entry(blob: bytes) -> AuditEntry:
    """Inverse of canonical_bytes; strict about structure.

    Rejects blobs that decode but do not re-encode to the same bytes:
    verification hashes the canonical form, so accepting an equivalent
    spelling (say, a different timestamp separator) would let a byte-level
    tamper slip past the chain check.
    """
    fields = []
    off = 0
    for _ in range(6):
        if off + _FIELD_LEN.size > len(blob):
            raise AuditError("entry truncated inside a length prefix")
        (n,) = _FIELD_LEN.unpack_from(blob, off)
        off += _FIELD_LEN.size
        if off + n > len(blob):
            raise AuditError("entry field overruns the record")
        fields.append(blob[off : off + n])
        off += n
    if off != len(blob):
        raise AuditError("stray bytes after the last field")
    if len(fields[0]) != _SEQ.size:
        raise AuditError("malformed sequence number")
    try:
        entry = AuditEntry(
            seq=_SEQ.unpack(fields[0])[0],
            timestamp=datetime.fromisoformat(fields[1].decode("utf-8")),
            actor=fields[2].decode("utf-8"),
            query_digest=fields[3].decode("ascii"),
            response_digest=fields[4].decode("ascii"),
            prev_digest=fields[5].decode("ascii"),
        )
    except (ValueError, UnicodeDecodeError) as exc:
        raise AuditError(f"malformed entry fields: {exc}")
    if canonical_bytes(entry) != blob:
        raise AuditError("entry encoding is not canonical")
    return entry


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class AuditLog:
    """In-memory chain; appends refuse to extend an unverifiable tail."""

    def __init__(self, entries: list[AuditEntry] | None = None, head: str | None = None):
        self.entries: list[AuditEntry] = list(entries or [])
        if head is None:
            head = entry_digest(self.entries[-1]) if self.entries else GENESIS_DIGEST
        self.head = head

    def append(
        self,
        actor: str,
        query_digest: str,
        response_digest: str,
        clock: Callable[[], datetime] = _utc_now,
    ) -> AuditEntry:
        if self.entries:
            tail = self.entries[-1]
            if entry_digest(tail) != self.head or tail.seq != len(self.entries) - 1:
                raise AuditError("refusing to append: tail does not verify")
        elif self.head != GENESIS_DIGEST:
            raise AuditError("refusing to append: empty log with non-genesis head")
        entry = AuditEntry(
            seq=len(self.entries),
            timestamp=clock(),
            actor=actor,
            query_digest=query_digest,
            response_digest=response_digest,
            prev_digest=self.head,
        )
        self.entries.append(entry)
        self.head = entry_digest(entry)
        return entry

    def verify_detail(self) -> tuple[bool, int | None, str]:
        """(ok, failing_seq, reason); failing_seq is None when ok."""
        prev = GENESIS_DIGEST
        for i, entry in enumerate(self.entries):
            if entry.seq != i:
                return False, i, f"expected seq {i}, found {entry.seq}"
            if entry.prev_digest != prev:
                return False, i, "previous-entry digest does not match"
            prev = entry_digest(entry)
        if prev != self.head:
            seq = len(self.entries) - 1 if self.entries else None
            return False, seq, "head digest does not match the last entry"
        return True, None, "ok"

    def verify(self) -> bool:
        return self.verify_detail()[0]


def audit_append(
    log: AuditLog,
    actor: str,
    query_digest: str,
    response_digest: str,
    clock: Callable[[], datetime] = _utc_now,
) -> AuditLog:
    """Append one entry and return the log (mutated in place)."""
    log.append(actor, query_digest, response_digest, clock=clock)
    return log


def audit_verify(log: AuditLog) -> bool:
    """True iff seq numbers run 0..n-1 and every chain link verifies."""
    return log.verify()


def save_audit_log(path: str | Path, log: AuditLog) -> None:
    lines = [f"# head {log.head}"]
    lines.extend(canonical_bytes(e).hex() for e in log.entries)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_audit_log(path: str | Path) -> AuditLog:
    """Strict load; raises on structural damage (use verify_file to probe)."""
    head, blobs = _read_lines(path)
    entries = [parse_entry(blob) for blob in blobs]
    return AuditLog(entries=entries, head=head)


def _read_lines(path: str | Path) -> tuple[str, list[bytes]]:
    text = Path(path).read_text(encoding="utf-8")
    head = None
    blobs = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "head":
                head = parts[1]
            continue
        try:
            blobs.append(bytes.fromhex(line))
        except ValueError:
            raise AuditError(f"line {line_no}: not valid hex")
    if head is None:
        raise AuditError("missing head line")
    return head, blobs


def verify_file(path: str | Path) -> tuple[bool, int | None, str]:
    """Lenient verification of a possibly tampered file."""
    try:
        log = load_audit_log(path)
    except AuditError as exc:
        return False, None, str(exc)
    return log.verify_detail()
