"""Synthetic linked file pairs with controlled error and known ground truth.

generate_pairs builds file A of n distinct identities and file B holding
corrupted copies of an overlap fraction of them plus fresh identities, with
the copy pairs recorded as truth.  Each record's corruption draws from its
own derived sub-seed, so outputs are byte-stable no matter how generation
is scheduled.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources

from ..linkage.schema import Record, Schema

EDIT_OPS = ("substitute", "transpose", "delete", "insert")

DEFAULT_SCHEMA = Schema(
    fields=(
        ("id", "text"),
        ("first_name", "text"),
        ("last_name", "text"),
        ("city", "categorical"),
        ("birth_year", "numeric"),
        ("height_cm", "numeric"),
    ),
    id_field="id",
)

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
_DIGITS = "0123456789"


@dataclass(frozen=True)
class ErrorProfile:
    """Corruption knobs: per-field error and blanking rates, allowed edits."""

    field_error_rate: float = 0.0
    missing_rate: float = 0.0
    ops: tuple[str, ...] = EDIT_OPS

    def __post_init__(self):
        for name, rate in (
            ("field_error_rate", self.field_error_rate),
            ("missing_rate", self.missing_rate),
        ):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {rate}")
        bad = set(self.ops) - set(EDIT_OPS)
        if bad or not self.ops:
            raise ValueError(f"ops must be a nonempty subset of {EDIT_OPS}")


@dataclass(frozen=True)
class TruthSet:
    """Ground-truth match pairs; each id appears in at most one pair."""

    pairs: frozenset[tuple[str, str]]
    overlap: float

    def __post_init__(self):
        a_ids = [a for a, _ in self.pairs]
        b_ids = [b for _, b in self.pairs]
        if len(set(a_ids)) != len(a_ids) or len(set(b_ids)) != len(b_ids):
            raise ValueError("an id may appear in at most one truth pair")


def _load_pool(name: str) -> tuple[str, ...]:
    text = resources.files("privlink.corpus.data").joinpath(name).read_text("utf-8")
    return tuple(line for line in text.splitlines() if line)


FIRST_NAMES = _load_pool("first_names.txt")
LAST_NAMES = _load_pool("last_names.txt")
CITIES = _load_pool("cities.txt")


def _alphabet_for(ch: str) -> str:
    return _DIGITS if ch.isdigit() else _LETTERS


def apply_edit(value: str, op: str, pos: int, char: str | None = None) -> str:
    """One deterministic edit at pos; substitute/insert need a char."""
    if op == "substitute":
        return value[:pos] + char + value[pos + 1 :]
    if op == "transpose":
        if pos + 1 >= len(value):
            raise ValueError("transpose needs two characters to swap")
        return value[:pos] + value[pos + 1] + value[pos] + value[pos + 2 :]
    if op == "delete":
        return value[:pos] + value[pos + 1 :]
    if op == "insert":
        return value[:pos] + char + value[pos:]
    raise ValueError(f"unknown edit op {op!r}")


def _random_edit(value: str, ops: tuple[str, ...], rng: random.Random) -> str:
    usable = [op for op in ops if op != "transpose" or len(value) >= 2]
    if not usable:
        return value
    op = rng.choice(usable)
    if op == "insert":
        pos = rng.randrange(len(value) + 1)
        anchor = value[min(pos, len(value) - 1)]
        return apply_edit(value, op, pos, rng.choice(_alphabet_for(anchor)))
    pos = rng.randrange(len(value)) if op != "transpose" else rng.randrange(len(value) - 1)
    if op == "substitute":
        alpha = _alphabet_for(value[pos])
        char = rng.choice([c for c in alpha if c != value[pos]])
        return apply_edit(value, op, pos, char)
    return apply_edit(value, op, pos)


def corrupt_value(value: str, profile: ErrorProfile, seed) -> str:
    """With probability field_error_rate, apply one random edit."""
    if value == "":
        return value
    rng = random.Random(f"{seed}:corrupt")
    if rng.random() >= profile.field_error_rate:
        return value
    return _random_edit(value, profile.ops, rng)


def _fresh_identity(rng: random.Random, used_names: set) -> dict:
    """Draw an identity whose (first, last) pair is unused so far."""
    while True:
        first = rng.choice(FIRST_NAMES)
        last = rng.choice(LAST_NAMES)
        if (first, last) not in used_names:
            used_names.add((first, last))
            break
    return {
        "first_name": first,
        "last_name": last,
        "city": rng.choice(CITIES),
        "birth_year": rng.randrange(1930, 2006),
        "height_cm": rng.randrange(150, 200),
    }


def _corrupt_record(
    identity: dict, profile: ErrorProfile, seed: str
) -> dict:
    """Per-field blanking then at-most-one edit, each field on its own seed."""
    out = {}
    for name, value in identity.items():
        rng = random.Random(f"{seed}:{name}")
        if rng.random() < profile.missing_rate:
            continue
        if rng.random() < profile.field_error_rate:
            corrupted = _random_edit(str(value), profile.ops, rng)
            if corrupted == "":
                continue
            if isinstance(value, int):
                out[name] = int(corrupted)
            else:
                out[name] = corrupted
        else:
            out[name] = value
    return out


def generate_pairs(
    n: int, overlap: float, profile: ErrorProfile, seed: int
) -> tuple[list[Record], list[Record], TruthSet]:
    """Synthesize (fileA, fileB, truth), fully deterministic per seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must be in [0,1], got {overlap}")

    master = random.Random(f"{seed}:master")
    used_names: set = set()
    identities = [_fresh_identity(master, used_names) for _ in range(n)]

    file_a = [
        Record(id=f"A{i:05d}", values={"id": f"A{i:05d}", **identity})
        for i, identity in enumerate(identities)
    ]

    n_copies = round(overlap * n)
    copy_idx = sorted(master.sample(range(n), n_copies))
    b_values = [
        _corrupt_record(identities[i], profile, f"{seed}:copy:{i}") for i in copy_idx
    ]
    fresh_master = random.Random(f"{seed}:fresh")
    b_values.extend(
        _fresh_identity(fresh_master, used_names) for _ in range(n - n_copies)
    )

    # shuffle file B so row order carries no information about the truth
    order = list(range(len(b_values)))
    random.Random(f"{seed}:order").shuffle(order)
    position = {old: new for new, old in enumerate(order)}

    file_b: list[Record] = [None] * len(b_values)
    for old_pos, values in enumerate(b_values):
        b_id = f"B{position[old_pos]:05d}"
        file_b[position[old_pos]] = Record(id=b_id, values={"id": b_id, **values})
    truth_pairs = frozenset(
        (f"A{i:05d}", f"B{position[j]:05d}") for j, i in enumerate(copy_idx)
    )
    return file_a, file_b, TruthSet(pairs=truth_pairs, overlap=overlap)
