"""Commutative cipher: exponentiation in the prime-order subgroup of a safe prime.

Items are hashed into the quadratic-residue subgroup of p = 2q + 1 and
encrypted by raising to a secret exponent mod p.  Because the subgroup has
prime order q, exponentiation under two different keys commutes:
(x^a)^b = (x^b)^a = x^(ab mod q).
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

import gmpy2

from ..errors import CapacityError

MIN_MODULUS_BITS = 256
_PRIMALITY_ROUNDS = 40


@dataclass(frozen=True)
class DomainParams:
    """Safe-prime group: p = 2q + 1 with both p and q prime."""

    p: int
    q: int
    bits: int

    def __post_init__(self):
        if self.p != 2 * self.q + 1:
            raise ValueError("p must equal 2q + 1")
        if not (gmpy2.is_prime(self.p, _PRIMALITY_ROUNDS) and gmpy2.is_prime(self.q, _PRIMALITY_ROUNDS)):
            raise ValueError("p and q must both be prime")
        if self.bits != self.p.bit_length():
            raise ValueError(f"bits {self.bits} does not match p ({self.p.bit_length()} bits)")

    @property
    def is_toy(self) -> bool:
        return self.bits < MIN_MODULUS_BITS


@dataclass(frozen=True)
class PartyKey:
    """Secret exponent in [2, q-1]; q prime makes it automatically invertible."""

    exponent: int
    params: DomainParams

    def __post_init__(self):
        if not 2 <= self.exponent <= self.params.q - 1:
            raise ValueError("exponent must lie in [2, q-1]")


@dataclass(frozen=True)
class GroupElement:
    """A residue in the order-q subgroup (value^q mod p = 1)."""

    value: int


def in_subgroup(e: GroupElement, params: DomainParams) -> bool:
    return 1 <= e.value < params.p and pow(e.value, params.q, params.p) == 1


def derive_group(bits: int, seed: bytes) -> DomainParams:
    """Deterministically derive a safe-prime group of the requested size.

    Candidate q values come from a counter-mode hash stream over the seed;
    the search walks odd candidates until both q and 2q + 1 are prime.
    """
    if bits < MIN_MODULUS_BITS:
        raise ValueError(f"modulus must be at least {MIN_MODULUS_BITS} bits, got {bits}")
    q_bits = bits - 1
    max_attempts = 200_000
    q = _seed_candidate(seed, q_bits)
    for _ in range(max_attempts):
        if gmpy2.is_prime(q, _PRIMALITY_ROUNDS) and gmpy2.is_prime(2 * q + 1, _PRIMALITY_ROUNDS):
            return DomainParams(p=2 * q + 1, q=q, bits=bits)
        q += 2
        if q.bit_length() > q_bits:  # walked past the size band; restart the stream
            q = _seed_candidate(seed + b"+", q_bits)
    raise CapacityError(f"no {bits}-bit safe prime found within {max_attempts} attempts")


def _seed_candidate(seed: bytes, q_bits: int) -> int:
    """Odd integer of exactly q_bits bits, derived from the seed."""
    n_bytes = (q_bits + 7) // 8 + 8
    stream = b"".join(
        hashlib.sha256(b"group-derive:%d:" % i + seed).digest()
        for i in range((n_bytes // 32) + 1)
    )
    x = int.from_bytes(stream[:n_bytes], "big")
    return (x & ((1 << q_bits) - 1)) | (1 << (q_bits - 1)) | 1


def key_from_seed(params: DomainParams, seed: str) -> PartyKey:
    """Deterministic key for reproducible runs."""
    rng = random.Random(seed)
    return PartyKey(exponent=rng.randrange(2, params.q), params=params)


def hash_to_group(item: bytes, params: DomainParams) -> GroupElement:
    """Digest the item into the quadratic-residue subgroup.

    The digest stream is expanded wide enough to make the mod-p reduction
    near-uniform, then squared to guarantee subgroup membership.  A zero
    residue (astronomically rare) is retried under a fresh counter.
    """
    n_bytes = (params.p.bit_length() + 7) // 8 + 16
    counter = 0
    while True:
        stream = b"".join(
            hashlib.sha256(b"hash-to-group:%d:%d:" % (counter, i) + item).digest()
            for i in range((n_bytes // 32) + 1)
        )
        x = int.from_bytes(stream[:n_bytes], "big") % params.p
        if x != 0:
            return GroupElement(value=pow(x, 2, params.p))
        counter += 1


def commute_encrypt(key: PartyKey, e: GroupElement) -> GroupElement:
    """Raise the element to the key's exponent; commutes across keys."""
    return GroupElement(value=pow(e.value, key.exponent, key.params.p))


# small, hand-checkable group for protocol tests (23 = 2*11 + 1)
TOY_PARAMS = DomainParams(p=23, q=11, bits=5)
