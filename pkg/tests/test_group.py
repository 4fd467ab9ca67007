"""Commutative cipher: algebra, hashing, and deterministic group derivation."""
import random

import pytest

from privlink.errors import CapacityError
from privlink.privmatch.group import (
    MIN_MODULUS_BITS,
    TOY_PARAMS,
    DomainParams,
    GroupElement,
    PartyKey,
    commute_encrypt,
    derive_group,
    hash_to_group,
    in_subgroup,
    key_from_seed,
)


def slow_modexp(base: int, exponent: int, modulus: int) -> int:
    """Square-and-multiply written out by hand; the oracle for pow()."""
    result = 1
    base %= modulus
    while exponent:
        if exponent & 1:
            result = (result * base) % modulus
        base = (base * base) % modulus
        exponent >>= 1
    return result


def test_toy_group_worked_example():
    # 23 = 2*11 + 1; the quadratic residues mod 23 form the order-11 subgroup
    assert TOY_PARAMS.p == 23 and TOY_PARAMS.q == 11
    e = GroupElement(4)
    assert in_subgroup(e, TOY_PARAMS)
    ka = PartyKey(exponent=3, params=TOY_PARAMS)
    kb = PartyKey(exponent=7, params=TOY_PARAMS)
    # 4^3 = 64 = 18 (mod 23); 18^7 = 6 (mod 23)
    once = commute_encrypt(ka, e)
    assert once.value == 18
    assert commute_encrypt(kb, once).value == 6
    # the other order: 4^7 = 8 (mod 23); 8^3 = 512 = 6 (mod 23)
    other = commute_encrypt(kb, e)
    assert other.value == 8
    assert commute_encrypt(ka, other).value == 6


def test_toy_params_is_toy():
    assert TOY_PARAMS.is_toy
    assert TOY_PARAMS.bits == 5


def test_domain_params_validation():
    with pytest.raises(ValueError):
        DomainParams(p=23, q=10, bits=5)  # p != 2q+1
    with pytest.raises(ValueError):
        DomainParams(p=21, q=10, bits=5)  # composite
    with pytest.raises(ValueError):
        DomainParams(p=23, q=11, bits=8)  # wrong bit count


def test_party_key_range():
    with pytest.raises(ValueError):
        PartyKey(exponent=1, params=TOY_PARAMS)
    with pytest.raises(ValueError):
        PartyKey(exponent=11, params=TOY_PARAMS)
    PartyKey(exponent=10, params=TOY_PARAMS)


def test_derive_group_deterministic_and_sized():
    params1 = derive_group(256, b"check")
    params2 = derive_group(256, b"check")
    assert params1 == params2
    assert params1.p.bit_length() == 256
    assert params1.p == 2 * params1.q + 1
    assert not params1.is_toy
    other = derive_group(256, b"different")
    assert other.p != params1.p


def test_derive_group_rejects_small_request():
    with pytest.raises(ValueError):
        derive_group(128, b"x")
    with pytest.raises(ValueError):
        derive_group(MIN_MODULUS_BITS - 1, b"x")


def test_hash_to_group_members():
    params = derive_group(256, b"members")
    for item in (b"", b"alice", b"bob", b"\x00\xff" * 30):
        e = hash_to_group(item, params)
        assert in_subgroup(e, params)
        # deterministic
        assert hash_to_group(item, params).value == e.value
    assert hash_to_group(b"alice", params).value != hash_to_group(b"bob", params).value


def test_hash_to_group_toy_members():
    seen = set()
    for i in range(50):
        e = hash_to_group(b"item%d" % i, TOY_PARAMS)
        assert in_subgroup(e, TOY_PARAMS)
        seen.add(e.value)
    # the whole order-11 subgroup should show up across 50 items
    assert seen == {pow(x, 2, 23) for x in range(1, 23)}


def test_in_subgroup_rejects_outsiders():
    # 5 is a quadratic non-residue mod 23: 5^11 = -1 (mod 23)
    assert not in_subgroup(GroupElement(5), TOY_PARAMS)
    assert not in_subgroup(GroupElement(0), TOY_PARAMS)
    assert not in_subgroup(GroupElement(23), TOY_PARAMS)
    assert in_subgroup(GroupElement(1), TOY_PARAMS)


def test_key_from_seed_deterministic():
    params = derive_group(256, b"keys")
    k1 = key_from_seed(params, "42:keyA")
    k2 = key_from_seed(params, "42:keyA")
    k3 = key_from_seed(params, "42:keyB")
    assert k1.exponent == k2.exponent
    assert k1.exponent != k3.exponent


def test_commutativity_against_modexp_oracle():
    params = derive_group(256, b"commute")
    rng = random.Random(20260816)
    for trial in range(200):
        item = b"item-%d" % trial
        e = hash_to_group(item, params)
        ka = PartyKey(exponent=rng.randrange(2, params.q), params=params)
        kb = PartyKey(exponent=rng.randrange(2, params.q), params=params)
        ab = commute_encrypt(kb, commute_encrypt(ka, e)).value
        ba = commute_encrypt(ka, commute_encrypt(kb, e)).value
        assert ab == ba
        # independent oracle: x^(a*b mod q) via hand-rolled square-and-multiply
        want = slow_modexp(e.value, (ka.exponent * kb.exponent) % params.q, params.p)
        assert ab == want


def test_encryption_stays_in_subgroup():
    params = derive_group(256, b"closure")
    key = key_from_seed(params, "k")
    e = hash_to_group(b"x", params)
    assert in_subgroup(commute_encrypt(key, e), params)


def test_derive_group_capacity_error_on_exhaustion(monkeypatch):
    # if no candidate ever tests prime the walk must stop with an error,
    # not spin forever
    import privlink.privmatch.group as grp

    calls = {"n": 0}

    def never_prime(x, rounds):
        calls["n"] += 1
        return False

    monkeypatch.setattr(grp.gmpy2, "is_prime", never_prime)
    with pytest.raises(CapacityError):
        derive_group(256, b"doomed")
    assert calls["n"] >= 200_000
