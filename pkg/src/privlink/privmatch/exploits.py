"""Documented weaknesses of the intersection protocol, run as demonstrations.

Both attacks keep the attacker semihonest in form: every message follows
the protocol exactly.  The damage comes from what the protocol itself
permits, not from breaking it.
"""
from __future__ import annotations

from dataclasses import dataclass

from .group import DomainParams
from .protocol import ProtocolConfig, RunResult, run_intersection
from .wire import MsgKind, decode_msg


@dataclass(frozen=True)
class AsymmetryReport:
    """Who learned what when the initiator withholds the final RESULT."""

    initiator_learned: tuple[bytes, ...]
    responder_learned: tuple[bytes, ...]  # plaintext items; empty when withheld
    responder_observed: dict  # cardinalities readable off the wire
    result_withheld: bool


def demo_asymmetry(
    list_a, list_b, params: DomainParams, seed: int, allow_toy: bool = False
) -> AsymmetryReport:
    """Run with a result-withholding initiator and report the imbalance.

    The initiator walks away with the full intersection; the responder is
    left with ciphertext only, plus whatever the message sizes give away.
    """
    config = ProtocolConfig(
        seed=seed, honest_result=False, shuffle=True, allow_toy=allow_toy
    )
    result = run_intersection(list_a, list_b, params, config)
    observed = _cardinalities_from_transcript(result)
    return AsymmetryReport(
        initiator_learned=result.intersection,
        responder_learned=result.responder_learned or (),
        responder_observed=observed,
        result_withheld=True,
    )


def _cardinalities_from_transcript(result: RunResult) -> dict:
    """What a party or observer can count without any key material."""
    observed = {}
    for _, frame in result.transcript:
        msg = decode_msg(frame)
        if msg.kind is MsgKind.ENC_A:
            observed["len_a"] = len(msg.payload)
        elif msg.kind is MsgKind.ENC_B:
            observed["len_b"] = len(msg.payload)
        elif msg.kind is MsgKind.RESULT:
            observed["len_intersection"] = len(msg.payload)
    return observed


@dataclass(frozen=True)
class InflationReport:
    """Outcome of the dictionary-as-input attack."""

    learned: tuple[bytes, ...]  # responder items recovered by the attacker
    dictionary_size: int
    responder_size: int


def demo_inflation(
    dictionary, honest_b, params: DomainParams, seed: int, allow_toy: bool = False
) -> InflationReport:
    """Declare an entire candidate dictionary as the initiator's input.

    The protocol dutifully reveals dictionary intersect B, which is every
    responder item the attacker managed to guess into the dictionary.  With
    a low-entropy item domain that is simply all of B.
    """
    config = ProtocolConfig(
        seed=seed, honest_result=False, shuffle=True, allow_toy=allow_toy
    )
    result = run_intersection(dictionary, honest_b, params, config)
    return InflationReport(
        learned=result.intersection,
        dictionary_size=len(tuple(dictionary)),
        responder_size=len(tuple(honest_b)),
    )
