"""Private set intersection over a commutative cipher, with exploit demos."""
from .exploits import AsymmetryReport, InflationReport, demo_asymmetry, demo_inflation
from .group import (
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
from .protocol import (
    PartyState,
    Phase,
    ProtocolConfig,
    RunResult,
    initiator_step,
    make_initiator,
    make_responder,
    responder_step,
    run_initiator,
    run_intersection,
    run_responder,
)
from .transport import LoopbackPair, SocketEndpoint, connect_endpoint, listen_endpoint
from .wire import MsgKind, WireMessage, decode_msg, encode_msg

__all__ = [
    "AsymmetryReport",
    "InflationReport",
    "demo_asymmetry",
    "demo_inflation",
    "MIN_MODULUS_BITS",
    "TOY_PARAMS",
    "DomainParams",
    "GroupElement",
    "PartyKey",
    "commute_encrypt",
    "derive_group",
    "hash_to_group",
    "in_subgroup",
    "key_from_seed",
    "PartyState",
    "Phase",
    "ProtocolConfig",
    "RunResult",
    "initiator_step",
    "make_initiator",
    "make_responder",
    "responder_step",
    "run_initiator",
    "run_intersection",
    "run_responder",
    "LoopbackPair",
    "SocketEndpoint",
    "connect_endpoint",
    "listen_endpoint",
    "MsgKind",
    "WireMessage",
    "decode_msg",
    "encode_msg",
]
