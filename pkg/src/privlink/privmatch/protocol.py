"""Two-party private set intersection over the commutative cipher.

Message flow (initiator I holds list A, responder R holds list B):

    I -> R   HELLO          group parameters and run seed, checked by R
    I -> R   ENC_A          E_a(hash(x)) for every x in A, in A's order
    R -> I   DOUBLE_ENC_A   E_b(E_a(hash(x))), order shuffled under the run seed
    R -> I   ENC_B          E_b(hash(y)) for every y in B, in B's order
    I -> R   RESULT         plaintext intersection, only when I is honest

The initiator applies its key to ENC_B, undoes the seed-derived shuffle,
and reads the intersection off its own list positions.  The responder
never sees anything but ciphertext unless RESULT arrives.  Any message
out of order draws ABORT and poisons the receiving party.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from ..errors import FramingError, ProtocolError, TransportError
from .group import (
    DomainParams,
    GroupElement,
    PartyKey,
    commute_encrypt,
    hash_to_group,
    in_subgroup,
    key_from_seed,
)
from .wire import MsgKind, WireMessage, decode_msg, element_to_int, encode_msg, int_to_element

SEED_WIDTH = 8  # bytes of run seed carried in HELLO
DEFAULT_JOIN_TIMEOUT = 30.0


class Phase(enum.Enum):
    START = "start"
    WAIT_HELLO = "wait-hello"
    WAIT_ENC_A = "wait-enc-a"
    WAIT_DOUBLE_ENC_A = "wait-double-enc-a"
    WAIT_ENC_B = "wait-enc-b"
    WAIT_RESULT = "wait-result"
    DONE = "done"
    ABORTED = "aborted"


@dataclass(frozen=True)
class ProtocolConfig:
    """Run-wide knobs shared by both parties."""

    seed: int
    honest_result: bool = True
    shuffle: bool = True
    allow_toy: bool = False


def _shuffle_perm(seed: int, n: int) -> list[int]:
    """Permutation applied by the responder; position i emits input perm[i]."""
    perm = list(range(n))
    random.Random(f"{seed}:shuffle:{n}").shuffle(perm)
    return perm


@dataclass
class PartyState:
    """One side of the protocol; mutated in place by the step functions."""

    role: str  # "initiator" | "responder"
    phase: Phase
    params: DomainParams
    key: PartyKey
    config: ProtocolConfig
    own_items: tuple[bytes, ...]
    double_enc_a: list[int] = field(default_factory=list)
    intersection: tuple[bytes, ...] | None = None
    learned: tuple[bytes, ...] | None = None  # responder side, from RESULT
    abort_reason: str | None = None

    @property
    def done(self) -> bool:
        return self.phase is Phase.DONE

    @property
    def poisoned(self) -> bool:
        return self.phase is Phase.ABORTED


def _as_bytes(items) -> tuple[bytes, ...]:
    out = []
    for item in items:
        out.append(item.encode("utf-8") if isinstance(item, str) else bytes(item))
    return tuple(out)


def make_initiator(
    items, params: DomainParams, config: ProtocolConfig
) -> PartyState:
    _check_params(params, config)
    return PartyState(
        role="initiator",
        phase=Phase.START,
        params=params,
        key=key_from_seed(params, f"{config.seed}:keyA"),
        config=config,
        own_items=_as_bytes(items),
    )


def make_responder(
    items, params: DomainParams, config: ProtocolConfig
) -> PartyState:
    _check_params(params, config)
    return PartyState(
        role="responder",
        phase=Phase.WAIT_HELLO,
        params=params,
        key=key_from_seed(params, f"{config.seed}:keyB"),
        config=config,
        own_items=_as_bytes(items),
    )


def _check_params(params: DomainParams, config: ProtocolConfig) -> None:
    if params.is_toy and not config.allow_toy:
        raise ProtocolError(
            f"{params.bits}-bit modulus is below the minimum; pass allow_toy for tests"
        )


def _abort(state: PartyState, reason: str) -> list[WireMessage]:
    state.phase = Phase.ABORTED
    state.abort_reason = reason
    return [WireMessage(kind=MsgKind.ABORT, payload=(reason.encode("utf-8"),))]


def _peer_reason(msg: WireMessage) -> str:
    if msg.payload:
        return "peer aborted: " + msg.payload[0].decode("utf-8", "replace")
    return "peer aborted"


def _decode_elements(state: PartyState, msg: WireMessage) -> list[int] | None:
    """Parse and subgroup-check every element; None means reject."""
    values = []
    for raw in msg.payload:
        v = element_to_int(raw)
        if not in_subgroup(GroupElement(v), state.params):
            return None
        values.append(v)
    return values


def _encrypt_items(state: PartyState) -> list[int]:
    return [
        commute_encrypt(state.key, hash_to_group(item, state.params)).value
        for item in state.own_items
    ]


def initiator_step(
    state: PartyState, incoming: WireMessage | None = None
) -> tuple[PartyState, list[WireMessage]]:
    """Advance the initiator; call with None to start the run."""
    if state.poisoned:
        return state, []
    if state.phase is Phase.START:
        if incoming is not None:
            return state, _abort(state, "unexpected message before start")
        hello = WireMessage(
            kind=MsgKind.HELLO,
            payload=(
                int_to_element(state.params.p),
                int_to_element(state.params.q),
                state.config.seed.to_bytes(SEED_WIDTH, "big", signed=False),
            ),
        )
        enc_a = WireMessage(
            kind=MsgKind.ENC_A,
            payload=tuple(int_to_element(v) for v in _encrypt_items(state)),
        )
        state.phase = Phase.WAIT_DOUBLE_ENC_A
        return state, [hello, enc_a]

    if incoming is None:
        return state, []
    if incoming.kind is MsgKind.ABORT:
        state.phase = Phase.ABORTED
        state.abort_reason = _peer_reason(incoming)
        return state, []

    if state.phase is Phase.WAIT_DOUBLE_ENC_A:
        if incoming.kind is not MsgKind.DOUBLE_ENC_A:
            return state, _abort(state, f"expected DOUBLE_ENC_A, got {incoming.kind.name}")
        if len(incoming.payload) != len(state.own_items):
            return state, _abort(state, "DOUBLE_ENC_A count does not match our list")
        values = _decode_elements(state, incoming)
        if values is None:
            return state, _abort(state, "element outside the subgroup")
        state.double_enc_a = values
        state.phase = Phase.WAIT_ENC_B
        return state, []

    if state.phase is Phase.WAIT_ENC_B:
        if incoming.kind is not MsgKind.ENC_B:
            return state, _abort(state, f"expected ENC_B, got {incoming.kind.name}")
        enc_b = _decode_elements(state, incoming)
        if enc_b is None:
            return state, _abort(state, "element outside the subgroup")
        double_b = {commute_encrypt(state.key, GroupElement(v)).value for v in enc_b}
        n = len(state.own_items)
        if state.config.shuffle:
            perm = _shuffle_perm(state.config.seed, n)
            unshuffled = [0] * n
            for pos, original in enumerate(perm):
                unshuffled[original] = state.double_enc_a[pos]
        else:
            unshuffled = state.double_enc_a
        state.intersection = tuple(
            item for j, item in enumerate(state.own_items) if unshuffled[j] in double_b
        )
        state.phase = Phase.DONE
        if state.config.honest_result:
            return state, [WireMessage(kind=MsgKind.RESULT, payload=state.intersection)]
        return state, []

    return state, _abort(state, f"no message legal in phase {state.phase.value}")


def responder_step(
    state: PartyState, incoming: WireMessage
) -> tuple[PartyState, list[WireMessage]]:
    """Advance the responder with one received message."""
    if state.poisoned:
        return state, []
    if incoming.kind is MsgKind.ABORT:
        state.phase = Phase.ABORTED
        state.abort_reason = _peer_reason(incoming)
        return state, []

    if state.phase is Phase.WAIT_HELLO:
        if incoming.kind is not MsgKind.HELLO:
            return state, _abort(state, f"expected HELLO, got {incoming.kind.name}")
        if len(incoming.payload) != 3:
            return state, _abort(state, "malformed HELLO")
        p = element_to_int(incoming.payload[0])
        q = element_to_int(incoming.payload[1])
        seed = int.from_bytes(incoming.payload[2], "big")
        if p != state.params.p or q != state.params.q:
            return state, _abort(state, "group parameter mismatch")
        if seed != state.config.seed:
            return state, _abort(state, "run seed mismatch")
        state.phase = Phase.WAIT_ENC_A
        return state, []

    if state.phase is Phase.WAIT_ENC_A:
        if incoming.kind is not MsgKind.ENC_A:
            return state, _abort(state, f"expected ENC_A, got {incoming.kind.name}")
        values = _decode_elements(state, incoming)
        if values is None:
            return state, _abort(state, "element outside the subgroup")
        doubled = [commute_encrypt(state.key, GroupElement(v)).value for v in values]
        if state.config.shuffle:
            perm = _shuffle_perm(state.config.seed, len(doubled))
            doubled = [doubled[perm[i]] for i in range(len(doubled))]
        double_msg = WireMessage(
            kind=MsgKind.DOUBLE_ENC_A,
            payload=tuple(int_to_element(v) for v in doubled),
        )
        enc_b = WireMessage(
            kind=MsgKind.ENC_B,
            payload=tuple(int_to_element(v) for v in _encrypt_items(state)),
        )
        state.phase = Phase.WAIT_RESULT
        return state, [double_msg, enc_b]

    if state.phase is Phase.WAIT_RESULT:
        if incoming.kind is not MsgKind.RESULT:
            return state, _abort(state, f"expected RESULT, got {incoming.kind.name}")
        state.learned = tuple(incoming.payload)
        state.phase = Phase.DONE
        return state, []

    return state, _abort(state, f"no message legal in phase {state.phase.value}")


@dataclass(frozen=True)
class RunResult:
    """Initiator's view of one protocol run."""

    intersection: tuple[bytes, ...]
    transcript: tuple[tuple[str, bytes], ...]  # ("sent"|"recv", frame)
    responder_learned: tuple[bytes, ...] | None


def run_initiator(items, params, endpoint, config: ProtocolConfig) -> RunResult:
    """Drive the initiator role over a framed endpoint."""
    state = make_initiator(items, params, config)
    transcript: list[tuple[str, bytes]] = []

    def send_all(msgs):
        for m in msgs:
            frame = encode_msg(m)
            transcript.append(("sent", frame))
            endpoint.send_frame(frame)

    state, out = initiator_step(state, None)
    send_all(out)
    try:
        while not state.done and not state.poisoned:
            frame = endpoint.recv_frame()
            transcript.append(("recv", frame))
            try:
                msg = decode_msg(frame)
            except FramingError as exc:
                send_all(_abort(state, f"malformed frame: {exc}"))
                break
            state, out = initiator_step(state, msg)
            send_all(out)
    except TransportError as exc:
        raise ProtocolError(f"transport failed in phase {state.phase.value}: {exc}")
    if state.poisoned:
        raise ProtocolError(f"protocol aborted: {state.abort_reason}")
    return RunResult(
        intersection=state.intersection,
        transcript=tuple(transcript),
        responder_learned=None,
    )


def run_responder(items, params, endpoint, config: ProtocolConfig) -> PartyState:
    """Drive the responder role until DONE, peer close, or abort."""
    state = make_responder(items, params, config)
    while not state.done and not state.poisoned:
        try:
            frame = endpoint.recv_frame()
        except TransportError:
            # initiator may legitimately stop after ENC_B when withholding RESULT
            if state.phase is Phase.WAIT_RESULT:
                break
            raise ProtocolError(f"transport failed in phase {state.phase.value}")
        try:
            msg = decode_msg(frame)
        except FramingError as exc:
            for m in _abort(state, f"malformed frame: {exc}"):
                endpoint.send_frame(encode_msg(m))
            break
        state, out = responder_step(state, msg)
        for m in out:
            endpoint.send_frame(encode_msg(m))
    return state


def run_intersection(
    list_a,
    list_b,
    params: DomainParams,
    config: ProtocolConfig,
    transport: str = "loopback",
) -> RunResult:
    """Full two-party run; loopback transport runs both roles in-process."""
    if transport != "loopback":
        raise ValueError("run_intersection drives the loopback transport only; "
                         "use run_initiator/run_responder over socket endpoints")
    from .transport import LoopbackPair
    import threading

    pair = LoopbackPair()
    responder_state: dict = {}

    def responder_main():
        try:
            responder_state["state"] = run_responder(list_b, params, pair.b, config)
        except Exception as exc:  # surfaced after join
            responder_state["error"] = exc
        finally:
            pair.b.close()

    thread = threading.Thread(target=responder_main, daemon=True)
    thread.start()
    try:
        result = run_initiator(list_a, params, pair.a, config)
    finally:
        pair.a.close()
        thread.join(timeout=DEFAULT_JOIN_TIMEOUT)
    if "error" in responder_state:
        raise responder_state["error"]
    final = responder_state.get("state")
    learned = final.learned if final is not None else None
    return RunResult(
        intersection=result.intersection,
        transcript=result.transcript,
        responder_learned=learned,
    )
