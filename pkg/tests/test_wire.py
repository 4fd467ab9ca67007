"""Frame encoding: byte-exact layout, round trips, malformed-input rejection."""
import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privlink.errors import FramingError
from privlink.privmatch.wire import (
    MAX_PAYLOAD,
    MsgKind,
    WireMessage,
    decode_msg,
    element_to_int,
    encode_msg,
    int_to_element,
)


def test_exact_byte_layout():
    # HELLO with elements 0x04 and 0x1234: header declares 9 payload bytes
    frame = encode_msg(WireMessage(MsgKind.HELLO, (b"\x04", b"\x12\x34")))
    assert frame == bytes(
        [0, 0, 0, 9]  # payload length 9, big-endian
        + [0]  # kind HELLO
        + [0, 2]  # two elements
        + [0, 1, 0x04]  # element one: length 1
        + [0, 2, 0x12, 0x34]  # element two: length 2
    )


def test_empty_payload_layout():
    frame = encode_msg(WireMessage(MsgKind.ABORT, ()))
    assert frame == bytes([0, 0, 0, 2, 5, 0, 0])


def test_all_kinds_round_trip():
    for kind in MsgKind:
        msg = WireMessage(kind, (b"x", b"", b"\x00\xff"))
        back = decode_msg(encode_msg(msg))
        assert back == msg


def test_int_element_round_trip():
    for value in (0, 1, 127, 128, 255, 256, 65535, 1 << 255, (1 << 256) - 1):
        blob = int_to_element(value)
        assert element_to_int(blob) == value
        # minimal length: no leading zero byte unless the value is 0
        assert len(blob) == max(1, (value.bit_length() + 7) // 8)
    with pytest.raises(ValueError):
        int_to_element(-1)


def test_decode_rejects_short_frame():
    with pytest.raises(FramingError):
        decode_msg(b"\x00\x00")


def test_decode_rejects_unknown_kind():
    frame = bytearray(encode_msg(WireMessage(MsgKind.HELLO, ())))
    frame[4] = 99
    with pytest.raises(FramingError):
        decode_msg(bytes(frame))


def test_decode_rejects_wrong_declared_length():
    frame = bytearray(encode_msg(WireMessage(MsgKind.ENC_A, (b"ab",))))
    frame[3] += 1  # declare one byte more than present
    with pytest.raises(FramingError):
        decode_msg(bytes(frame))
    frame[3] -= 2  # declare one byte fewer
    with pytest.raises(FramingError):
        decode_msg(bytes(frame))


def test_decode_rejects_truncated_element():
    # element declares 5 bytes but only 2 follow
    payload = struct.pack(">H", 1) + struct.pack(">H", 5) + b"ab"
    frame = struct.pack(">IB", len(payload), 1) + payload
    with pytest.raises(FramingError):
        decode_msg(frame)


def test_decode_rejects_stray_bytes():
    payload = struct.pack(">H", 1) + struct.pack(">H", 1) + b"a" + b"JUNK"
    frame = struct.pack(">IB", len(payload), 1) + payload
    with pytest.raises(FramingError):
        decode_msg(frame)


def test_decode_rejects_oversize_declaration():
    frame = struct.pack(">IB", MAX_PAYLOAD + 1, 0)
    with pytest.raises(FramingError):
        decode_msg(frame)


def test_decode_rejects_missing_count():
    frame = struct.pack(">IB", 1, 0) + b"\x00"
    with pytest.raises(FramingError):
        decode_msg(frame)


def test_encode_rejects_too_many_elements():
    with pytest.raises(FramingError):
        encode_msg(WireMessage(MsgKind.ENC_A, (b"x",) * 65536))


def test_random_messages_round_trip():
    rng = random.Random(20260816)
    for _ in range(1000):
        kind = MsgKind(rng.randrange(6))
        elems = tuple(
            rng.randbytes(rng.randrange(0, 40)) for _ in range(rng.randrange(0, 12))
        )
        msg = WireMessage(kind, elems)
        assert decode_msg(encode_msg(msg)) == msg


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from(list(MsgKind)),
    st.lists(st.binary(max_size=64), max_size=16),
)
def test_round_trip_property(kind, elems):
    msg = WireMessage(kind, tuple(elems))
    assert decode_msg(encode_msg(msg)) == msg


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=200))
def test_decode_never_hangs_or_crashes(blob):
    # arbitrary bytes either decode to a message or raise FramingError
    try:
        msg = decode_msg(blob)
    except FramingError:
        return
    assert encode_msg(msg) == blob  # any accepted frame re-encodes identically
