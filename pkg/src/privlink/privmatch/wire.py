"""Bit-exact wire framing for protocol messages.

Frame layout, all integers big-endian:

    4 bytes   payload length L
    1 byte    message kind
    L bytes   payload: 2-byte element count, then per element a 2-byte
              length followed by that many magnitude bytes

Group elements travel as minimal-length big-endian magnitudes (value 0 is
a single zero byte, though no valid element is 0).
"""
from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

from ..errors import FramingError

HEADER = struct.Struct(">IB")
MAX_PAYLOAD = 1 << 24  # 16 MiB; anything larger is a framing error
MAX_ELEMENTS = 0xFFFF
MAX_ELEMENT_LEN = 0xFFFF


class MsgKind(enum.IntEnum):
    HELLO = 0
    ENC_A = 1
    DOUBLE_ENC_A = 2
    ENC_B = 3
    RESULT = 4
    ABORT = 5


@dataclass(frozen=True)
class WireMessage:
    kind: MsgKind
    payload: tuple[bytes, ...] = ()


def int_to_element(value: int) -> bytes:
    """Minimal-length big-endian magnitude."""
    if value < 0:
        raise ValueError("group element values are non-negative")
    return value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big")


def element_to_int(data: bytes) -> int:
    return int.from_bytes(data, "big")


def encode_msg(m: WireMessage) -> bytes:
    if len(m.payload) > MAX_ELEMENTS:
        raise FramingError(f"{len(m.payload)} elements exceed the per-message cap")
    parts = [struct.pack(">H", len(m.payload))]
    for elem in m.payload:
        if len(elem) > MAX_ELEMENT_LEN:
            raise FramingError(f"element of {len(elem)} bytes exceeds the cap")
        parts.append(struct.pack(">H", len(elem)))
        parts.append(elem)
    payload = b"".join(parts)
    if len(payload) > MAX_PAYLOAD:
        raise FramingError(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    return HEADER.pack(len(payload), int(m.kind)) + payload


def decode_msg(frame: bytes) -> WireMessage:
    """Decode exactly one complete frame; reject anything malformed."""
    if len(frame) < HEADER.size:
        raise FramingError(f"frame of {len(frame)} bytes is shorter than the header")
    length, kind_byte = HEADER.unpack_from(frame)
    if length > MAX_PAYLOAD:
        raise FramingError(f"declared payload of {length} bytes exceeds {MAX_PAYLOAD}")
    if len(frame) != HEADER.size + length:
        raise FramingError(
            f"frame is {len(frame)} bytes but header declares {HEADER.size + length}"
        )
    try:
        kind = MsgKind(kind_byte)
    except ValueError:
        raise FramingError(f"unknown message kind {kind_byte}")
    payload = frame[HEADER.size :]
    if len(payload) < 2:
        raise FramingError("payload too short for an element count")
    (count,) = struct.unpack_from(">H", payload)
    elems = []
    off = 2
    for i in range(count):
        if off + 2 > len(payload):
            raise FramingError(f"element {i}: truncated length prefix")
        (elen,) = struct.unpack_from(">H", payload, off)
        off += 2
        if off + elen > len(payload):
            raise FramingError(f"element {i}: declares {elen} bytes past frame end")
        elems.append(payload[off : off + elen])
        off += elen
    if off != len(payload):
        raise FramingError(f"{len(payload) - off} stray bytes after the last element")
    return WireMessage(kind=kind, payload=tuple(elems))
