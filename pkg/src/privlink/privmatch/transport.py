"""Reliable ordered frame delivery: in-process loopback and TCP endpoints."""
from __future__ import annotations

import queue
import socket
import struct
import time

from ..errors import TransportError
from .wire import HEADER, MAX_PAYLOAD

DEFAULT_TIMEOUT = 30.0


class LoopbackPair:
    """Two in-memory endpoints joined by unbounded FIFO queues."""

    def __init__(self, timeout: float = DEFAULT_TIMEOUT):
        a_to_b: queue.Queue = queue.Queue()
        b_to_a: queue.Queue = queue.Queue()
        self.a = QueueEndpoint(send_q=a_to_b, recv_q=b_to_a, timeout=timeout)
        self.b = QueueEndpoint(send_q=b_to_a, recv_q=a_to_b, timeout=timeout)


class QueueEndpoint:
    _CLOSED = object()

    def __init__(self, send_q: queue.Queue, recv_q: queue.Queue, timeout: float):
        self._send_q = send_q
        self._recv_q = recv_q
        self._timeout = timeout
        self._closed = False

    def send_frame(self, frame: bytes) -> None:
        if self._closed:
            raise TransportError("endpoint is closed")
        self._send_q.put(frame)

    def recv_frame(self) -> bytes:
        try:
            item = self._recv_q.get(timeout=self._timeout)
        except queue.Empty:
            raise TransportError(f"no frame arrived within {self._timeout}s")
        if item is self._CLOSED:
            raise TransportError("peer closed the connection")
        return item

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._send_q.put(self._CLOSED)


class SocketEndpoint:
    """One framed peer over a connected TCP socket."""

    def __init__(self, sock: socket.socket, timeout: float = DEFAULT_TIMEOUT):
        self._sock = sock
        self._sock.settimeout(timeout)

    def send_frame(self, frame: bytes) -> None:
        try:
            self._sock.sendall(frame)
        except OSError as exc:
            raise TransportError(f"send failed: {exc}")

    def _recv_exact(self, n: int) -> bytes:
        chunks = []
        remaining = n
        while remaining:
            try:
                chunk = self._sock.recv(remaining)
            except socket.timeout:
                raise TransportError(f"read timed out with {remaining} bytes outstanding")
            except OSError as exc:
                raise TransportError(f"read failed: {exc}")
            if not chunk:
                raise TransportError(f"peer closed with {remaining} bytes outstanding")
            chunks.append(chunk)
            remaining -= len(chunk)
        return b"".join(chunks)

    def recv_frame(self) -> bytes:
        header = self._recv_exact(HEADER.size)
        (length,) = struct.unpack_from(">I", header)
        if length > MAX_PAYLOAD:
            raise TransportError(f"peer declared an oversize payload of {length} bytes")
        return header + self._recv_exact(length)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


def listen_endpoint(host: str, port: int, timeout: float = DEFAULT_TIMEOUT):
    """Bind, accept one connection, return (endpoint, bound_port)."""
    server = socket.create_server((host, port))
    server.settimeout(timeout)
    bound_port = server.getsockname()[1]
    try:
        conn, _ = server.accept()
    except socket.timeout:
        server.close()
        raise TransportError(f"no peer connected to {host}:{bound_port} in {timeout}s")
    finally:
        server.close()
    return SocketEndpoint(conn, timeout=timeout), bound_port


def connect_endpoint(
    host: str, port: int, timeout: float = DEFAULT_TIMEOUT, retry_for: float = 5.0
) -> SocketEndpoint:
    """Connect, retrying briefly so a freshly spawned listener can bind."""
    deadline = time.monotonic() + retry_for
    while True:
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
            return SocketEndpoint(sock, timeout=timeout)
        except OSError as exc:
            if time.monotonic() >= deadline:
                raise TransportError(f"could not connect to {host}:{port}: {exc}")
            time.sleep(0.05)
