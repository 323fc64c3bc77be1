"""Latest-wins UDP endpoints.

Each endpoint owns one direction of sequence numbers: `send` stamps an
auto-incremented seq, `receive_latest` drains everything pending and delivers
only the newest message not yet seen, counting the rest as stale. Decode
failures are counted and skipped, never raised to the caller.
"""

from __future__ import annotations

import random
import select
import socket
import threading
import time
from dataclasses import dataclass, replace

from .codec import DecodeError, decode, encode
from .messages import Message


class TransportClosed(RuntimeError):
    """Operation on an endpoint after close()."""


@dataclass
class TransportStats:
    sent: int = 0
    sent_bytes: int = 0
    last_sent_bytes: int = 0
    dropped: int = 0
    received: int = 0
    delivered: int = 0
    stale: int = 0
    decode_errors: int = 0


class UdpEndpoint:
    """One side of the controller/client pair.

    `drop_rate` simulates a lossy link deterministically (seeded): dropped
    sends still consume a seq, mimicking datagrams lost in flight.
    """

    def __init__(
        self,
        listen: tuple[str, int] = ("127.0.0.1", 0),
        peer: tuple[str, int] | None = None,
        *,
        drop_rate: float = 0.0,
        drop_seed: int | None = None,
        recv_buffer: int = 1 << 22,
    ):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_RCVBUF, recv_buffer)
        except OSError:
            pass
        self._sock.bind(listen)
        self._sock.setblocking(False)
        self._peer = peer
        self._closed = False
        self._send_lock = threading.Lock()
        self._recv_lock = threading.Lock()
        self._next_seq = 0
        self._last_delivered: int | None = None
        self._stats = TransportStats()
        self._drop_rate = drop_rate
        self._drop_rng = random.Random(drop_seed)

    @property
    def local_address(self) -> tuple[str, int]:
        return self._sock.getsockname()

    def set_peer(self, addr: tuple[str, int]) -> None:
        self._peer = addr

    def set_drop_rate(self, rate: float) -> None:
        """Adjust the simulated loss probability applied to future sends."""
        self._drop_rate = float(rate)

    def send(self, message: Message) -> int:
        """Encode with the next seq and emit one datagram; returns that seq.

        Encoding failures (oversize included) leave the seq counter untouched
        and emit nothing.
        """
        with self._send_lock:
            if self._closed:
                raise TransportClosed("send on closed endpoint")
            if self._peer is None:
                raise TransportClosed("no peer address configured")
            stamped = replace(message, seq=self._next_seq)
            data = encode(stamped)
            self._next_seq += 1
            self._stats.last_sent_bytes = len(data)
            if self._drop_rate > 0.0 and self._drop_rng.random() < self._drop_rate:
                self._stats.dropped += 1
                self._stats.sent += 1
                self._stats.sent_bytes += len(data)
                return stamped.seq
            self._sock.sendto(data, self._peer)
            self._stats.sent += 1
            self._stats.sent_bytes += len(data)
            return stamped.seq

    def receive_latest(self, timeout: float = 0.0) -> Message | None:
        """Drain pending datagrams; deliver the newest unseen message or None.

        With timeout > 0, waits up to that long for the first datagram before
        draining whatever else arrived.
        """
        with self._recv_lock:
            if self._closed:
                raise TransportClosed("receive on closed endpoint")
            datagrams: list[bytes] = []
            deadline = time.monotonic() + timeout if timeout > 0.0 else None
            while True:
                try:
                    data, _addr = self._sock.recvfrom(65535)
                    datagrams.append(data)
                except BlockingIOError:
                    if datagrams or deadline is None:
                        break
                    remaining = deadline - time.monotonic()
                    if remaining <= 0.0:
                        break
                    ready, _, _ = select.select([self._sock], [], [], remaining)
                    if not ready:
                        break

            if not datagrams:
                return None
            self._stats.received += len(datagrams)

            best: Message | None = None
            decoded = 0
            for data in datagrams:
                try:
                    msg = decode(data)
                except DecodeError:
                    self._stats.decode_errors += 1
                    continue
                decoded += 1
                if best is None or msg.seq > best.seq:
                    best = msg
            if best is None:
                return None
            if self._last_delivered is not None and best.seq <= self._last_delivered:
                self._stats.stale += decoded
                return None
            self._last_delivered = best.seq
            self._stats.delivered += 1
            self._stats.stale += decoded - 1
            return best

    def stats(self) -> TransportStats:
        """Read-consistent snapshot of the counters."""
        with self._send_lock, self._recv_lock:
            return replace(self._stats)

    def close(self) -> None:
        with self._send_lock, self._recv_lock:
            if not self._closed:
                self._closed = True
                self._sock.close()

    def __enter__(self) -> "UdpEndpoint":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
