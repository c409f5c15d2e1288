"""
Binary frames exchanged between verifiers and provers, and a TCP transport.

Frame layout (little-endian):

    magic     4 bytes  b"RZKP"
    version   1 byte
    round     8 bytes
    phase     1 byte   0 query, 1 commit, 2 challenge, 3 reveal
    count     4 bytes
    elements  count * width bytes

Query, commit and reveal elements are field elements of width ceil(N/8).
Challenge elements are the two vertex indices, 4 bytes each. Timestamps never
travel on the wire.

The socket transport runs on one host and gives no relativistic guarantee.
"""

import logging
import socket
import socketserver
import struct
import threading
import time

from dataclasses import dataclass
from enum import IntEnum

from relzkp.errors import FrameError, TransportError

logger = logging.getLogger(__name__)

MAGIC = b"RZKP"
VERSION = 1
HEADER_FORMAT = "<4sBQBI"
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)
VERTEX_INDEX_WIDTH = 4
MAX_ELEMENTS = 1 << 16


class Phase(IntEnum):
    QUERY = 0
    COMMIT = 1
    CHALLENGE = 2
    REVEAL = 3


def element_width(phase, spec):
    if phase == Phase.CHALLENGE:
        return VERTEX_INDEX_WIDTH
    return spec.byte_len


@dataclass(frozen=True)
class Frame:
    """One protocol message

    Attributes:
        round_index: round the message belongs to
        phase: the Phase
        values: integer payload, field element values or vertex indices
    """

    round_index: int
    phase: Phase
    values: tuple = ()

    @classmethod
    def of_elements(cls, round_index, phase, elements):
        return cls(round_index, Phase(phase), tuple(e.value for e in elements))

    def elements(self, spec):
        """Payload as field elements"""
        if self.phase == Phase.CHALLENGE:
            raise FrameError("A challenge frame carries vertex indices")
        return tuple(spec.element(v) for v in self.values)


def encode_frame(frame, spec):
    """Serialize a frame for a given field"""
    if len(frame.values) > MAX_ELEMENTS:
        raise FrameError(f"{len(frame.values)} elements exceed the {MAX_ELEMENTS} limit")
    width = element_width(frame.phase, spec)
    header = struct.pack(
        HEADER_FORMAT, MAGIC, VERSION, frame.round_index, int(frame.phase), len(frame.values)
    )
    try:
        body = b"".join(v.to_bytes(width, "little") for v in frame.values)
    except OverflowError as e:
        raise FrameError(f"Element does not fit in {width} bytes") from e
    return header + body


def decode_header(data):
    """Parse a header

    Returns:
        (round_index, phase, count)
    """
    if len(data) < HEADER_SIZE:
        raise FrameError(f"Header needs {HEADER_SIZE} bytes, received {len(data)}")
    magic, version, round_index, phase, count = struct.unpack(
        HEADER_FORMAT, data[:HEADER_SIZE]
    )
    if magic != MAGIC:
        raise FrameError(f"Bad magic {magic!r}")
    if version != VERSION:
        raise FrameError(f"Unsupported frame version {version}")
    try:
        phase = Phase(phase)
    except ValueError as e:
        raise FrameError(f"Unknown phase {phase}") from e
    if count > MAX_ELEMENTS:
        raise FrameError(f"{count} elements exceed the {MAX_ELEMENTS} limit")
    return round_index, phase, count


def decode_frame(data, spec):
    """Parse a complete frame, rejecting trailing or missing bytes"""
    round_index, phase, count = decode_header(data)
    width = element_width(phase, spec)
    if len(data) != HEADER_SIZE + count * width:
        raise FrameError(
            f"Frame length {len(data)} differs from {HEADER_SIZE + count * width}"
        )
    values = []
    for k in range(count):
        start = HEADER_SIZE + k * width
        value = int.from_bytes(data[start : start + width], "little")
        if phase != Phase.CHALLENGE and value >> spec.width_bits:
            raise FrameError("Field element with high bits set")
        values.append(value)
    return Frame(round_index, phase, tuple(values))


def _recv_exact(sock, length):
    buf = bytearray()
    while len(buf) < length:
        try:
            chunk = sock.recv(length - len(buf))
        except OSError as e:
            raise TransportError(f"Receive failed: {e}") from e
        if not chunk:
            raise TransportError("Connection closed by peer")
        buf.extend(chunk)
    return bytes(buf)


def send_frame(sock, frame, spec):
    try:
        sock.sendall(encode_frame(frame, spec))
    except OSError as e:
        raise TransportError(f"Send failed: {e}") from e


def recv_frame(sock, spec):
    """Read one frame

    Returns:
        (frame, receive time in ns from the monotonic clock)
    """
    header = _recv_exact(sock, HEADER_SIZE)
    _, phase, count = decode_header(header)
    body = _recv_exact(sock, count * element_width(phase, spec))
    received_ns = time.monotonic_ns()
    return decode_frame(header + body, spec), received_ns


def socket_transport(sock, frame, spec):
    """Send a frame and wait for the answer

    Returns:
        (reply frame, send time ns, receive time ns), monotonic clock
    """
    sent_ns = time.monotonic_ns()
    send_frame(sock, frame, spec)
    reply, received_ns = recv_frame(sock, spec)
    return reply, sent_ns, received_ns


class _ProverHandler(socketserver.BaseRequestHandler):
    def handle(self):
        server = self.server
        while True:
            try:
                frame, _ = recv_frame(self.request, server.spec)
            except TransportError:
                return
            except FrameError as e:
                logger.warning(f"{server.role}: dropping connection, {e}")
                return
            reply = server.responder(frame)
            send_frame(self.request, reply, server.spec)


class ProverEndpoint(socketserver.ThreadingTCPServer):
    """A prover answering frames on a local TCP port

    Attributes:
        role: name used in log messages
        spec: field of the elements on the wire
        responder: callable mapping a request Frame to the reply Frame
    """

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, role, spec, responder, host="127.0.0.1", port=0):
        self.role = role
        self.spec = spec
        self.responder = responder
        super().__init__((host, port), _ProverHandler)
        self._thread = None

    @property
    def address(self):
        return self.server_address

    def start(self):
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        logger.debug(f"{self.role} listening on {self.address[0]}:{self.address[1]}")
        return self

    def stop(self):
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def connect(address, timeout=5.0):
    try:
        return socket.create_connection(address, timeout=timeout)
    except OSError as e:
        raise TransportError(f"Cannot reach {address}: {e}") from e
