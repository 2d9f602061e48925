"""Master/worker message vocabulary and its binary frame encoding.

Frame layout (all integers little-endian)::

    u32 length of everything after this field
    u8  kind tag
    ... kind-specific body

A NodeRecord is four ``(u32 count, payload)`` sections in the order
long (i64), int (i32), char (raw bytes), float (f64), then ``i64 depth``
and ``u8 unexplored``.  An infinite budget limit is written as -1.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass
from typing import Union

from .engine import TraversalResult
from .node import INF, Budget, NodeRecord, PruneMode


class FrameError(ValueError):
    """Malformed or truncated frame."""


class Kind(enum.IntEnum):
    JOB_ASSIGN = 1
    JOB_RESULT = 2
    UNEXPLORED_BATCH = 3
    OUTPUT_CHUNK = 4
    SHARED_DATA = 5
    CHECKPOINT_ACK = 6
    CLEAN_STOP = 7
    TERMINATE = 8


class Stream(enum.IntEnum):
    OUT = 0
    ERR = 1


class JobStatus(enum.IntEnum):
    OK = 0
    FAILED = 1
    EMERGENCY = 2


@dataclass(frozen=True)
class JobAssign:
    node: NodeRecord
    budget: Budget = Budget()
    prune: PruneMode = PruneMode.OFF
    kind = Kind.JOB_ASSIGN


@dataclass(frozen=True)
class JobResult:
    result: TraversalResult
    status: JobStatus = JobStatus.OK
    kind = Kind.JOB_RESULT


@dataclass(frozen=True)
class UnexploredBatch:
    nodes: tuple = ()
    kind = Kind.UNEXPLORED_BATCH


@dataclass(frozen=True)
class OutputChunk:
    data: bytes
    stream: Stream = Stream.OUT
    block: bool = False
    kind = Kind.OUTPUT_CHUNK


@dataclass(frozen=True)
class SharedDataStub:
    blob: bytes = b""
    kind = Kind.SHARED_DATA


@dataclass(frozen=True)
class CheckpointAck:
    kind = Kind.CHECKPOINT_ACK


@dataclass(frozen=True)
class CleanStopRequest:
    kind = Kind.CLEAN_STOP


@dataclass(frozen=True)
class Terminate:
    kind = Kind.TERMINATE


Message = Union[
    JobAssign, JobResult, UnexploredBatch, OutputChunk,
    SharedDataStub, CheckpointAck, CleanStopRequest, Terminate,
]

_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_I64 = struct.Struct("<q")
_LIMIT_PAIR = struct.Struct("<qq")
_RESULT = struct.Struct("<qqB")


def _limit_out(x) -> int:
    return -1 if x == INF else int(x)


def _limit_in(x: int):
    return INF if x == -1 else x


def encode_record(rec: NodeRecord) -> bytes:
    parts = [
        _U32.pack(len(rec.vlong)), struct.pack(f"<{len(rec.vlong)}q", *rec.vlong),
        _U32.pack(len(rec.vint)), struct.pack(f"<{len(rec.vint)}i", *rec.vint),
        _U32.pack(len(rec.vchar)), bytes(rec.vchar),
        _U32.pack(len(rec.vfloat)), struct.pack(f"<{len(rec.vfloat)}d", *rec.vfloat),
        _I64.pack(rec.depth), _U8.pack(1 if rec.unexplored else 0),
    ]
    return b"".join(parts)


class _Reader:
    def __init__(self, buf: bytes, pos: int = 0):
        self.buf = buf
        self.pos = pos

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.buf):
            raise FrameError(f"truncated: wanted {n} bytes at offset {self.pos}, have {len(self.buf) - self.pos}")
        out = self.buf[self.pos:end]
        self.pos = end
        return out

    def unpack(self, fmt: struct.Struct):
        return fmt.unpack(self.take(fmt.size))

    def u32(self) -> int:
        return self.unpack(_U32)[0]

    def done(self) -> None:
        if self.pos != len(self.buf):
            raise FrameError(f"{len(self.buf) - self.pos} trailing bytes")


def _read_record(r: _Reader) -> NodeRecord:
    k = r.u32()
    vlong = list(struct.unpack(f"<{k}q", r.take(8 * k)))
    k = r.u32()
    vint = list(struct.unpack(f"<{k}i", r.take(4 * k)))
    k = r.u32()
    vchar = bytes(r.take(k))
    k = r.u32()
    vfloat = list(struct.unpack(f"<{k}d", r.take(8 * k)))
    (depth,) = r.unpack(_I64)
    (flag,) = r.unpack(_U8)
    if flag > 1:
        raise FrameError(f"bad unexplored flag {flag}")
    return NodeRecord(vlong, vint, vchar, vfloat, depth, bool(flag))


def decode_record(data: bytes) -> NodeRecord:
    r = _Reader(data)
    rec = _read_record(r)
    r.done()
    return rec


def _body(msg: Message) -> bytes:
    if isinstance(msg, JobAssign):
        b = msg.budget
        return (encode_record(msg.node)
                + _LIMIT_PAIR.pack(_limit_out(b.max_depth), _limit_out(b.max_nodes))
                + _U8.pack(int(msg.prune)))
    if isinstance(msg, JobResult):
        res = msg.result
        return _RESULT.pack(res.count, res.unexplored_emitted, int(msg.status))
    if isinstance(msg, UnexploredBatch):
        return _U32.pack(len(msg.nodes)) + b"".join(encode_record(n) for n in msg.nodes)
    if isinstance(msg, OutputChunk):
        return _U8.pack(int(msg.stream)) + _U8.pack(int(msg.block)) + _U32.pack(len(msg.data)) + bytes(msg.data)
    if isinstance(msg, SharedDataStub):
        return _U32.pack(len(msg.blob)) + bytes(msg.blob)
    if isinstance(msg, (CheckpointAck, CleanStopRequest, Terminate)):
        return b""
    raise TypeError(f"not a message: {msg!r}")


def encode(msg: Message) -> bytes:
    body = _U8.pack(int(msg.kind)) + _body(msg)
    return _U32.pack(len(body)) + body


def decode(frame: bytes) -> Message:
    r = _Reader(bytes(frame))
    length = r.u32()
    if length != len(r.buf) - 4:
        raise FrameError(f"frame length {length} does not match payload of {len(r.buf) - 4} bytes")
    (tag,) = r.unpack(_U8)
    try:
        kind = Kind(tag)
    except ValueError:
        raise FrameError(f"unknown message kind {tag}") from None

    try:
        msg = _decode_body(kind, r)
    except FrameError:
        raise
    except ValueError as exc:
        raise FrameError(f"bad {kind.name} frame: {exc}") from None
    r.done()
    return msg


def _decode_body(kind: Kind, r: _Reader) -> Message:
    if kind is Kind.JOB_ASSIGN:
        node = _read_record(r)
        depth, nodes = r.unpack(_LIMIT_PAIR)
        (prune,) = r.unpack(_U8)
        msg = JobAssign(node, Budget(_limit_in(depth), _limit_in(nodes)), PruneMode(prune))
    elif kind is Kind.JOB_RESULT:
        count, flagged, status = r.unpack(_RESULT)
        msg = JobResult(TraversalResult(count, flagged), JobStatus(status))
    elif kind is Kind.UNEXPLORED_BATCH:
        k = r.u32()
        msg = UnexploredBatch(tuple(_read_record(r) for _ in range(k)))
    elif kind is Kind.OUTPUT_CHUNK:
        (stream,) = r.unpack(_U8)
        (block,) = r.unpack(_U8)
        data = r.take(r.u32())
        msg = OutputChunk(bytes(data), Stream(stream), bool(block))
    elif kind is Kind.SHARED_DATA:
        msg = SharedDataStub(bytes(r.take(r.u32())))
    elif kind is Kind.CHECKPOINT_ACK:
        msg = CheckpointAck()
    elif kind is Kind.CLEAN_STOP:
        msg = CleanStopRequest()
    else:
        msg = Terminate()
    return msg
