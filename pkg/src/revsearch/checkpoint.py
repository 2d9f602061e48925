"""Checkpoint files: enough state to resume an interrupted run.

Layout (ASCII lines unless noted)::

    mts-checkpoint 1
    params <json object>
    app <id> <byte length>
    <input text, exactly that many bytes>
    counts <nodes output so far> <jobs created so far>
    elapsed <seconds of run time so far>
    shared <byte length> <hex>
    jobs <k>
    <hex NodeRecord encoding>      (k lines)
    end
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

from .messages import FrameError, decode_record, encode_record
from .node import INF, NodeRecord

if TYPE_CHECKING:
    from .scheduler import SchedulerParams

MAGIC = b"mts-checkpoint"
VERSION = 1


class CheckpointError(Exception):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class CheckpointTruncatedError(CheckpointError):
    pass


class CheckpointFormatError(CheckpointError):
    pass


@dataclass
class Checkpoint:
    params: "SchedulerParams"
    app_id: str
    input_text: str
    jobs: list[NodeRecord] = field(default_factory=list)
    nodes_output: int = 0
    total_jobs_created: int = 0
    shared: bytes = b""
    elapsed: float = 0.0
    version: int = VERSION


def _params_json(params) -> str:
    d = asdict(params)
    for k, v in d.items():
        if v == INF:
            d[k] = "inf"
    return json.dumps(d, sort_keys=True)


def _params_from_json(text: str):
    from .scheduler import SchedulerParams

    d = json.loads(text)
    for k, v in d.items():
        if v == "inf":
            d[k] = INF
    return SchedulerParams(**d)


def write_checkpoint(c: Checkpoint, path) -> None:
    """Write atomically: a half-written file never replaces a good one."""
    path = Path(path)
    data = bytearray()
    data += MAGIC + b" %d\n" % c.version
    data += b"params " + _params_json(c.params).encode() + b"\n"
    blob = c.input_text.encode()
    data += b"app %s %d\n" % (c.app_id.encode(), len(blob))
    data += blob + b"\n"
    data += b"counts %d %d\n" % (c.nodes_output, c.total_jobs_created)
    data += b"elapsed %s\n" % repr(float(c.elapsed)).encode()
    data += b"shared %d %s\n" % (len(c.shared), c.shared.hex().encode() or b"-")
    data += b"jobs %d\n" % len(c.jobs)
    for rec in c.jobs:
        data += encode_record(rec).hex().encode() + b"\n"
    data += b"end\n"
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def line(self, what: str) -> bytes:
        end = self.data.find(b"\n", self.pos)
        if end < 0:
            raise CheckpointTruncatedError(f"checkpoint ends before {what}")
        out = self.data[self.pos:end]
        self.pos = end + 1
        return out

    def raw(self, n: int, what: str) -> bytes:
        if self.pos + n + 1 > len(self.data):
            raise CheckpointTruncatedError(f"checkpoint ends inside {what}")
        out = self.data[self.pos:self.pos + n]
        if self.data[self.pos + n:self.pos + n + 1] != b"\n":
            raise CheckpointFormatError(f"{what} is not followed by a newline")
        self.pos += n + 1
        return out

    def fields(self, key: bytes, count: int, what: str) -> list[bytes]:
        parts = self.line(what).split(b" ")
        if parts[0] != key or len(parts) != count + 1:
            raise CheckpointFormatError(f"expected {key.decode()!r} line for {what}")
        return parts[1:]


def _int(b: bytes, what: str) -> int:
    try:
        return int(b)
    except ValueError:
        raise CheckpointFormatError(f"bad integer {b!r} in {what}") from None


def read_checkpoint(path) -> Checkpoint:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc.strerror or exc}") from None
    if not data:
        raise CheckpointTruncatedError(f"{path}: empty checkpoint")
    cur = _Cursor(data)
    header = cur.line("header").split(b" ")
    if header[0] != MAGIC or len(header) != 2:
        raise CheckpointFormatError(f"{path}: not a checkpoint file")
    if header[1] != str(VERSION).encode():
        raise CheckpointVersionError(
            f"{path}: checkpoint version {header[1].decode(errors='replace')}, expected {VERSION}")

    line = cur.line("params")
    if not line.startswith(b"params "):
        raise CheckpointFormatError("expected params line")
    try:
        params = _params_from_json(line[len(b"params "):].decode())
    except (ValueError, TypeError) as exc:
        raise CheckpointFormatError(f"bad params: {exc}") from None

    app_id, n = cur.fields(b"app", 2, "application id")
    input_text = cur.raw(_int(n, "app"), "input text").decode()
    nodes_output, created = (_int(x, "counts") for x in cur.fields(b"counts", 2, "counts"))
    (e,) = cur.fields(b"elapsed", 1, "elapsed time")
    try:
        elapsed = float(e)
    except ValueError:
        raise CheckpointFormatError(f"bad elapsed time {e!r}") from None
    n, hexblob = cur.fields(b"shared", 2, "shared data")
    try:
        shared = b"" if hexblob == b"-" else bytes.fromhex(hexblob.decode())
    except ValueError:
        raise CheckpointFormatError("bad shared data") from None
    if len(shared) != _int(n, "shared"):
        raise CheckpointFormatError("shared data length mismatch")

    (k,) = cur.fields(b"jobs", 1, "job count")
    jobs = []
    for i in range(_int(k, "jobs")):
        line = cur.line(f"job {i}")
        if line == b"end":
            raise CheckpointTruncatedError(f"checkpoint lists {int(k)} jobs but holds {i}")
        try:
            jobs.append(decode_record(bytes.fromhex(line.decode())))
        except (ValueError, FrameError) as exc:
            raise CheckpointFormatError(f"malformed job record {i}: {exc}") from None
    if cur.line("end marker") != b"end":
        raise CheckpointFormatError("missing end marker")
    return Checkpoint(params, app_id.decode(), input_text, jobs, nodes_output, created, shared,
                      elapsed)
