"""Job execution: one budgeted traversal per assigned node.

Application code reaches the running job through ``problem.io`` (a
:class:`JobIO`), which buffers output, supports output blocks and exposes
``cleanstop`` / ``emergencystop``.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional

from .engine import SearchProblem, TraversalResult, budgeted_search
from .messages import (
    CleanStopRequest, JobAssign, JobResult, JobStatus, Message, OutputChunk,
    SharedDataStub, Stream, Terminate, UnexploredBatch,
)
from .node import INF, Budget, NodeRecord, PruneMode

log = logging.getLogger(__name__)

DEFAULT_MAXBUF = 1048576
UNEXPLORED_BATCH_SIZE = 256


class OutputBlockError(RuntimeError):
    pass


class EmergencyStop(Exception):
    pass


def buffer_output(buf: bytearray, data: bytes, maxbuf: int) -> Optional[bytes]:
    """Append ``data``; return the whole buffer (and clear it) once it is
    longer than ``maxbuf`` and ends in a newline."""
    buf += data
    if len(buf) > maxbuf and buf.endswith(b"\n"):
        chunk = bytes(buf)
        buf.clear()
        return chunk
    return None


class JobIO:
    def __init__(self, send: Callable[[Message], None], maxbuf: int = DEFAULT_MAXBUF):
        if maxbuf <= 0:
            raise ValueError("maxbuf must be positive")
        self._send = send
        self.maxbuf = maxbuf
        self._bufs = {Stream.OUT: bytearray(), Stream.ERR: bytearray()}
        self._block: Optional[bytearray] = None
        self.halted = False

    def write(self, text, stream: Stream = Stream.OUT) -> None:
        data = text.encode() if isinstance(text, str) else bytes(text)
        if stream is Stream.OUT and self._block is not None:
            self._block += data
            return
        chunk = buffer_output(self._bufs[stream], data, self.maxbuf)
        if chunk is not None:
            self._send(OutputChunk(chunk, stream))

    def flush(self) -> None:
        for stream, buf in self._bufs.items():
            if buf:
                self._send(OutputChunk(bytes(buf), stream))
                buf.clear()

    def begin_block(self) -> None:
        if self._block is not None:
            raise OutputBlockError("output blocks do not nest")
        # earlier unblocked output must not be overtaken by the block
        buf = self._bufs[Stream.OUT]
        if buf:
            self._send(OutputChunk(bytes(buf), Stream.OUT))
            buf.clear()
        self._block = bytearray()

    def end_block(self) -> None:
        if self._block is None:
            raise OutputBlockError("no output block is open")
        block, self._block = self._block, None
        if block:
            self._send(OutputChunk(bytes(block), Stream.OUT, block=True))

    @property
    def in_block(self) -> bool:
        return self._block is not None

    def close(self) -> None:
        if self._block is not None:
            self.end_block()
        self.flush()

    def cleanstop(self) -> None:
        """Ask the master to wind the whole run down.

        The current traversal keeps going only long enough to hand every
        remaining subtree back as unexplored, so a checkpoint taken
        afterwards loses nothing.
        """
        if self.halted:
            return
        self.flush()
        self._send(CleanStopRequest())
        self.halted = True

    def emergencystop(self, reason: str = "emergency stop") -> None:
        raise EmergencyStop(reason)

    def halt_requested(self) -> bool:
        return self.halted


def format_node(problem: SearchProblem, v, depth: int, unexplored: bool = False, marker: bool = False) -> str:
    line = f"{problem.describe(v)} d={depth}"
    if marker and unexplored:
        line += " *unexplored"
    return line + "\n"


def traverse(
    problem: SearchProblem,
    record: NodeRecord,
    budget: Budget,
    prune: PruneMode,
    io: JobIO,
    on_unexplored: Callable[[NodeRecord], None],
    *,
    marker: bool = False,
    check: bool = False,
) -> TraversalResult:
    """Run one budgeted search from ``record`` with output routed through ``io``."""
    countonly = getattr(problem, "countonly", False)
    describe = problem.describe
    pack = problem.pack

    def emit(v, depth, unexplored):
        if not countonly:
            line = f"{describe(v)} d={depth}"
            if marker and unexplored:
                line += " *unexplored"
            io.write(line + "\n")
        if unexplored:
            on_unexplored(pack(v, depth, True))

    start = problem.unpack(record)
    problem.io = io
    try:
        return budgeted_search(problem, start, budget, prune, emit,
                               start_depth=record.depth, halt=io.halt_requested, check=check)
    finally:
        problem.io = None


class Worker:
    """Executes jobs for the master, one at a time.

    The problem instance is built once per worker and reused for every job.
    ``send`` delivers a message to the master.
    """

    def __init__(self, problem: SearchProblem, send: Callable[[Message], None], *,
                 maxbuf: int = DEFAULT_MAXBUF, batch_size: int = UNEXPLORED_BATCH_SIZE,
                 check: bool = False):
        self.problem = problem
        self.send = send
        self.maxbuf = maxbuf
        self.batch_size = batch_size
        self.check = check
        self.shared = b""

    def handle(self, msg: Message) -> bool:
        """Process one message from the master; False once terminated."""
        if isinstance(msg, JobAssign):
            self.run_job(msg.node, msg.budget, msg.prune)
        elif isinstance(msg, Terminate):
            return False
        elif isinstance(msg, SharedDataStub):
            self.shared = msg.blob
        return True

    def run_job(self, record: NodeRecord, budget: Budget = Budget(INF, INF),
                prune: PruneMode = PruneMode.OFF) -> TraversalResult:
        io = JobIO(self.send, self.maxbuf)
        batch: list[NodeRecord] = []

        def on_unexplored(rec):
            batch.append(rec)
            if len(batch) >= self.batch_size:
                self.send(UnexploredBatch(tuple(batch)))
                batch.clear()

        status = JobStatus.OK
        result = TraversalResult()
        try:
            result = traverse(self.problem, record, budget, prune, io, on_unexplored, check=self.check)
        except EmergencyStop as exc:
            status = JobStatus.EMERGENCY
            io.write(f"emergency stop: {exc}\n", Stream.ERR)
        except Exception as exc:
            log.debug("job failed", exc_info=True)
            status = JobStatus.FAILED
            io.write(f"job failed: {type(exc).__name__}: {exc}\n", Stream.ERR)
        io.close()
        if batch:
            self.send(UnexploredBatch(tuple(batch)))
        self.send(JobResult(result, status))
        return result
