"""The master: hands budgeted jobs to workers and collects what comes back."""

from __future__ import annotations

import logging
import os
import time
from collections import deque
from dataclasses import dataclass, replace
from typing import BinaryIO, Callable, Iterable, Optional

from .checkpoint import Checkpoint, write_checkpoint
from .engine import SearchProblem
from .instrument import FrequencyWriter, HistogramSample, HistogramWriter
from .messages import (
    CheckpointAck, CleanStopRequest, JobAssign, JobResult, JobStatus, OutputChunk,
    SharedDataStub, Stream, UnexploredBatch,
)
from .node import INF, Budget, Limit, NodeRecord, PruneMode
from .transport import WorkerLost
from .worker import format_node

log = logging.getLogger(__name__)

HIST_INTERVAL = 1.0


@dataclass(frozen=True)
class SchedulerParams:
    max_depth: Limit = 2
    max_nodes: int = 5000
    scale: int = 40
    lmin: int = 1
    lmax: int = 3
    maxbuf: int = 1048576
    hist_path: Optional[str] = None
    freq_path: Optional[str] = None
    checkp_path: Optional[str] = None
    stop_path: Optional[str] = None
    restart_path: Optional[str] = None

    def __post_init__(self):
        Budget(self.max_depth, self.max_nodes)  # validates both
        for name in ("scale", "lmin", "lmax", "maxbuf"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.lmin > self.lmax:
            raise ValueError(f"lmin ({self.lmin}) must not exceed lmax ({self.lmax})")


def next_budget(joblist_size: int, workers: int, p: SchedulerParams) -> Budget:
    """Small budgets while the job list is short, big ones once it is long."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if joblist_size < p.lmin * workers:
        return Budget(p.max_depth, p.max_nodes)
    if joblist_size > p.lmax * workers:
        return Budget(INF, p.max_nodes * p.scale)
    return Budget(INF, p.max_nodes)


def poll_stop_file(params: SchedulerParams) -> bool:
    return params.stop_path is not None and os.path.exists(params.stop_path)


class JobList:
    """The queue of unexplored subtrees plus the counters that account for them."""

    def __init__(self, jobs: Iterable[NodeRecord] = (), created: Optional[int] = None):
        self.L: deque[NodeRecord] = deque(jobs)
        self.total_jobs_created = len(self.L) if created is None else created
        self.jobs_done = self.total_jobs_created - len(self.L)
        self.jobs_running = 0

    def __len__(self):
        return len(self.L)

    def add(self, records: Iterable[NodeRecord]) -> None:
        before = len(self.L)
        self.L.extend(records)
        self.total_jobs_created += len(self.L) - before

    def take(self) -> NodeRecord:
        rec = self.L.popleft()
        self.jobs_running += 1
        return rec

    def finish(self) -> None:
        self.jobs_running -= 1
        self.jobs_done += 1

    def conserved(self) -> bool:
        return self.total_jobs_created == len(self.L) + self.jobs_running + self.jobs_done


class RunAborted(RuntimeError):
    pass


@dataclass
class RunSummary:
    total_nodes: int
    jobs: int
    stopped: bool = False
    checkpoint_written: bool = False
    jobs_left: int = 0


class Master:
    """Control loop for one run.

    ``out`` and ``err`` are binary sinks receiving the merged worker output.
    Output blocks arrive as single chunks and are written in one piece.
    """

    def __init__(self, transport, params: SchedulerParams, *,
                 prune: PruneMode = PruneMode.OFF,
                 out: Optional[BinaryIO] = None, err: Optional[BinaryIO] = None,
                 app_id: str = "", input_text: str = "",
                 clock: Callable[[], float] = time.monotonic,
                 hist_interval: float = HIST_INTERVAL,
                 append_files: bool = False,
                 check: bool = False):
        self.transport = transport
        self.workers = transport.n_workers
        self.params = params
        self.prune = PruneMode(prune)
        self.out = out
        self.err = err
        self.app_id = app_id
        self.input_text = input_text
        self.clock = clock
        self.hist_interval = hist_interval
        self.check = check
        self.hist = HistogramWriter(params.hist_path, append_files) if params.hist_path else None
        self.freq = FrequencyWriter(params.freq_path, append_files) if params.freq_path else None
        self.shared = b""
        self.stop_reason: Optional[str] = None

    # -- helpers ---------------------------------------------------------

    def _write(self, chunk: OutputChunk) -> None:
        sink = self.err if chunk.stream is Stream.ERR else self.out
        if sink is not None:
            sink.write(chunk.data)

    def _sample(self, jobs: JobList, running: dict) -> None:
        if self.hist is None:
            return
        t = self.elapsed()
        busy = len(running)
        # a busy worker always owes us its result; nothing else can owe
        self.hist.record(HistogramSample(t, busy, len(jobs), busy, jobs.total_jobs_created))

    def elapsed(self) -> float:
        return self.clock() - self.t0

    def _request_stop(self, reason: str) -> None:
        if self.stop_reason is None:
            log.info("stopping: %s", reason)
            self.stop_reason = reason

    # -- main loop -------------------------------------------------------

    def run(self, jobs: Iterable[NodeRecord], *, nodes_before: int = 0,
            created: Optional[int] = None, shared: bytes = b"",
            elapsed_before: float = 0.0) -> RunSummary:
        joblist = JobList(jobs, created)
        self.shared = shared
        total = nodes_before
        completed = 0
        running: dict[int, NodeRecord] = {}
        idle = deque(range(self.workers))
        # a resumed run continues the clock of the run it resumes
        start = self.clock()
        self.t0 = start - elapsed_before
        next_tick = start + self.hist_interval
        if poll_stop_file(self.params):
            self._request_stop(f"stop file {self.params.stop_path} present")

        try:
            while True:
                now = self.clock()
                if now >= next_tick:
                    self._sample(joblist, running)
                    if poll_stop_file(self.params):
                        self._request_stop(f"stop file {self.params.stop_path} found")
                    next_tick = now + self.hist_interval

                if self.stop_reason is None:
                    while idle and joblist:
                        peer = idle.popleft()
                        rec = joblist.take()
                        budget = next_budget(len(joblist), self.workers, self.params)
                        self.transport.send(peer, JobAssign(rec, budget, self.prune))
                        running[peer] = rec
                if self.check:
                    assert joblist.conserved(), "job conservation violated"
                if not running and (not joblist or self.stop_reason is not None):
                    break

                got = self.transport.receive(timeout=max(0.0, next_tick - self.clock()))
                if got is None:
                    continue
                peer, msg = got
                if isinstance(msg, OutputChunk):
                    self._write(msg)
                elif isinstance(msg, UnexploredBatch):
                    joblist.add(msg.nodes)
                elif isinstance(msg, JobResult):
                    if peer not in running:
                        raise RunAborted(f"worker {peer} reported a job it was never given")
                    del running[peer]
                    idle.append(peer)
                    joblist.finish()
                    if msg.status is not JobStatus.OK:
                        what = "emergency stop" if msg.status is JobStatus.EMERGENCY else "job failure"
                        raise RunAborted(f"{what} on worker {peer}")
                    completed += 1
                    total += msg.result.count
                    if self.freq is not None:
                        self.freq.record(msg.result.count)
                elif isinstance(msg, CleanStopRequest):
                    self._request_stop(f"clean stop requested by worker {peer}")
                elif isinstance(msg, SharedDataStub):
                    self.shared = msg.blob
        except (RunAborted, WorkerLost) as exc:
            if self.err is not None:
                self.err.write(f"*** run aborted: {exc}; output is partial\n".encode())
            self.transport.close(abort=True)
            self._close_files()
            raise RunAborted(str(exc)) from exc

        summary = RunSummary(total, completed, stopped=self.stop_reason is not None,
                             jobs_left=len(joblist))
        if summary.stopped and self.params.checkp_path:
            ckpt = Checkpoint(self.params, self.app_id, self.input_text, list(joblist.L),
                              total, joblist.total_jobs_created, self.shared,
                              self.elapsed())
            try:
                write_checkpoint(ckpt, self.params.checkp_path)
            except OSError as exc:
                self.transport.close(abort=True)
                self._close_files()
                raise RunAborted(f"cannot write checkpoint {self.params.checkp_path}: {exc}") from exc
            summary.checkpoint_written = True
            for peer in range(self.workers):
                self.transport.send(peer, CheckpointAck())
        elif summary.stopped:
            log.warning("stopped without -checkp: %d unexplored jobs dropped", len(joblist))

        self._sample(joblist, running)
        self.transport.close()
        self._close_files()
        return summary

    def _close_files(self) -> None:
        for f in (self.hist, self.freq):
            if f is not None:
                f.close()


def run_master(problem: SearchProblem, params: SchedulerParams, transport, *,
               out: Optional[BinaryIO] = None, err: Optional[BinaryIO] = None,
               prune: PruneMode = PruneMode.OFF, app_id: str = "", input_text: str = "",
               restart: Optional[Checkpoint] = None, **kw) -> RunSummary:
    """Fresh run from the problem's root, or a resumed run from ``restart``.

    On a fresh run the root is written here, once, and counted in the total.
    """
    master = Master(transport, params, prune=prune, out=out, err=err, app_id=app_id,
                    input_text=input_text, append_files=restart is not None, **kw)
    if restart is not None:
        return master.run(restart.jobs, nodes_before=restart.nodes_output,
                          created=restart.total_jobs_created, shared=restart.shared,
                          elapsed_before=restart.elapsed)
    root = problem.root_node
    if out is not None and not problem.countonly:
        out.write(format_node(problem, root, 0).encode())
    return master.run([problem.pack(root, 0, False)], nodes_before=1)


def with_paths(params: SchedulerParams, other: SchedulerParams) -> SchedulerParams:
    """``params`` with the file options taken from ``other``."""
    return replace(params, hist_path=other.hist_path, freq_path=other.freq_path,
                   checkp_path=other.checkp_path, stop_path=other.stop_path,
                   restart_path=other.restart_path)
