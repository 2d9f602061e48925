"""Channels between the master and its workers.

Two backends share one interface (``send``, ``receive``, ``close``):

* :class:`InProcessTransport` runs the workers as cooperatively scheduled
  tasks inside the master's process.  A seeded RNG decides, at every
  ``receive``, whether to deliver a pending worker message or let some
  worker process its next inbound message, so runs are replayable.
* :class:`ProcessTransport` runs each worker in its own OS process and
  talks to it over a pipe using the frame format of :mod:`.messages`.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
import random
from collections import deque
from multiprocessing.connection import wait
from typing import Callable, Optional

from .engine import SearchProblem
from .messages import Message, Terminate, decode, encode
from .worker import DEFAULT_MAXBUF, Worker

log = logging.getLogger(__name__)

ProblemFactory = Callable[[], SearchProblem]


class ChannelClosed(RuntimeError):
    pass


class WorkerLost(RuntimeError):
    def __init__(self, peer: int, detail: str = ""):
        super().__init__(f"worker {peer} closed its channel unexpectedly{': ' + detail if detail else ''}")
        self.peer = peer


class InProcessTransport:
    """Deterministic single-process backend.

    With ``wire=True`` every message is pushed through ``encode``/``decode``
    so the frame format is exercised exactly as on the process backend.
    """

    def __init__(self, factory: ProblemFactory, workers: int, *, seed: int = 0,
                 maxbuf: int = DEFAULT_MAXBUF, wire: bool = True, check: bool = False):
        if workers < 1:
            raise ValueError("need at least one worker")
        self.n_workers = workers
        self.rng = random.Random(seed)
        self.wire = wire
        self._inbox = [deque() for _ in range(workers)]
        self._outbox = [deque() for _ in range(workers)]
        self._closed = [False] * workers
        self.workers = [
            Worker(factory(), self._sender(i), maxbuf=maxbuf, check=check)
            for i in range(workers)
        ]

    def _sender(self, i: int):
        box = self._outbox[i]
        if self.wire:
            return lambda m: box.append(encode(m))
        return box.append

    def _unwrap(self, item) -> Message:
        return decode(item) if self.wire else item

    def send(self, peer: int, msg: Message) -> None:
        if self._closed[peer]:
            raise ChannelClosed(f"channel to worker {peer} is closed")
        if isinstance(msg, Terminate):
            self._closed[peer] = True
        self._inbox[peer].append(encode(msg) if self.wire else msg)

    def receive(self, timeout: Optional[float] = None) -> Optional[tuple[int, Message]]:
        """Next message from any worker, or None when nothing can arrive.

        Nothing else can make progress in this backend, so an empty system
        answers immediately instead of waiting out ``timeout``.
        """
        while True:
            actions = [("deliver", i) for i, box in enumerate(self._outbox) if box]
            actions += [("step", i) for i, box in enumerate(self._inbox) if box]
            if not actions:
                return None
            what, i = self.rng.choice(actions)
            if what == "deliver":
                return i, self._unwrap(self._outbox[i].popleft())
            self.workers[i].handle(self._unwrap(self._inbox[i].popleft()))

    def pending(self) -> int:
        return sum(len(b) for b in self._outbox)

    def close(self, abort: bool = False) -> None:
        # whatever is still queued belongs to an abandoned run
        for i in range(self.n_workers):
            self._closed[i] = True
            self._inbox[i].clear()
            self._outbox[i].clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _worker_main(conn, factory: ProblemFactory, maxbuf: int) -> None:
    problem = factory()
    worker = Worker(problem, lambda m: conn.send_bytes(encode(m)), maxbuf=maxbuf)
    try:
        while True:
            try:
                data = conn.recv_bytes()
            except EOFError:
                break
            if not worker.handle(decode(data)):
                break
    finally:
        conn.close()


def _context():
    try:
        return mp.get_context("fork")
    except ValueError:
        return mp.get_context("spawn")


class ProcessTransport:
    """One OS process per worker, one duplex pipe per worker."""

    def __init__(self, factory: ProblemFactory, workers: int, *, maxbuf: int = DEFAULT_MAXBUF):
        if workers < 1:
            raise ValueError("need at least one worker")
        ctx = _context()
        self.n_workers = workers
        self._conns = []
        self._procs = []
        self._closed = [False] * workers
        self._rotate = 0
        for i in range(workers):
            parent, child = ctx.Pipe(duplex=True)
            proc = ctx.Process(target=_worker_main, args=(child, factory, maxbuf),
                               name=f"revsearch-worker-{i}", daemon=True)
            proc.start()
            child.close()
            self._conns.append(parent)
            self._procs.append(proc)
        self._peer_of = {id(c): i for i, c in enumerate(self._conns)}

    def send(self, peer: int, msg: Message) -> None:
        if self._closed[peer]:
            raise ChannelClosed(f"channel to worker {peer} is closed")
        if isinstance(msg, Terminate):
            self._closed[peer] = True
        try:
            self._conns[peer].send_bytes(encode(msg))
        except (BrokenPipeError, ConnectionResetError, OSError) as exc:
            raise WorkerLost(peer, str(exc)) from exc

    def receive(self, timeout: Optional[float] = None) -> Optional[tuple[int, Message]]:
        live = [c for c in self._conns if not c.closed]
        if not live:
            return None
        ready = wait(live, timeout)
        if not ready:
            return None
        # round-robin among ready peers so nobody is starved
        ready_peers = sorted(self._peer_of[id(c)] for c in ready)
        peer = min(ready_peers, key=lambda p: (p - self._rotate) % self.n_workers)
        self._rotate = (peer + 1) % self.n_workers
        try:
            data = self._conns[peer].recv_bytes()
        except (EOFError, OSError) as exc:
            self._conns[peer].close()
            raise WorkerLost(peer, type(exc).__name__) from exc
        return peer, decode(data)

    def close(self, abort: bool = False) -> None:
        for i in range(self.n_workers):
            if not self._closed[i]:
                try:
                    self.send(i, Terminate())
                except WorkerLost:
                    pass
        for proc in self._procs:
            if abort:
                proc.terminate()
            proc.join(timeout=5)
            if proc.is_alive():
                log.warning("worker %s did not exit, terminating", proc.name)
                proc.terminate()
                proc.join()
        for c in self._conns:
            c.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
