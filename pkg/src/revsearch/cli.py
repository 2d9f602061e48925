"""Command-line front end.

    revsearch APP [INPUT] [options]

Without ``--workers`` the whole tree is walked in this process (budgets
default to unlimited and flagged nodes carry a ``*unexplored`` marker).
With ``--workers N`` a master hands budgeted jobs to N workers.

Exit status: 0 success, 1 usage or input error, 2 run aborted,
3 stopped early (stop file or clean stop).
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import BinaryIO, Optional, Sequence

from .apps import APPS, Application, InputError
from .checkpoint import CheckpointError, read_checkpoint
from .instrument import FrequencyWriter
from .messages import CleanStopRequest, OutputChunk, Stream
from .node import INF, Budget, PruneMode
from .options import APP_OPTIONS, FRAMEWORK_OPTIONS, check_unique
from .scheduler import RunAborted, SchedulerParams, run_master, with_paths
from .transport import InProcessTransport, ProcessTransport
from .worker import EmergencyStop, JobIO, format_node, traverse

log = logging.getLogger("revsearch")

EXIT_OK, EXIT_USAGE, EXIT_ABORT, EXIT_STOPPED = 0, 1, 2, 3

# parallel-only options; meaningless when one process walks the whole tree
PARALLEL_ONLY = ("hist", "checkp", "stop", "restart")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _limit(text: str):
    if text.lower() in ("inf", "infinity"):
        return INF
    return _positive(text)


def _prune(text: str) -> PruneMode:
    try:
        return PruneMode.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


_TYPES = {
    "maxd": _limit, "maxnodes": _positive, "scale": _positive, "lmin": _positive,
    "lmax": _positive, "maxbuf": _positive,
}


def build_parser() -> argparse.ArgumentParser:
    check_unique(FRAMEWORK_OPTIONS, APP_OPTIONS)
    p = _Parser(prog="revsearch", allow_abbrev=False,
                description="Parallel reverse search enumeration.")
    p.add_argument("app", choices=sorted(APPS), help="application to run")
    p.add_argument("input", nargs="?", default="-",
                   help="input file, '-' or absent for stdin")
    fw = p.add_argument_group("framework options")
    for spec in FRAMEWORK_OPTIONS:
        key = spec.name.lstrip("-")
        fw.add_argument(spec.name, dest=key, metavar=key.upper(),
                        type=_TYPES.get(key, str), default=None)
    ap = p.add_argument_group("application options")
    ap.add_argument("-countonly", action="store_true", help="print only the final count")
    ap.add_argument("-prune", type=_prune, default=PruneMode.OFF,
                    help="0 or leaves: no leaf jobs; 1 or paths: no chain jobs either")
    run = p.add_argument_group("run options")
    run.add_argument("--workers", type=_positive, default=None,
                     help="number of workers; omit for a single-process run")
    run.add_argument("--backend", choices=("inprocess", "process"), default="process")
    run.add_argument("--seed", type=int, default=0, help="scheduling seed of the inprocess backend")
    run.add_argument("-v", "--verbose", action="count", default=0)
    return p


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    ns = build_parser().parse_intermixed_args(list(argv))
    if ns.workers is None:
        used = [f"-{k}" for k in PARALLEL_ONLY if getattr(ns, k) is not None]
        if used:
            raise UsageError(f"{', '.join(used)} need --workers")
    ns.params = scheduler_params(ns)
    return ns


def scheduler_params(ns: argparse.Namespace) -> SchedulerParams:
    given = {
        "max_depth": ns.maxd, "max_nodes": ns.maxnodes, "scale": ns.scale,
        "lmin": ns.lmin, "lmax": ns.lmax, "maxbuf": ns.maxbuf,
        "hist_path": ns.hist, "freq_path": ns.freq, "checkp_path": ns.checkp,
        "stop_path": ns.stop, "restart_path": ns.restart,
    }
    try:
        return SchedulerParams(**{k: v for k, v in given.items() if v is not None})
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def read_input_blob(path: str, stdin: Optional[BinaryIO] = None) -> str:
    """The whole input as one string, shared verbatim by master and workers."""
    try:
        if path == "-":
            data = (stdin or sys.stdin.buffer).read()
        else:
            with open(path, "rb") as fh:
                data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read input {path}: {exc.strerror or exc}") from None
    try:
        return data.decode()
    except UnicodeDecodeError:
        raise InputError(f"input {path} is not valid UTF-8 text") from None


def write_frequency(counts: Sequence[int], path: str, append: bool = False) -> None:
    writer = FrequencyWriter(path, append)
    for c in counts:
        writer.record(c)
    writer.close()


def run_standalone(app: Application, params: SchedulerParams, ns, out: BinaryIO,
                   err: BinaryIO) -> int:
    budget = Budget(ns.maxd if ns.maxd is not None else INF,
                    ns.maxnodes if ns.maxnodes is not None else INF)
    stopped = []

    def send(msg):
        if isinstance(msg, OutputChunk):
            (err if msg.stream is Stream.ERR else out).write(msg.data)
        elif isinstance(msg, CleanStopRequest):
            stopped.append(msg)

    io = JobIO(send, params.maxbuf)
    root = app.root_node
    if not app.countonly:
        io.write(format_node(app, root, 0))
    try:
        result = traverse(app, app.pack(root, 0, False), budget, app.prune, io,
                          lambda rec: None, marker=True)
    except EmergencyStop as exc:
        io.close()
        err.write(f"*** run aborted: emergency stop: {exc}; output is partial\n".encode())
        return EXIT_ABORT
    io.close()
    if params.freq_path:
        write_frequency([result.count], params.freq_path)
    if stopped:
        err.write(b"*** stopped early; output is partial\n")
        return EXIT_STOPPED
    out.write(app.summary(result.count + 1).encode())
    return EXIT_OK


def run_parallel(app: Application, text: str, ns, params: SchedulerParams, out: BinaryIO,
                 err: BinaryIO, restart=None) -> int:
    app_cls, countonly, prune = type(app), ns.countonly, ns.prune

    def factory():
        return app_cls.from_input(text, countonly, prune)

    if ns.backend == "inprocess":
        transport = InProcessTransport(factory, ns.workers, seed=ns.seed, maxbuf=params.maxbuf)
    else:
        transport = ProcessTransport(factory, ns.workers, maxbuf=params.maxbuf)
    try:
        summary = run_master(app, params, transport, out=out, err=err, prune=prune,
                             app_id=app_cls.name, input_text=text, restart=restart)
    except RunAborted:
        return EXIT_ABORT
    except BaseException:
        transport.close(abort=True)
        raise
    if summary.stopped:
        where = f"checkpoint written to {params.checkp_path}" if summary.checkpoint_written \
            else "no checkpoint (-checkp not set)"
        err.write(f"*** stopped after {summary.total_nodes} nodes, {summary.jobs_left} jobs "
                  f"left; {where}\n".encode())
        return EXIT_STOPPED
    out.write(app.summary(summary.total_nodes).encode())
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, *, stdin: Optional[BinaryIO] = None,
         stdout: Optional[BinaryIO] = None, stderr: Optional[BinaryIO] = None) -> int:
    out = stdout or sys.stdout.buffer
    err = stderr or sys.stderr.buffer
    try:
        ns = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        err.write(build_parser().format_usage().encode())
        err.write(f"revsearch: error: {exc}\n".encode())
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(ns.verbose, 2),
                        format="revsearch: %(message)s")
    app_cls = APPS[ns.app]
    params = ns.params
    restart = None
    try:
        if params.restart_path:
            restart = read_checkpoint(params.restart_path)
            if restart.app_id != app_cls.name:
                raise UsageError(f"checkpoint {params.restart_path} belongs to "
                                 f"{restart.app_id!r}, not {app_cls.name!r}")
            text = restart.input_text
            params = with_paths(restart.params, params)
        else:
            text = read_input_blob(ns.input, stdin)
        app = app_cls.from_input(text, ns.countonly, ns.prune)
        if ns.workers is None:
            code = run_standalone(app, params, ns, out, err)
        else:
            code = run_parallel(app, text, ns, params, out, err, restart)
    except (UsageError, InputError, CheckpointError) as exc:
        err.write(f"revsearch: error: {exc}\n".encode())
        return EXIT_USAGE
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
