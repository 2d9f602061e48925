import pytest

from revsearch.messages import (
    CleanStopRequest, JobAssign, JobResult, JobStatus, OutputChunk, Stream, UnexploredBatch,
)
from revsearch.node import INF, Budget, PruneMode
from revsearch.transport import InProcessTransport
from revsearch.worker import (
    JobIO, OutputBlockError, Worker, buffer_output, format_node,
)

from oracles import FixtureTree, fixture_depth, fixture_subtree


def run(problem, v, budget, prune=PruneMode.OFF, **kw):
    sent = []
    worker = Worker(problem, sent.append, **kw)
    result = worker.run_job(problem.pack(v, fixture_depth(v)), budget, prune)
    return result, sent


def out_text(sent, stream=Stream.OUT):
    return b"".join(m.data for m in sent if isinstance(m, OutputChunk) and m.stream is stream).decode()


def flagged(sent):
    return [r.vlong[0] for m in sent if isinstance(m, UnexploredBatch) for r in m.nodes]


def test_buffer_output_rule():
    buf = bytearray()
    assert buffer_output(buf, b"abc\n", 8) is None
    assert buffer_output(buf, b"defgh\n", 8) == b"abc\ndefgh\n"
    assert buf == b""
    assert buffer_output(buf, b"abcdefghij", 8) is None
    assert buffer_output(buf, b"k\n", 8) == b"abcdefghijk\n"


def test_job_7_unlimited():
    result, sent = run(FixtureTree(), 7, Budget(INF, INF))
    assert result.count == 10 and result.unexplored_emitted == 0
    assert flagged(sent) == []
    lines = out_text(sent).splitlines()
    assert lines[0] == "8 d=2"
    assert sorted(int(x.split()[0]) for x in lines) == sorted(fixture_subtree(7))
    assert isinstance(sent[-1], JobResult) and sent[-1].status is JobStatus.OK


def test_job_7_small_budget():
    # count reaches the budget on node 10, which is therefore flagged
    result, sent = run(FixtureTree(), 7, Budget(INF, 3))
    assert [int(x.split()[0]) for x in out_text(sent).splitlines()] == [8, 9, 10, 11, 15, 16]
    assert flagged(sent) == [10, 11, 15, 16]
    assert result.count == 6 and result.unexplored_emitted == 4


def test_leaf_job():
    result, sent = run(FixtureTree(), 2, Budget(1, 1))
    assert result.count == 0
    assert out_text(sent) == ""
    assert sent == [JobResult(result)]


def test_unexplored_batches_match_flags():
    result, sent = run(FixtureTree(), 0, Budget(1, INF), batch_size=3)
    sizes = [len(m.nodes) for m in sent if isinstance(m, UnexploredBatch)]
    assert sizes == [3, 1]
    assert flagged(sent) == [1, 7, 18, 22]
    # batches and output precede the result
    assert isinstance(sent[-1], JobResult)


def test_parallel_mode_has_no_marker():
    _, sent = run(FixtureTree(), 0, Budget(1, INF))
    assert "*unexplored" not in out_text(sent)
    assert format_node(FixtureTree(), 7, 1, True, marker=True) == "7 d=1 *unexplored\n"


def test_byte_preservation_with_small_maxbuf():
    _, small = run(FixtureTree(), 0, Budget(), maxbuf=5)
    _, big = run(FixtureTree(), 0, Budget())
    assert out_text(small) == out_text(big)
    assert sum(isinstance(m, OutputChunk) for m in small) > 1


def test_block_rules():
    sent = []
    io = JobIO(sent.append, maxbuf=4)
    io.write("pre\n")
    io.begin_block()
    with pytest.raises(OutputBlockError):
        io.begin_block()
    io.write("a\n")
    io.write("b\n")
    io.end_block()
    io.begin_block()
    io.end_block()  # empty block sends nothing
    io.write("x")
    io.begin_block()
    io.write("open\n")
    io.close()  # closes the open block first
    assert [(m.data, m.block) for m in sent] == [
        (b"pre\n", False), (b"a\nb\n", True), (b"x", False), (b"open\n", True),
    ]
    with pytest.raises(OutputBlockError):
        io.end_block()


class Blocky(FixtureTree):
    """Writes three-line blocks for every visited node."""

    def describe(self, v):
        self.io.begin_block()
        for k in range(3):
            self.io.write(f"block {v} line {k}\n")
        self.io.end_block()
        return str(v)


def test_blocks_contiguous_under_interleaving():
    t = InProcessTransport(Blocky, 2, seed=3, maxbuf=1)
    rec = FixtureTree().pack
    t.send(0, JobAssign(rec(1, 1), Budget(), PruneMode.OFF))
    t.send(1, JobAssign(rec(7, 1), Budget(), PruneMode.OFF))
    merged = b""
    while (m := t.receive(0)) is not None:
        if isinstance(m[1], OutputChunk):
            merged += m[1].data
    lines = merged.decode().splitlines()
    for i, line in enumerate(lines):
        if line.endswith("line 0"):
            v = line.split()[1]
            assert lines[i + 1] == f"block {v} line 1"
            assert lines[i + 2] == f"block {v} line 2"


class Stopper(FixtureTree):
    def __init__(self, at, how):
        super().__init__()
        self.at, self.how = at, how

    def describe(self, v):
        if v == self.at:
            if self.how == "clean":
                self.io.cleanstop()
            elif self.how == "emergency":
                self.io.emergencystop("bad state")
            else:
                raise RuntimeError("boom")
        return str(v)


def test_cleanstop_hands_back_the_rest():
    result, sent = run(Stopper(3, "clean"), 0, Budget())
    assert any(isinstance(m, CleanStopRequest) for m in sent)
    ordinary = [int(x.split()[0]) for x in out_text(sent).splitlines()]
    # nothing is lost: visited nodes plus flagged subtrees cover the tree
    covered = set(ordinary)
    for v in flagged(sent):
        covered |= fixture_subtree(v)
    assert covered == fixture_subtree(0)
    assert len(ordinary) == result.count
    # output written before the request is flushed ahead of it
    idx = next(i for i, m in enumerate(sent) if isinstance(m, CleanStopRequest))
    assert isinstance(sent[idx - 1], OutputChunk)
    assert sent[-1].status is JobStatus.OK


def test_emergency_stop_marks_job():
    _, sent = run(Stopper(3, "emergency"), 0, Budget())
    assert sent[-1].status is JobStatus.EMERGENCY
    assert "bad state" in out_text(sent, Stream.ERR)


def test_callback_failure_marks_job_failed():
    _, sent = run(Stopper(3, "raise"), 0, Budget())
    assert sent[-1].status is JobStatus.FAILED
    assert "boom" in out_text(sent, Stream.ERR)
