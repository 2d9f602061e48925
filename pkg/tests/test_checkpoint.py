import pytest

from revsearch.checkpoint import (
    Checkpoint, CheckpointError, CheckpointFormatError, CheckpointTruncatedError,
    CheckpointVersionError, read_checkpoint, write_checkpoint,
)
from revsearch.node import INF, NodeRecord
from revsearch.scheduler import SchedulerParams


def sample(jobs=3):
    params = SchedulerParams(max_depth=INF, max_nodes=7, hist_path="h.txt")
    recs = [NodeRecord([k, -k], [k], b"\x00ab", [0.1 * k], depth=k, unexplored=True)
            for k in range(jobs)]
    return Checkpoint(params, "topsort", "3 1\n1 2\n", recs, 41, 17, b"\x01\x02", 2.5)


def test_round_trip(tmp_path):
    c = sample()
    p = tmp_path / "ck"
    write_checkpoint(c, p)
    assert read_checkpoint(p) == c
    # re-saving what was read gives the same bytes
    write_checkpoint(read_checkpoint(p), tmp_path / "ck2")
    assert (tmp_path / "ck2").read_bytes() == p.read_bytes()
    assert p.read_bytes().startswith(b"mts-checkpoint 1\n")
    assert not (tmp_path / "ck.tmp").exists()


def test_empty_job_list(tmp_path):
    c = sample(0)
    c.shared = b""
    write_checkpoint(c, tmp_path / "ck")
    assert read_checkpoint(tmp_path / "ck").jobs == []


def test_input_with_odd_bytes(tmp_path):
    c = sample()
    c.input_text = "end\njobs 9\n\n"
    write_checkpoint(c, tmp_path / "ck")
    assert read_checkpoint(tmp_path / "ck").input_text == c.input_text


def test_version_mismatch(tmp_path):
    p = tmp_path / "ck"
    write_checkpoint(sample(), p)
    p.write_bytes(p.read_bytes().replace(b"mts-checkpoint 1", b"mts-checkpoint 2", 1))
    with pytest.raises(CheckpointVersionError):
        read_checkpoint(p)


@pytest.mark.parametrize("keep", [0, 10, 40, 200, -30, -5])
def test_truncated(tmp_path, keep):
    p = tmp_path / "ck"
    write_checkpoint(sample(), p)
    data = p.read_bytes()
    p.write_bytes(data[:keep])
    with pytest.raises(CheckpointTruncatedError):
        read_checkpoint(p)


def test_malformed_record(tmp_path):
    p = tmp_path / "ck"
    write_checkpoint(sample(1), p)
    lines = p.read_bytes().split(b"\n")
    i = lines.index(b"jobs 1") + 1
    lines[i] = lines[i][:-4]
    p.write_bytes(b"\n".join(lines))
    with pytest.raises(CheckpointFormatError):
        read_checkpoint(p)


def test_not_a_checkpoint(tmp_path):
    p = tmp_path / "ck"
    p.write_bytes(b"hello world\n")
    with pytest.raises(CheckpointFormatError):
        read_checkpoint(p)
    with pytest.raises(CheckpointError):
        read_checkpoint(tmp_path / "missing")


def test_errors_are_distinct():
    kinds = {CheckpointVersionError, CheckpointTruncatedError, CheckpointFormatError}
    assert len(kinds) == 3
    assert all(issubclass(k, CheckpointError) for k in kinds)
