"""Histogram and frequency files written by the master."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HistogramSample:
    t: float
    busy: int
    joblist: int
    owing: int
    total_jobs: int
    reserved1: int = 0
    reserved2: int = 0

    def line(self) -> str:
        return (f"{self.t:f} {self.busy} {self.joblist} {self.owing} "
                f"{self.reserved1} {self.reserved2} {self.total_jobs}")


class _LineFile:
    """Append-only line sink that turns itself off after the first I/O error."""

    what = "file"

    def __init__(self, path, append: bool = False):
        self.path = Path(path)
        self.enabled = True
        self._fh = None
        try:
            self._fh = open(self.path, "a" if append else "w", encoding="ascii")
        except OSError as exc:
            self._disable(exc)

    def _disable(self, exc: OSError) -> None:
        log.warning("cannot write %s %s (%s); disabled", self.what, self.path, exc)
        self.enabled = False

    def write_line(self, line: str) -> None:
        if not self.enabled:
            return
        try:
            self._fh.write(line + "\n")
            self._fh.flush()
        except OSError as exc:
            self._disable(exc)

    def close(self) -> None:
        if self._fh is not None:
            try:
                self._fh.close()
            except OSError:
                pass
            self._fh = None


class HistogramWriter(_LineFile):
    what = "histogram file"

    def __init__(self, path, append: bool = False):
        super().__init__(path, append)
        self.last_t: Optional[float] = None

    def record(self, sample: HistogramSample) -> bool:
        """Write ``sample`` unless its time does not move forward."""
        if self.last_t is not None and sample.t <= self.last_t:
            return False
        self.last_t = sample.t
        self.write_line(sample.line())
        return True


class FrequencyWriter(_LineFile):
    """One line per completed job holding that job's node count."""

    what = "frequency file"

    def record(self, count: int) -> None:
        self.write_line(str(count))
