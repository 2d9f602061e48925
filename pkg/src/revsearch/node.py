"""Plain value types shipped between the master and its workers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

INF = math.inf

Limit = Union[int, float]


class PruneMode(enum.IntEnum):
    """Which unexplored subtrees are worth handing back to the master.

    ``LEAVES`` never returns a childless node as unexplored; ``PATHS``
    additionally walks down single-child chains and only returns a node
    that has at least two children.
    """

    OFF = 0
    LEAVES = 1
    PATHS = 2

    @classmethod
    def parse(cls, text: str) -> "PruneMode":
        # numeric values follow the legacy -prune convention: 0 = leaves, 1 = paths
        legacy = {"0": cls.LEAVES, "1": cls.PATHS}
        if text in legacy:
            return legacy[text]
        try:
            return cls[text.upper()]
        except KeyError:
            raise ValueError(f"unknown prune mode {text!r}") from None


def _check_limit(name: str, value: Limit) -> None:
    if value == INF:
        return
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an int or INF, got {value!r}")
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class Budget:
    max_depth: Limit = INF
    max_nodes: Limit = INF

    def __post_init__(self):
        _check_limit("max_depth", self.max_depth)
        _check_limit("max_nodes", self.max_nodes)


@dataclass
class NodeRecord:
    """Generic tree node: four payload arrays plus depth and the unexplored flag.

    Applications pack whatever they need into the payload arrays; the
    framework only looks at ``depth`` and ``unexplored``.
    """

    vlong: list[int] = field(default_factory=list)
    vint: list[int] = field(default_factory=list)
    vchar: bytes = b""
    vfloat: list[float] = field(default_factory=list)
    depth: int = 0
    unexplored: bool = False

    @property
    def size_vlong(self) -> int:
        return len(self.vlong)

    @property
    def size_vint(self) -> int:
        return len(self.vint)

    @property
    def size_vchar(self) -> int:
        return len(self.vchar)

    @property
    def size_vfloat(self) -> int:
        return len(self.vfloat)
