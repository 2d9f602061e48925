"""Linear extensions (topological sorts) of a poset by adjacent transpositions.

The root is the identity permutation, which requires every relation
``i < j`` in the input to have ``i < j`` as labels.  The parent of a
permutation swaps its first descent, so every extension is reached from
the identity by sorting out inversions one adjacent swap at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..node import NodeRecord, PruneMode
from .base import Application, InputError

MAX_ELEMENTS = 100

Perm = tuple  # v[k] = element at position k+1


@dataclass(frozen=True)
class Poset:
    n: int
    m: int
    edges: tuple[tuple[int, int], ...]

    def precedes(self) -> list[list[bool]]:
        """``A[i][j]`` iff i must come before j; 1-indexed."""
        A = [[False] * (self.n + 1) for _ in range(self.n + 1)]
        for i, j in self.edges:
            A[i][j] = True
        return A


def parse_poset(text: str) -> Poset:
    tokens = text.split()
    if not tokens:
        raise InputError("no input found")
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise InputError(f"non-integer token in input: {exc}") from None
    if len(values) < 2:
        raise InputError("input must start with n and m")
    n, m = values[0], values[1]
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    if n > MAX_ELEMENTS:
        raise InputError(f"n = {n} exceeds the limit of {MAX_ELEMENTS} elements")
    if m < 0:
        raise InputError(f"m must be non-negative, got {m}")
    if len(values) != 2 + 2 * m:
        raise InputError(f"expected {m} pairs after n and m, found {len(values) - 2} numbers")
    edges = []
    for k in range(m):
        i, j = values[2 + 2 * k], values[3 + 2 * k]
        if not (1 <= i < j <= n):
            raise InputError(f"relation {i} {j}: need 1 <= i < j <= {n} (labels must be pre-sorted)")
        edges.append((i, j))
    return Poset(n, m, tuple(edges))


class TopSorts(Application):
    name = "topsort"
    noun = "permutations"

    def __init__(self, poset: Poset, countonly: bool = False, prune: PruneMode = PruneMode.OFF):
        super().__init__(countonly, prune)
        self.poset = poset
        self.n = poset.n
        self.delta = poset.n - 1
        A = poset.precedes()
        # related either way; adjacent positions may only swap when unrelated
        self.related = [[A[i][j] or A[j][i] for j in range(self.n + 1)] for i in range(self.n + 1)]

    @classmethod
    def from_input(cls, text, countonly=False, prune=PruneMode.OFF):
        return cls(parse_poset(text), countonly, prune)

    def root(self) -> Perm:
        return tuple(range(1, self.n + 1))

    def adj(self, v: Perm, j: int) -> Optional[Perm]:
        a, b = v[j - 1], v[j]
        if self.related[a][b]:
            return None
        return v[:j - 1] + (b, a) + v[j + 1:]

    def f(self, v: Perm) -> tuple[Perm, int]:
        for p in range(self.n - 1):
            if v[p] > v[p + 1]:
                return v[:p] + (v[p + 1], v[p]) + v[p + 2:], p + 1
        raise AssertionError("f called on the root permutation")

    def next_child(self, v: Perm, j: int):
        # Let d be the first descent of v (0-based pair d, d+1).  Swapping
        # p < d always yields a child when legal; p = d+1 does when
        # v[d+1] < v[d+2] and v[d] < v[d+2]; nothing else can.
        n, related = self.n, self.related
        d = 0
        while d < n - 1 and v[d] < v[d + 1]:
            d += 1
        for p in range(j, d):
            a, b = v[p], v[p + 1]
            if not related[a][b]:
                return p + 1, v[:p] + (b, a) + v[p + 2:]
        p = d + 1
        if j <= p <= n - 2:
            a, b = v[p], v[p + 1]
            if a < b and v[d] < b and not related[a][b]:
                return p + 1, v[:p] + (b, a) + v[p + 2:]
        return None

    def describe(self, v: Perm) -> str:
        return "".join(f" {x}" for x in v)

    def pack(self, v: Perm, depth: int = 0, unexplored: bool = False) -> NodeRecord:
        return NodeRecord(vlong=list(v), depth=depth, unexplored=unexplored)

    def unpack(self, record: NodeRecord) -> Perm:
        if len(record.vlong) != self.n:
            raise ValueError(f"record holds {len(record.vlong)} elements, poset has {self.n}")
        return tuple(record.vlong)
