"""Sequential reverse-search kernels.

A search tree is described implicitly by a :class:`SearchProblem`: a root,
a degree bound ``delta``, an adjacency oracle ``adj(v, j)`` and a parent
function ``f(v) -> (u, j)``.  Nodes are whatever hashable values the
problem likes; they are only turned into :class:`NodeRecord` objects when
they have to leave the process.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Hashable, Optional

from .node import Budget, NodeRecord, PruneMode

Node = Hashable
# emit(node, absolute_depth, unexplored)
Emit = Callable[[Any, int, bool], None]


class ChildClass(enum.IntEnum):
    ZERO = 0
    ONE = 1
    TWO_OR_MORE = 2


class SearchProblem:
    """Base class for an enumeration problem solved by reverse search.

    Subclasses set ``delta`` and implement ``root``, ``adj`` and ``f``.
    ``next_child`` may be overridden with something faster than probing
    every ``j``, but it must return the same sequence.
    """

    delta: int = 0
    countonly: bool = False
    # set by the worker while a job runs (a revsearch.worker.JobIO)
    io = None

    def root(self) -> Node:
        raise NotImplementedError

    def adj(self, v: Node, j: int) -> Optional[Node]:
        raise NotImplementedError

    def f(self, v: Node) -> tuple[Node, int]:
        raise NotImplementedError

    @cached_property
    def root_node(self) -> Node:
        return self.root()

    def next_child(self, v: Node, j: int) -> Optional[tuple[int, Node]]:
        """Smallest ``k > j`` whose neighbour ``adj(v, k)`` has ``v`` as parent."""
        root = self.root_node
        for k in range(j + 1, self.delta + 1):
            w = self.adj(v, k)
            if w is None or w == root:
                continue
            if self.f(w)[0] == v:
                return k, w
        return None

    def describe(self, v: Node) -> str:
        return str(v)

    def pack(self, v: Node, depth: int = 0, unexplored: bool = False) -> NodeRecord:
        raise NotImplementedError

    def unpack(self, record: NodeRecord) -> Node:
        raise NotImplementedError


@dataclass
class TraversalResult:
    count: int = 0
    unexplored_emitted: int = 0


def child_count_class(problem: SearchProblem, v: Node) -> ChildClass:
    first = problem.next_child(v, 0)
    if first is None:
        return ChildClass.ZERO
    if problem.next_child(v, first[0]) is None:
        return ChildClass.ONE
    return ChildClass.TWO_OR_MORE


def _check_step(problem: SearchProblem, v: Node, j: int, w: Node) -> None:
    back = problem.f(w)
    if back != (v, j):
        raise AssertionError(f"f({w!r}) = {back!r}, expected {(v, j)!r}")
    if problem.adj(v, j) != w:
        raise AssertionError(f"adj({v!r}, {j}) != {w!r}")


def reverse_search(
    problem: SearchProblem,
    start: Node,
    emit: Optional[Emit] = None,
    *,
    start_depth: int = 0,
    check: bool = False,
) -> TraversalResult:
    """Visit the whole subtree below ``start`` (``start`` itself is not emitted)."""
    delta = problem.delta
    v, j, depth, count = start, 0, 0, 0
    while True:
        while j < delta:
            step = problem.next_child(v, j)
            if step is None:
                j = delta
                break
            if check:
                _check_step(problem, v, step[0], step[1])
            v, j = step[1], 0
            depth += 1
            count += 1
            if emit is not None:
                emit(v, start_depth + depth, False)
        if depth > 0:
            v, j = problem.f(v)
            depth -= 1
        if depth == 0 and j == delta:
            return TraversalResult(count, 0)


def budgeted_search(
    problem: SearchProblem,
    start: Node,
    budget: Budget = Budget(),
    prune: PruneMode = PruneMode.OFF,
    emit: Optional[Emit] = None,
    *,
    start_depth: int = 0,
    halt: Optional[Callable[[], bool]] = None,
    check: bool = False,
) -> TraversalResult:
    """Depth-first traversal below ``start`` that stops descending once the
    budget is spent.

    Every node is emitted at its forward step.  A node reached when
    ``count >= max_nodes`` or at ``max_depth`` is emitted with
    ``unexplored=True`` and not descended; after that, each further sibling
    met while backtracking to ``start`` is emitted the same way.  ``halt``
    is polled at every forward step and, once true, exhausts the budget.
    """
    prune = PruneMode(prune)
    delta = problem.delta
    max_depth, max_nodes = budget.max_depth, budget.max_nodes
    next_child = problem.next_child
    v, j, depth, count, flagged = start, 0, 0, 0, 0
    while True:
        unexplored = False
        while not unexplored and j < delta:
            step = next_child(v, j)
            if step is None:
                j = delta
                break
            if check:
                _check_step(problem, v, step[0], step[1])
            v, j = step[1], 0
            count += 1
            depth += 1
            # >= rather than == on depth: path pruning may walk below max_depth
            if count >= max_nodes or depth >= max_depth or (halt is not None and halt()):
                if prune is PruneMode.OFF:
                    unexplored = True
                else:
                    kind = child_count_class(problem, v)
                    if kind is ChildClass.ZERO:
                        j = delta
                    elif kind is ChildClass.TWO_OR_MORE or prune is PruneMode.LEAVES:
                        unexplored = True
            if unexplored:
                flagged += 1
            if emit is not None:
                emit(v, start_depth + depth, unexplored)
        if depth > 0:
            v, j = problem.f(v)
            depth -= 1
        if depth == 0 and j == delta:
            return TraversalResult(count, flagged)
