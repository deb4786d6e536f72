"""Rotation-extension machinery for long paths and Hamilton cycles.

Index convention: the API is 0-based.  A path ``(v_1, ..., v_l)`` written
1-based in the literature is ``order[0] .. order[l-1]`` here, so pivot
position ``t`` corresponds to ``order[t - 1]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadPivot, TooLarge
from .graph import Graph
from .structure import is_connected


@dataclass(frozen=True)
class PathState:
    order: tuple[int, ...]
    pos: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))
        pos = {v: i for i, v in enumerate(self.order)}
        if len(pos) != len(self.order):
            raise ValueError("path repeats a vertex")
        object.__setattr__(self, "pos", pos)

    @classmethod
    def of(cls, vertices: Sequence[int]) -> PathState:
        return cls(tuple(vertices))

    @property
    def length(self) -> int:
        """Number of edges."""
        return max(0, len(self.order) - 1)

    def __len__(self) -> int:
        return len(self.order)

    def is_path_in(self, h: Graph) -> bool:
        return all(h.has_edge(a, b) for a, b in zip(self.order, self.order[1:]))


def rotate(h: Graph, p: PathState, i: int) -> PathState:
    """Rotate at the pivot ``p.order[i]`` using the chord from the free endpoint.

    Keeps ``order[0]`` fixed and reverses the tail after the pivot, so the new
    free endpoint is ``order[i + 1]``.  Valid pivots are ``0 <= i <= len - 3``;
    ``i = len - 2`` would reproduce ``p``.
    """
    ell = len(p.order)
    if not 0 <= i <= ell - 3:
        raise BadPivot(f"pivot index {i} outside [0, {ell - 3}] for a path on {ell} vertices")
    end = p.order[-1]
    if not h.has_edge(end, p.order[i]):
        raise BadPivot(f"no edge between endpoint {end} and pivot {p.order[i]}")
    return PathState(p.order[: i + 1] + tuple(reversed(p.order[i + 1 :])))


@dataclass(frozen=True)
class RotationClosure:
    fixed: int
    initial: PathState
    endpoints: frozenset[int]
    # endpoint -> (endpoint of the path it was first rotated from, pivot index); None for the start
    parent: dict[int, tuple[int, int] | None]
    witness: dict[int, tuple[int, ...]] = field(repr=False)
    states: int = 0

    def path_to(self, endpoint: int) -> PathState:
        """A path with the same vertex set as the initial one, from ``fixed`` to ``endpoint``."""
        return PathState(self.witness[endpoint])


def rotation_closure(
    h: Graph,
    p: PathState,
    rng: np.random.Generator | None = None,
    max_states: int = 2_000_000,
) -> RotationClosure:
    """Every free endpoint reachable by rotation sequences that keep ``p.order[0]`` fixed.

    Breadth-first over whole paths (distinct paths with the same endpoint can
    allow different rotations), stopping early once every non-fixed vertex of
    the path is an endpoint.  ``rng`` only shuffles the exploration order.
    """
    if len(p.order) == 0:
        raise ValueError("empty path")
    fixed = p.order[0]
    start = p.order[-1]
    parent: dict[int, tuple[int, int] | None] = {start: None}
    witness = {start: p.order}
    full = len(p.order) - 1 if len(p.order) > 1 else 1
    seen = {p.order}
    queue = deque([p.order])
    adj = h.adj
    while queue and len(witness) < full:
        order = queue.popleft()
        ell = len(order)
        pos = {v: i for i, v in enumerate(order)}
        end = order[-1]
        nbrs = list(adj[end])
        if rng is not None:
            rng.shuffle(nbrs)
        for y in nbrs:
            i = pos.get(y)
            if i is None or i > ell - 3:
                continue
            nxt = order[: i + 1] + tuple(reversed(order[i + 1 :]))
            if nxt in seen:
                continue
            seen.add(nxt)
            if len(seen) > max_states:
                raise TooLarge(f"rotation closure exceeded {max_states} path states")
            queue.append(nxt)
            new_end = nxt[-1]
            if new_end not in witness:
                parent[new_end] = (end, i)
                witness[new_end] = nxt
    return RotationClosure(fixed, p, frozenset(witness), parent, witness, len(seen))


def posa_bound_check(h: Graph, p: PathState) -> bool:
    """``|N(EP)| <= 2|EP| - 1`` for the endpoint set of ``p`` (meaningful when ``p`` is longest)."""
    ep = rotation_closure(h, p).endpoints
    nbhd = {w for x in ep for w in h.adj[x] if w not in ep}
    return len(nbhd) <= 2 * len(ep) - 1


# -- search ------------------------------------------------------------------


class _Search:
    """Mutable path with a position index; moves: extend, reopen a cycle, rotate."""

    def __init__(self, h: Graph, rng: np.random.Generator, start: int) -> None:
        self.h = h
        self.rng = rng
        self.path = [start]
        self.pos = {start: 0}
        self.rotations = 0

    def _pick(self, items: list[int]) -> int:
        return items[int(self.rng.integers(len(items)))]

    def reverse(self) -> None:
        self.path.reverse()
        self.pos = {v: i for i, v in enumerate(self.path)}

    def try_extend(self) -> bool:
        adj = self.h.adj
        for _ in range(2):
            end = self.path[-1]
            off = [w for w in adj[end] if w not in self.pos]
            if off:
                w = self._pick(off)
                self.pos[w] = len(self.path)
                self.path.append(w)
                return True
            if len(self.path) == 1:
                return False
            self.reverse()
        return False

    def endpoints_adjacent(self) -> bool:
        return len(self.path) >= 3 and self.path[0] in self.h.neighbor_sets[self.path[-1]]

    def try_reopen(self) -> bool:
        """With a closed cycle, cut it next to a vertex that has an off-cycle neighbor and extend."""
        if not self.endpoints_adjacent():
            return False
        adj = self.h.adj
        idx = list(range(len(self.path)))
        self.rng.shuffle(idx)
        for j in idx:
            off = [w for w in adj[self.path[j]] if w not in self.pos]
            if off:
                self.path = self.path[j + 1 :] + self.path[: j + 1]
                self.pos = {v: i for i, v in enumerate(self.path)}
                w = self._pick(off)
                self.pos[w] = len(self.path)
                self.path.append(w)
                return True
        return False

    def valid_pivots(self) -> list[int]:
        ell = len(self.path)
        pos = self.pos
        return [
            i
            for y in self.h.adj[self.path[-1]]
            if (i := pos.get(y)) is not None and i <= ell - 3
        ]

    def rotate_at(self, i: int) -> None:
        tail = self.path[i + 1 :]
        tail.reverse()
        self.path[i + 1 :] = tail
        for off, v in enumerate(tail, start=i + 1):
            self.pos[v] = off
        self.rotations += 1

    def closing_pivot(self) -> int | None:
        """A pivot whose rotation leaves the endpoints adjacent, if one exists."""
        first_nbrs = self.h.neighbor_sets[self.path[0]]
        for i in self.valid_pivots():
            if self.path[i + 1] in first_nbrs:
                return i
        return None


def extend_or_rotate_search(
    h: Graph, budget: int, rng: np.random.Generator, start: int | None = None
) -> PathState:
    """Rotation-extension heuristic for a long path.

    Extends while possible, reopens closed cycles at a vertex with an outside
    neighbor, and otherwise rotates at a random valid pivot.  The path never
    shrinks, so the returned path is the longest seen; it is maximal (neither
    end has an off-path neighbor).
    """
    if h.n == 0:
        raise ValueError("search needs a nonempty graph")
    s = _Search(h, rng, int(rng.integers(h.n)) if start is None else start)
    while True:
        if s.try_extend():
            continue
        if len(s.path) == h.n:
            break
        if s.try_reopen():
            continue
        if s.rotations >= budget:
            break
        pivots = s.valid_pivots()
        if not pivots:
            s.reverse()
            pivots = s.valid_pivots()
            if not pivots:
                break
        s.rotate_at(pivots[int(rng.integers(len(pivots)))])
    return PathState(tuple(s.path))


def validate_cycle(h: Graph, cycle: Sequence[int], spanning: bool = False) -> bool:
    """Simple cycle on at least 3 vertices using only edges of ``h``."""
    if len(cycle) < 3 or len(set(cycle)) != len(cycle):
        return False
    if spanning and len(cycle) != h.n:
        return False
    sets = h.neighbor_sets
    return all(cycle[i - 1] in sets[cycle[i]] for i in range(len(cycle)))


def hamiltonicity_search(
    h: Graph, budget: int, rng: np.random.Generator
) -> tuple[int, ...] | None:
    """Try to find a Hamilton cycle within ``budget`` rotations; ``None`` if none was found."""
    n = h.n
    if n < 3 or min((len(r) for r in h.adj), default=0) < 2 or not is_connected(h):
        return None
    s = _Search(h, rng, int(rng.integers(n)))
    while True:
        if s.try_extend():
            continue
        if len(s.path) == n:
            if s.endpoints_adjacent():
                cycle = tuple(s.path)
                if not validate_cycle(h, cycle, spanning=True):
                    raise AssertionError("search produced an invalid Hamilton cycle")
                return cycle
            i = s.closing_pivot()
            if i is not None:
                s.rotate_at(i)
                continue
        elif s.try_reopen():
            continue
        if s.rotations >= budget:
            return None
        pivots = s.valid_pivots()
        if not pivots or rng.random() < 0.1:
            s.reverse()
            pivots = s.valid_pivots() or pivots
            if not pivots:
                return None
        s.rotate_at(pivots[int(rng.integers(len(pivots)))])


def brute_force_longest_path(h: Graph) -> tuple[int, PathState]:
    """Exact longest simple path by exhaustive DFS (n <= 12).  Length counts edges."""
    n = h.n
    if n > 12:
        raise TooLarge(f"brute-force longest path is limited to n <= 12, got {n}")
    if n == 0:
        raise ValueError("empty graph has no path")
    adj = h.adj
    best: list[int] = []
    on = [False] * n
    path: list[int] = []

    def dfs(v: int) -> bool:
        on[v] = True
        path.append(v)
        if len(path) > len(best):
            best[:] = path
        if len(best) == n:
            return True
        for w in adj[v]:
            if not on[w] and dfs(w):
                return True
        on[v] = False
        path.pop()
        return False

    for v in range(n):
        if dfs(v):
            break
    return len(best) - 1, PathState(tuple(best))
