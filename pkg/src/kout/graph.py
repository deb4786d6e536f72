"""Undirected simple host graphs, the generators used by the experiments, and edge-list I/O.

Vertices are dense integers ``0..n-1``.  A :class:`Graph` is immutable once built,
so it can be shared freely between trials.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import BadVertex, DuplicateEdge, InfeasibleDegree, OddOrder, ParseError, SelfLoop

# slack for float thresholds such as (1/2 + 0.1) * 20 == 12.000000000000002
_EPS = 1e-9


def ceil_tol(x: float) -> int:
    return math.ceil(x - _EPS)


def floor_tol(x: float) -> int:
    return math.floor(x + _EPS)


class Graph:
    """Undirected simple graph with sorted adjacency tuples."""

    __slots__ = ("n", "adj", "_sets", "_csr", "_codes", "_m")

    def __init__(self, n: int, adjacency: Sequence[Iterable[int]]) -> None:
        if n < 0 or len(adjacency) != n:
            raise ValueError(f"adjacency has {len(adjacency)} rows for n={n}")
        adj = tuple(tuple(sorted(set(int(w) for w in row))) for row in adjacency)
        for v, row in enumerate(adj):
            if row and (row[0] < 0 or row[-1] >= n):
                raise BadVertex(row[0] if row[0] < 0 else row[-1], n)
            if v in row:
                raise SelfLoop(f"self-loop at vertex {v}")
        self.n = n
        self.adj = adj
        self._sets = None
        self._csr = None
        self._codes = None
        self._m = sum(len(row) for row in adj) // 2
        sets = self.neighbor_sets
        for v, row in enumerate(adj):
            for w in row:
                if v not in sets[w]:
                    raise ValueError(f"adjacency not symmetric: {v}->{w} without {w}->{v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], strict: bool = False) -> Graph:
        """Build from an edge iterable.  ``strict`` rejects duplicate edges."""
        rows: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            for x in (u, v):
                if not 0 <= x < n:
                    raise BadVertex(x, n)
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}")
            if strict and v in rows[u]:
                raise DuplicateEdge(f"edge {{{u},{v}}} listed twice")
            rows[u].add(v)
            rows[v].add(u)
        return cls(n, rows)

    @classmethod
    def _from_pair_arrays(cls, n: int, us: np.ndarray, vs: np.ndarray) -> Graph:
        # us/vs hold each undirected edge once, no loops, no duplicates
        src = np.concatenate([us, vs])
        dst = np.concatenate([vs, us])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        cuts = np.searchsorted(src, np.arange(1, n))
        rows = np.split(dst, cuts)
        g = cls.__new__(cls)
        g.n = n
        g.adj = tuple(tuple(int(w) for w in row) for row in rows)
        g._sets = None
        g._csr = None
        g._codes = None
        g._m = len(us)
        return g

    # -- queries -----------------------------------------------------------

    @property
    def m(self) -> int:
        """Number of edges."""
        return self._m

    @property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        if self._sets is None:
            self._sets = tuple(frozenset(row) for row in self.adj)
        return self._sets

    @property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(offsets, targets)`` arrays; neighbors of v are ``targets[offsets[v]:offsets[v+1]]``."""
        if self._csr is None:
            degs = np.fromiter((len(row) for row in self.adj), dtype=np.int64, count=self.n)
            offsets = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(degs, out=offsets[1:])
            targets = np.fromiter(
                (w for row in self.adj for w in row), dtype=np.int64, count=int(offsets[-1])
            )
            self._csr = (offsets, targets)
        return self._csr

    @property
    def arc_codes(self) -> np.ndarray:
        """Sorted ``v * n + w`` over all ordered adjacent pairs, for vectorized membership tests."""
        if self._codes is None:
            offsets, targets = self.csr
            src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(offsets))
            self._codes = src * self.n + targets
        return self._codes

    def has_arcs(self, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
        """Elementwise ``has_edge`` over integer arrays."""
        codes = self.arc_codes
        q = np.asarray(src, dtype=np.int64) * self.n + np.asarray(dst, dtype=np.int64)
        if len(codes) == 0:
            return np.zeros(q.shape, dtype=bool)
        pos = np.minimum(np.searchsorted(codes, q), len(codes) - 1)
        return codes[pos] == q

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
            raise BadVertex(v, self.n)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self.check_vertex(v)
        return self.adj[v]

    def degree(self, v: int) -> int:
        self.check_vertex(v)
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(row) for row in self.adj]

    def has_edge(self, u: int, v: int) -> bool:
        self.check_vertex(u)
        self.check_vertex(v)
        return v in self.neighbor_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        """Each edge once as ``(u, v)`` with ``u < v``, in lexicographic order."""
        return [(u, w) for u, row in enumerate(self.adj) for w in row if u < w]

    def induced_subgraph(self, keep: Iterable[int]) -> Graph:
        """Subgraph on ``keep`` with the original vertex ids; other vertices become isolated."""
        kept = set(keep)
        rows = [
            [w for w in row if w in kept] if v in kept else []
            for v, row in enumerate(self.adj)
        ]
        return Graph(self.n, rows)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def min_degree(g: Graph) -> int:
    """Minimum degree; 0 for the empty graph on zero vertices."""
    return min((len(row) for row in g.adj), default=0)


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


def has_edge(g: Graph, u: int, v: int) -> bool:
    return g.has_edge(u, v)


def common_neighbors(g: Graph, u: int, v: int) -> set[int]:
    g.check_vertex(u)
    g.check_vertex(v)
    return set(g.neighbor_sets[u] & g.neighbor_sets[v])


# -- generators --------------------------------------------------------------


def empty_graph(n: int) -> Graph:
    return Graph(n, [()] * n)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete_graph needs n >= 1")
    return Graph(n, [[w for w in range(n) if w != v] for v in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle_graph needs n >= 3")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def star_graph(leaves: int) -> Graph:
    """Center 0 joined to ``leaves`` leaves."""
    return Graph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def two_cliques_plus_matching(n: int) -> Graph:
    """Two disjoint cliques on ``[0, n/2)`` and ``[n/2, n)`` joined by the matching ``i -- i + n/2``."""
    if n < 4 or n % 2:
        raise OddOrder(f"two_cliques_plus_matching needs an even n >= 4, got {n}")
    half = n // 2
    edges = [(u, v) for u, v in combinations(range(half), 2)]
    edges += [(u + half, v + half) for u, v in combinations(range(half), 2)]
    edges += [(i, i + half) for i in range(half)]
    return Graph.from_edges(n, edges)


def sdg_degree_floor(n: int, eps: float) -> int:
    return ceil_tol((0.5 + eps) * n)


def random_sdg(n: int, eps: float, removal_p: float, rng: np.random.Generator) -> Graph:
    """Random graph with minimum degree at least ``ceil((1/2 + eps) n)``.

    Starts from K_n and walks the edges in random order, deleting each with
    probability ``removal_p`` provided both endpoints stay at or above the floor.
    """
    floor = sdg_degree_floor(n, eps)
    if floor > n - 1:
        raise InfeasibleDegree(f"degree floor {floor} exceeds n-1={n - 1}")
    us, vs = np.triu_indices(n, k=1)
    if removal_p <= 0:
        return complete_graph(n)
    order = rng.permutation(len(us))
    coins = rng.random(len(us)) < removal_p
    deg = [n - 1] * n
    keep = np.ones(len(us), dtype=bool)
    for idx in order[coins[order]].tolist():
        u = int(us[idx])
        v = int(vs[idx])
        if deg[u] > floor and deg[v] > floor:
            keep[idx] = False
            deg[u] -= 1
            deg[v] -= 1
    return Graph._from_pair_arrays(n, us[keep].astype(np.int64), vs[keep].astype(np.int64))


def random_min_degree_host(n: int, m: int, rng: np.random.Generator) -> Graph:
    """Union of an undirected m-out choice on K_n: every vertex ends with degree >= m."""
    if m > n - 1 or m < 0:
        raise InfeasibleDegree(f"min degree {m} impossible on {n} vertices")
    if m == n - 1:
        return complete_graph(n)
    keys = rng.random((n, n - 1))
    picks = np.argpartition(keys, m - 1, axis=1)[:, :m] if m > 0 else np.empty((n, 0), int)
    src = np.repeat(np.arange(n), m)
    dst = picks.reshape(-1)
    dst = dst + (dst >= src)
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    codes = np.unique(lo * n + hi)
    return Graph._from_pair_arrays(n, codes // n, codes % n)


def gnp_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi G(n, p); used to build fuzz corpora."""
    us, vs = np.triu_indices(n, k=1)
    keep = rng.random(len(us)) < p
    return Graph._from_pair_arrays(n, us[keep].astype(np.int64), vs[keep].astype(np.int64))


def random_connected_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """G(n, p) plus a random spanning tree, so the result is always connected."""
    base = gnp_graph(n, p, rng)
    perm = rng.permutation(n).tolist()
    tree = [(perm[i], perm[int(rng.integers(0, i))]) for i in range(1, n)]
    return Graph.from_edges(n, base.edges() + tree)


# -- edge-list text format ---------------------------------------------------


def read_edge_list(text: str) -> Graph:
    """Parse ``"n e"`` followed by ``e`` lines ``"u v"``; ``#`` starts a comment."""
    header = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if header is None:
            if a < 0 or b < 0:
                raise ParseError("negative count in header", lineno)
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"vertex id out of range [0, {n})", lineno)
        if a == b:
            raise SelfLoop(f"line {lineno}: self-loop at vertex {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise DuplicateEdge(f"line {lineno}: edge {{{a},{b}}} listed twice")
        seen.add(key)
        edges.append(key)
    if header is None:
        raise ParseError("missing 'n e' header", 1)
    if len(edges) != header[1]:
        raise ParseError(f"header promises {header[1]} edges, found {len(edges)}", lineno)
    return Graph.from_edges(header[0], edges)


def write_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
