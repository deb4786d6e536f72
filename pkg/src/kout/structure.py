"""Connectivity certification and the combinatorial audits run on sampled subgraphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.sparse.csgraph import maximum_flow

from .errors import RetriesExhausted, TooLargeForExhaustive
from .graph import Graph, floor_tol, min_degree
from .sampler import KOutSample

EXHAUSTIVE_LIMIT = 10**6


@dataclass(frozen=True)
class ComponentPartition:
    labels: tuple[int, ...]
    sizes: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.sizes)

    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.sizes]
        for v, c in enumerate(self.labels):
            out[c].append(v)
        return out


def _adjacency_matrix(g: Graph) -> csr_matrix:
    offsets, targets = g.csr
    data = np.ones(len(targets), dtype=np.int8)
    return csr_matrix((data, targets, offsets), shape=(g.n, g.n))


def connected_components(g: Graph) -> ComponentPartition:
    """Component labels numbered in order of each component's smallest vertex."""
    if g.n == 0:
        return ComponentPartition((), ())
    _, raw = _cc(_adjacency_matrix(g), directed=False)
    relabel: dict[int, int] = {}
    labels = []
    for r in raw.tolist():
        if r not in relabel:
            relabel[r] = len(relabel)
        labels.append(relabel[r])
    sizes = [0] * len(relabel)
    for c in labels:
        sizes[c] += 1
    return ComponentPartition(tuple(labels), tuple(sizes))


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or connected_components(g).count == 1


def isolated_vertices(g: Graph) -> set[int]:
    return {v for v, row in enumerate(g.adj) if not row}


# -- vertex connectivity -----------------------------------------------------


class _SplitNetwork:
    """Each vertex v becomes ``2v -> 2v+1`` with capacity 1; edges get capacity n in both directions."""

    def __init__(self, g: Graph) -> None:
        n = g.n
        rows, cols, caps = [], [], []
        for v in range(n):
            rows.append(2 * v)
            cols.append(2 * v + 1)
            caps.append(1)
        for u, w in g.edges():
            rows += [2 * u + 1, 2 * w + 1]
            cols += [2 * w, 2 * u]
            caps += [n, n]
        self.matrix = csr_matrix(
            (np.array(caps, dtype=np.int32), (rows, cols)), shape=(2 * n, 2 * n)
        )

    def local(self, s: int, t: int) -> int:
        """Maximum number of internally vertex-disjoint s-t paths (s, t non-adjacent)."""
        return int(maximum_flow(self.matrix, 2 * s + 1, 2 * t, method="dinic").flow_value)


def local_connectivity(g: Graph, s: int, t: int) -> int:
    if g.has_edge(s, t) or s == t:
        raise ValueError("local connectivity is defined here for distinct non-adjacent vertices")
    return _SplitNetwork(g).local(s, t)


def vertex_connectivity(g: Graph) -> int:
    """Menger vertex connectivity via unit vertex capacities (Even's source sweep).

    Sources v_0, v_1, ... are swept while the index does not exceed the best
    cut found so far; every non-adjacent later vertex is a sink.  Complete
    graphs return ``n - 1``.
    """
    n = g.n
    if n <= 1:
        return 0
    if g.m == n * (n - 1) // 2:
        return n - 1
    net = _SplitNetwork(g)
    best = min_degree(g)
    nbrs = g.neighbor_sets
    i = 0
    while i <= best and i < n:
        for j in range(i + 1, n):
            if j not in nbrs[i]:
                best = min(best, net.local(i, j))
                if best == 0:
                    return 0
        i += 1
    return best


def is_k_connected(g: Graph, k: int) -> bool:
    """True iff removing any ``k - 1`` vertices leaves a connected graph (and n >= k + 1)."""
    n = g.n
    if k <= 0:
        return True
    if n < k + 1:
        raise ValueError(f"k-connectivity needs n >= k + 1 (n={n}, k={k})")
    if min_degree(g) < k or not is_connected(g):
        return False
    if k == 1:
        return True
    net = _SplitNetwork(g)
    nbrs = g.neighbor_sets
    # a separator of size < k misses one of the first k vertices
    for i in range(k):
        for j in range(i + 1, n):
            if j not in nbrs[i] and net.local(i, j) < k:
                return False
    return True


def vertex_connectivity_exhaustive(g: Graph) -> int:
    """Smallest vertex set whose removal disconnects ``g``, by enumeration; ``n - 1`` if none."""
    n = g.n
    if n > 12:
        raise TooLargeForExhaustive(f"exhaustive cut search is limited to n <= 12, got {n}")
    if n <= 1:
        return 0
    for size in range(0, n - 1):
        for cut in combinations(range(n), size):
            removed = set(cut)
            rest = [v for v in range(n) if v not in removed]
            if not _reachable_all(g, rest, removed):
                return size
    return n - 1


def _reachable_all(g: Graph, rest: list[int], removed: set[int]) -> bool:
    seen = {rest[0]}
    stack = [rest[0]]
    while stack:
        v = stack.pop()
        for w in g.adj[v]:
            if w not in removed and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(rest)


# -- common-neighbor cover ---------------------------------------------------


def _pair_shortfall(g: Graph, L: set[int], threshold: int) -> int:
    """Pairs outside L with fewer than ``threshold`` common neighbors inside L."""
    n = g.n
    outside = np.array([v for v in range(n) if v not in L], dtype=np.int64)
    if len(outside) < 2:
        return 0
    cols = np.array(sorted(L), dtype=np.int64)
    if len(cols) == 0:
        return len(outside) * (len(outside) - 1) // 2 if threshold > 0 else 0
    A = _adjacency_matrix(g)
    B = A[outside][:, cols].astype(np.int32).toarray()
    counts = B @ B.T
    iu = np.triu_indices(len(outside), k=1)
    return int((counts[iu] < threshold).sum())


def _pair_shortfall_direct(g: Graph, L: set[int], threshold: int) -> int:
    masks = []
    for v in range(g.n):
        if v in L:
            continue
        bits = 0
        for w in g.adj[v]:
            if w in L:
                bits |= 1 << w
        masks.append(bits)
    bad = 0
    for i in range(len(masks)):
        mi = masks[i]
        for j in range(i + 1, len(masks)):
            if bin(mi & masks[j]).count("1") < threshold:
                bad += 1
    return bad


def common_neighbor_cover(
    g: Graph, pair_threshold: int, p: float, max_retries: int, rng: np.random.Generator
) -> set[int]:
    """Random set L (each vertex kept with probability p) such that every pair outside L
    has at least ``pair_threshold`` common neighbors in L.  Retries up to ``max_retries`` times."""
    best = None
    for _ in range(max(1, max_retries)):
        L = set(np.flatnonzero(rng.random(g.n) < p).tolist())
        short = _pair_shortfall(g, L, pair_threshold)
        if short == 0:
            if _pair_shortfall_direct(g, L, pair_threshold) != 0:
                raise AssertionError("cover failed its direct recount")
            return L
        best = short if best is None else min(best, short)
    raise RetriesExhausted(max(1, max_retries), best if best is not None else -1)


def default_cover_probability(n: int, eps: float, scale: float = 12.0) -> float:
    """``C log n / n`` with ``C = scale / eps``; clipped to 1."""
    return min(1.0, (scale / eps) * math.log(n) / n)


# -- audits ------------------------------------------------------------------


@dataclass
class AuditReport:
    k: int
    c: float
    min_size: float
    checked: int
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "c": self.c,
            "min_size": self.min_size,
            "checked": self.checked,
            "violations": self.violations,
        }


def _removal_sets(pool: list[int], size: int, mode: str, trials: int, rng) -> Iterable[tuple[int, ...]]:
    if mode == "exhaustive":
        if math.comb(len(pool), size) > EXHAUSTIVE_LIMIT:
            raise TooLargeForExhaustive(
                f"C({len(pool)}, {size}) removal sets exceed {EXHAUSTIVE_LIMIT}"
            )
        yield from combinations(pool, size)
    else:
        for _ in range(trials):
            pick = rng.choice(len(pool), size=size, replace=False) if size else []
            yield tuple(sorted(pool[i] for i in pick))


def small_component_audit(
    gk: Graph,
    L: Iterable[int],
    k: int,
    c: float,
    mode: str = "exhaustive",
    rng: np.random.Generator | None = None,
    trials: int = 0,
) -> AuditReport:
    """Remove every (or ``trials`` random) ``k-1``-sets A from V minus L and check that each
    component of what is left of V minus L is a single vertex or has at least ``c * n`` vertices."""
    n = gk.n
    L = set(L)
    pool = [v for v in range(n) if v not in L]
    size = max(0, k - 1)
    if mode not in ("exhaustive", "randomized"):
        raise ValueError(f"unknown audit mode {mode!r}")
    if mode == "randomized" and rng is None:
        raise ValueError("randomized audit needs an rng")
    A = _adjacency_matrix(gk)
    floor = c * n
    report = AuditReport(k=k, c=c, min_size=floor, checked=0)
    for removal in _removal_sets(pool, size, mode, trials, rng):
        gone = set(removal)
        keep = np.array([v for v in pool if v not in gone], dtype=np.int64)
        report.checked += 1
        if len(keep) == 0:
            continue
        _, labels = _cc(A[keep][:, keep], directed=False)
        sizes = np.bincount(labels)
        bad = sorted(int(s) for s in sizes if 1 < s < floor)
        if bad:
            report.violations.append({"removed": sorted(gone), "small_components": bad})
    return report


@dataclass
class ExpansionReport:
    alpha: float
    factor: float
    checked: int
    violations: int
    witness: list[int] | None

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "factor": self.factor,
            "checked": self.checked,
            "violations": self.violations,
            "witness": self.witness,
        }


def expansion_check(
    s: KOutSample,
    alpha: float,
    factor: float,
    mode: str = "exhaustive",
    rng: np.random.Generator | None = None,
    trials: int = 0,
    color_filter: Iterable[int] | None = None,
) -> ExpansionReport:
    """Look for S with ``|S| <= alpha n`` and fewer than ``factor |S|`` out-neighbors outside S.

    The witness is the first violator met (smallest size, then lexicographic in
    exhaustive mode); ``violations`` counts every violating set checked.
    """
    n = s.n
    top = floor_tol(alpha * n)
    masks = []
    for v in range(n):
        bits = 0
        for w in s.out_choices(v, color_filter):
            bits |= 1 << w
        masks.append(bits)

    if mode == "exhaustive":
        total = sum(math.comb(n, l) for l in range(1, top + 1))
        if total > EXHAUSTIVE_LIMIT:
            raise TooLargeForExhaustive(f"{total} subsets exceed {EXHAUSTIVE_LIMIT}")
        sets: Iterable[tuple[int, ...]] = (
            S for l in range(1, top + 1) for S in combinations(range(n), l)
        )
    elif mode == "randomized":
        if rng is None:
            raise ValueError("randomized expansion check needs an rng")
        sets = (
            tuple(sorted(rng.choice(n, size=int(rng.integers(1, top + 1)), replace=False).tolist()))
            for _ in range(trials if top >= 1 else 0)
        )
    else:
        raise ValueError(f"unknown expansion mode {mode!r}")

    checked = violations = 0
    witness = None
    for S in sets:
        checked += 1
        smask = 0
        union = 0
        for v in S:
            smask |= 1 << v
            union |= masks[v]
        out = bin(union & ~smask).count("1")
        if out < factor * len(S):
            violations += 1
            if witness is None:
                witness = list(S)
    return ExpansionReport(alpha, factor, checked, violations, witness)
