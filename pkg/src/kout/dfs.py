"""Depth-first search over a lazily revealed k-out subgraph, hunting for a long path.

Vertices are split into three groups that always partition V:

* ``S`` -- exhausted: the vertex has used its whole budget of ``k`` draws;
* ``U`` -- the stack: visited, budget left; consecutive entries are joined by
  revealed edges, so the stack is always a path;
* ``T`` -- not visited yet.

A *hit* is a draw that lands in ``T``.  When the stack empties a uniformly
random vertex of ``T`` is pushed (a restart); the very first root counts as a
restart, so ``|S| + |U| == hits + restarts`` holds throughout.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation
from .graph import Graph, floor_tol, min_degree
from .posa import PathState
from .sampler import ChoiceOracle, ColorSpec, Mode

TRACE_COLUMNS = ("step", "S", "U", "T", "h", "r")


@dataclass
class DfsRun:
    best_path: PathState
    hits: int
    restarts: int
    draws: int
    steps: int
    exhausted: set[int]
    stack: list[int]
    unvisited: set[int]
    tree_edges: list[tuple[int, int]]
    # discovery order of every visited vertex (roots and hits)
    discovered: list[int] = field(default_factory=list)
    trace: list[tuple[int, int, int, int, int, int]] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        return {
            "S": len(self.exhausted),
            "U": len(self.stack),
            "T": len(self.unvisited),
            "h": self.hits,
            "r": self.restarts,
            "draws": self.draws,
            "best_length": self.best_path.length,
        }

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        w.writerows(self.trace)
        return buf.getvalue()


def run_dfs(
    g: Graph,
    oracle: ChoiceOracle,
    color: int,
    budget: int,
    rng: np.random.Generator,
    restart: str = "random",
    stop_stack: int | None = None,
    check_invariants: bool = False,
    record_trace: bool = True,
) -> DfsRun:
    """Run the search until ``budget`` draws are spent, the stack reaches
    ``stop_stack`` vertices, or every vertex is exhausted."""
    if restart not in ("random", "lowest"):
        raise ValueError(f"unknown restart rule {restart!r}")
    n = g.n
    adj = g.adj
    k = oracle.spec.multiplicity(color)
    nbr_sets = g.neighbor_sets if check_invariants else None

    t_list = list(range(n))
    t_idx = list(range(n))  # position of v in t_list, -1 once removed

    def take(v: int) -> None:
        i = t_idx[v]
        last = t_list[-1]
        t_list[i] = last
        t_idx[last] = i
        t_list.pop()
        t_idx[v] = -1

    S: set[int] = set()
    U: list[int] = []
    tree_parent: dict[int, int] = {}
    tree_edges: list[tuple[int, int]] = []
    discovered: list[int] = []
    best: list[int] = []
    trace: list[tuple[int, int, int, int, int, int]] = []
    h = r = draws = steps = 0
    isolated_in_S = 0

    def fail(msg: str) -> None:
        raise InvariantViolation(f"step {steps}: {msg}")

    while draws < budget:
        if not U:
            if not t_list:
                break
            if restart == "random":
                v = t_list[int(rng.integers(len(t_list)))]
            else:
                v = min(t_list)
            take(v)
            U.append(v)
            discovered.append(v)
            r += 1
        else:
            u = U[-1]
            if not adj[u] or oracle.remaining(u, color) == 0:
                U.pop()
                S.add(u)
                if not adj[u]:
                    isolated_in_S += 1
                elif check_invariants and oracle.used(u, color) != k:
                    fail(f"vertex {u} exhausted after {oracle.used(u, color)} draws, expected {k}")
            else:
                w = oracle.draw(u, color)
                draws += 1
                if t_idx[w] >= 0:
                    take(w)
                    U.append(w)
                    tree_parent[w] = u
                    tree_edges.append((u, w))
                    discovered.append(w)
                    h += 1
        steps += 1
        if len(U) > len(best):
            best = list(U)
        if record_trace:
            trace.append((steps, len(S), len(U), len(t_list), h, r))
        if check_invariants:
            visited = len(S) + len(U)
            if visited + len(t_list) != n or len(set(U)) != len(U) or S.intersection(U):
                fail("S, U, T do not partition V")
            if visited < h:
                fail(f"|S u U| = {visited} < h = {h}")
            if visited != h + r:
                fail(f"|S u U| = {visited} != h + r = {h + r}")
            for a, b in zip(U, U[1:]):
                if tree_parent.get(b) != a or a not in nbr_sets[b]:
                    fail(f"stack entries {a}, {b} are not joined by a revealed edge")
            if (len(S) - isolated_in_S) * k > draws:
                fail(f"|S| = {len(S)} exceeds draws / k = {draws}/{k}")
        if stop_stack is not None and len(U) >= stop_stack:
            break

    return DfsRun(
        best_path=PathState(tuple(best)),
        hits=h,
        restarts=r,
        draws=draws,
        steps=steps,
        exhausted=S,
        stack=U,
        unvisited=set(t_list),
        tree_edges=tree_edges,
        discovered=discovered,
        trace=trace,
    )


def dfs_long_path(
    g: Graph,
    k: int,
    budget: int,
    rng: np.random.Generator,
    restart: str = "random",
    check_invariants: bool = False,
    record_trace: bool = True,
) -> DfsRun:
    """DFS on G(k-out) with choices revealed one draw at a time (with replacement)."""
    if k < 1 or budget < 0:
        raise ValueError("need k >= 1 and a non-negative budget")
    oracle = ChoiceOracle(g, ColorSpec.single(k), Mode.WITH_REPLACEMENT, rng=rng)
    return run_dfs(
        g, oracle, 0, budget, rng,
        restart=restart, check_invariants=check_invariants, record_trace=record_trace,
    )


@dataclass
class LongPathTrial:
    achieved: int
    target: float
    success: bool
    m: int
    k: int
    eps: float
    budget: int
    guaranteed_k: int

    def to_metrics(self) -> dict:
        return {
            "achieved": self.achieved,
            "target": self.target,
            "success": int(self.success),
            "m": self.m,
            "budget": self.budget,
            "k_at_least_guarantee": int(self.k >= self.guaranteed_k),
        }


def long_path_trial(
    g: Graph, k: int, eps: float, rng: np.random.Generator, m: int | None = None
) -> LongPathTrial:
    """Spend ``floor(eps k m)`` draws and compare the longest stack path with ``(1 - 2 eps) m``.

    ``m`` defaults to the host's minimum degree; a smaller lower bound may be passed.
    """
    if m is None:
        m = min_degree(g)
    budget = floor_tol(eps * k * m)
    target = (1 - 2 * eps) * m
    run = dfs_long_path(g, k, budget, rng, record_trace=False)
    achieved = run.best_path.length
    return LongPathTrial(
        achieved=achieved,
        target=target,
        success=achieved >= target - 1e-9,
        m=m,
        k=k,
        eps=eps,
        budget=budget,
        guaranteed_k=math.ceil(2 / eps**2 - 1e-9),
    )
