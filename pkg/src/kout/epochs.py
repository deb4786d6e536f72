"""Epoch-indexed, four-colored exploration that looks for a long cycle.

Epochs carry binary ids.  The root epoch ``"0"`` is a plain DFS on the
light-red color; every successful epoch hands its last discovered vertices to
two children ``id + "0"`` and ``id + "1"``.  Newly discovered vertices are
classified as

* ``A`` -- fewer than ``(1 - 2 eps) d(v)`` host neighbors already in the tree;
* ``C`` -- otherwise, at least ``eps d(v)`` host neighbors at tree distance
  ``>= (1 - 19 eps) m``;
* ``B`` -- the remaining case.

Only ``A`` vertices extend the search.  Once an epoch collects ``eps m``
vertices of class ``B`` or ``C`` the exploration stops and a cycle is closed
from that class.

Cardinalities scaled by ``eps`` round down (but are at least 1); success
thresholds round up.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .dfs import run_dfs
from .errors import BadId, MissingLineage
from .graph import Graph, ceil_tol, floor_tol, min_degree
from .posa import validate_cycle
from .sampler import (
    DARK_BLUE,
    DARK_RED,
    FOUR_COLOR_NAMES,
    LIGHT_BLUE,
    LIGHT_RED,
    ChoiceOracle,
    ColorSpec,
    Mode,
)


class ExplorationTree:
    """Rooted forest grown in discovery order, with ancestor tables for distance queries."""

    def __init__(self) -> None:
        self.parent: dict[int, int | None] = {}
        self.depth: dict[int, int] = {}
        self.root: dict[int, int] = {}
        self.members: list[int] = []
        self.order: dict[int, int] = {}  # discovery index
        self._up: dict[int, list[int]] = {}

    def __contains__(self, v: int) -> bool:
        return v in self.parent

    def __len__(self) -> int:
        return len(self.members)

    def add_root(self, v: int) -> None:
        self._attach(v, None)

    def attach(self, v: int, parent: int) -> None:
        if parent not in self.parent:
            raise KeyError(f"parent {parent} is not in the tree")
        self._attach(v, parent)

    def _attach(self, v: int, parent: int | None) -> None:
        if v in self.parent:
            raise ValueError(f"vertex {v} is already in the tree")
        self.parent[v] = parent
        self.order[v] = len(self.members)
        self.members.append(v)
        if parent is None:
            self.depth[v] = 0
            self.root[v] = v
            self._up[v] = [v]
            return
        self.depth[v] = self.depth[parent] + 1
        self.root[v] = self.root[parent]
        up = [parent]
        j = 0
        while j < len(self._up[up[j]]):
            up.append(self._up[up[j]][j])
            j += 1
        self._up[v] = up

    def ancestor(self, v: int, depth: int) -> int:
        """The ancestor of ``v`` at the given depth (``0 <= depth <= depth(v)``)."""
        if not 0 <= depth <= self.depth[v]:
            raise ValueError("depth outside the root path")
        lift = self.depth[v] - depth
        j = 0
        while lift:
            if lift & 1:
                v = self._up[v][j]
            lift >>= 1
            j += 1
        return v

    def lca(self, u: int, w: int) -> int | None:
        if self.root[u] != self.root[w]:
            return None
        if self.depth[u] < self.depth[w]:
            u, w = w, u
        u = self.ancestor(u, self.depth[w])
        if u == w:
            return u
        for j in range(len(self._up[u]) - 1, -1, -1):
            if j < len(self._up[u]) and j < len(self._up[w]) and self._up[u][j] != self._up[w][j]:
                u = self._up[u][j]
                w = self._up[w][j]
        return self.parent[u]

    def distance(self, u: int, w: int) -> int | None:
        """Edges on the tree path from ``u`` to ``w``; ``None`` across different trees."""
        a = self.lca(u, w)
        if a is None:
            return None
        return self.depth[u] + self.depth[w] - 2 * self.depth[a]

    def path(self, u: int, w: int) -> list[int] | None:
        a = self.lca(u, w)
        if a is None:
            return None
        left = [u]
        while left[-1] != a:
            left.append(self.parent[left[-1]])
        right = [w]
        while right[-1] != a:
            right.append(self.parent[right[-1]])
        return left + right[-2::-1]

    def edges(self) -> list[tuple[int, int]]:
        return [(p, v) for v, p in self.parent.items() if p is not None]


def epoch_color(epoch_id: str) -> int:
    """Light red for odd length ending in 0, dark red for even/0, light blue odd/1, dark blue even/1."""
    if not epoch_id or any(ch not in "01" for ch in epoch_id):
        raise BadId(f"epoch id must be a nonempty binary string, got {epoch_id!r}")
    odd = len(epoch_id) % 2 == 1
    if epoch_id[-1] == "0":
        return LIGHT_RED if odd else DARK_RED
    return LIGHT_BLUE if odd else DARK_BLUE


class VertexClass(str, Enum):
    A = "A"
    B = "B"
    C = "C"


def far_threshold(eps: float, m: int) -> float:
    return (1 - 19 * eps) * m


def classify(g: Graph, tree: ExplorationTree, v: int, eps: float, m: int) -> VertexClass:
    d = len(g.adj[v])
    in_tree = [w for w in g.adj[v] if w in tree]
    if len(in_tree) < (1 - 2 * eps) * d:
        return VertexClass.A
    reach = far_threshold(eps, m)
    far = 0
    for w in in_tree:
        dist = tree.distance(v, w)
        if dist is not None and dist >= reach:
            far += 1
    return VertexClass.C if far >= eps * d else VertexClass.B


class Outcome(str, Enum):
    PENDING = "pending"
    SUCCESS = "success"
    FAIL = "fail"
    INTERRUPT_B = "interrupt_b"
    INTERRUPT_C = "interrupt_c"


@dataclass
class Epoch:
    id: str
    color: int
    seeds: list[int]
    A: list[int] = field(default_factory=list)
    B: list[int] = field(default_factory=list)
    C: list[int] = field(default_factory=list)
    stack: list[int] = field(default_factory=list)
    path: list[int] = field(default_factory=list)  # longest stack snapshot
    discovered: list[int] = field(default_factory=list)  # new vertices only
    steps_used: int = 0
    outcome: Outcome = Outcome.PENDING
    r_size: int | None = None
    r_bound_ok: bool | None = None

    @property
    def color_name(self) -> str:
        return FOUR_COLOR_NAMES[self.color]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "color": self.color_name,
            "A": len(self.A),
            "B": len(self.B),
            "C": len(self.C),
            "steps": self.steps_used,
            "outcome": self.outcome.value,
        }


@dataclass(frozen=True)
class Scale:
    """The eps-scaled sizes used by the exploration."""

    eps: float
    k: int
    m: int

    @property
    def budget(self) -> int:
        return floor_tol(self.eps * self.k * self.m)

    @property
    def success(self) -> int:
        return ceil_tol((1 - 2 * self.eps) * self.m)

    @property
    def interrupt(self) -> int:
        return max(1, floor_tol(self.eps * self.m))

    @property
    def seeds(self) -> int:
        return max(1, floor_tol(3 * self.eps * self.m))

    @property
    def r_limit(self) -> float:
        return 3 * self.eps * self.m

    @property
    def target(self) -> float:
        return far_threshold(self.eps, self.m)


def _check_interrupt(ep: Epoch, sc: Scale) -> bool:
    if len(ep.C) >= sc.interrupt:
        ep.outcome = Outcome.INTERRUPT_C
        return True
    if len(ep.B) >= sc.interrupt:
        ep.outcome = Outcome.INTERRUPT_B
        return True
    return False


def _close_epoch(ep: Epoch, sc: Scale) -> None:
    on_path = set(ep.path)
    ep.r_size = sum(1 for v in ep.discovered if v not in on_path)
    ep.r_bound_ok = ep.r_size < sc.r_limit


def run_epoch(
    g: Graph,
    tree: ExplorationTree,
    oracle: ChoiceOracle,
    epoch_id: str,
    seeds: Sequence[int],
    eps: float,
    k: int,
    m: int,
) -> Epoch:
    """Run one non-root epoch from ``seeds`` (already in the tree) on its own color."""
    sc = Scale(eps, k, m)
    ep = Epoch(epoch_id, epoch_color(epoch_id), list(seeds))
    color = ep.color
    for v in ep.seeds:
        cls = classify(g, tree, v, eps, m)
        getattr(ep, cls.value).append(v)
        if cls is VertexClass.A:
            ep.stack.append(v)
        if _check_interrupt(ep, sc):
            return ep
    ep.path = list(ep.stack)
    if len(ep.A) >= sc.success:
        ep.outcome = Outcome.SUCCESS
        _close_epoch(ep, sc)
        return ep
    while ep.stack and ep.steps_used < sc.budget:
        u = ep.stack[-1]
        if oracle.remaining(u, color) == 0:
            ep.stack.pop()
            continue
        w = oracle.draw(u, color)
        ep.steps_used += 1
        if w in tree:
            continue
        tree.attach(w, u)
        ep.discovered.append(w)
        cls = classify(g, tree, w, eps, m)
        getattr(ep, cls.value).append(w)
        if cls is VertexClass.A:
            ep.stack.append(w)
            if len(ep.stack) > len(ep.path):
                ep.path = list(ep.stack)
        if _check_interrupt(ep, sc):
            return ep
        if cls is VertexClass.A and len(ep.A) >= sc.success:
            ep.outcome = Outcome.SUCCESS
            _close_epoch(ep, sc)
            return ep
    ep.outcome = Outcome.FAIL
    return ep


# -- closures ----------------------------------------------------------------


class Provenance(str, Enum):
    FROM_C = "from_c"
    FROM_B = "from_b"
    NONE = "none"


@dataclass
class CycleResult:
    cycle: tuple[int, ...] | None
    target: float
    provenance: Provenance = Provenance.NONE
    epochs: list[Epoch] = field(default_factory=list)
    interrupt: str | None = None
    notes: list[str] = field(default_factory=list)
    revealed: set[tuple[int, int]] = field(default_factory=set, repr=False)

    @property
    def length(self) -> int:
        return len(self.cycle) if self.cycle else 0

    @property
    def success(self) -> bool:
        return self.cycle is not None and self.length >= self.target - 1e-9

    @property
    def r_bound_ok(self) -> bool:
        return all(ep.r_bound_ok for ep in self.epochs if ep.outcome is Outcome.SUCCESS)

    def trace_jsonl(self) -> str:
        return "".join(json.dumps(ep.to_json(), sort_keys=True) + "\n" for ep in self.epochs)


def cycle_is_revealed(
    h: Graph, oracle: ChoiceOracle, cycle: Sequence[int], revealed: set | None = None
) -> bool:
    """Simple, uses host edges only, and every edge was drawn by the oracle."""
    if not validate_cycle(h, cycle):
        return False
    if revealed is None:
        revealed = oracle.revealed_edges()
    return all(
        (min(cycle[i - 1], cycle[i]), max(cycle[i - 1], cycle[i])) in revealed
        for i in range(len(cycle))
    )


def _spend(oracle: ChoiceOracle, v: int, color: int) -> list[int]:
    got = []
    while oracle.remaining(v, color) > 0:
        got.append(oracle.draw(v, color))
    return got


def close_from_C(
    g: Graph,
    tree: ExplorationTree,
    C_set: Iterable[int],
    color: int,
    oracle: ChoiceOracle,
    eps: float,
    m: int,
) -> tuple[int, ...] | None:
    """Each vertex spends its draws of ``color``; a draw landing far up its own tree closes a cycle.

    Returns the longest such cycle, or ``None``.
    """
    reach = far_threshold(eps, m)
    best: tuple[int, ...] | None = None
    for v in C_set:
        for w in _spend(oracle, v, color):
            if w not in tree:
                continue
            dist = tree.distance(v, w)
            if dist is None or dist < reach or dist < 2:
                continue
            cyc = tuple(tree.path(v, w))
            if not cycle_is_revealed(g, oracle, cyc):
                raise AssertionError("C-closure built an invalid cycle")
            if best is None or len(cyc) > len(best):
                best = cyc
    return best


# best-scoring (v1, v2, v3) picks remembered per good vertex
TRIPLES_KEPT = 4


@dataclass
class BClosureStats:
    W: int = 0
    good: int = 0
    short_neighborhoods: int = 0
    candidates: int = 0


def _pick_W(tree: ExplorationTree, B_set: Sequence[int], eps: float, m: int) -> list[int]:
    seg = max(1, math.ceil(eps * m / 2 - 1e-9))
    buckets: dict[int, list[int]] = {}
    for v in B_set:
        d = tree.depth[v]
        buckets.setdefault(tree.ancestor(v, seg * (d // seg)), []).append(v)
    if not buckets:
        return []
    largest = max(buckets.values(), key=lambda b: (len(b), -tree.order[b[0]]))
    return largest[: max(1, math.ceil(eps * eps * m - 1e-9))]


def _dist_to_set(tree: ExplorationTree, v: int, S: Iterable[int]) -> tuple[int, int] | None:
    """(distance, vertex) to the nearest member of S in v's tree, lowest id on ties."""
    best = None
    for s in S:
        d = tree.distance(v, s)
        if d is not None and (best is None or (d, s) < best):
            best = (d, s)
    return best


def close_from_B(
    g: Graph,
    tree: ExplorationTree,
    epoch: Epoch,
    lineage: dict[str, Epoch],
    oracle: ChoiceOracle,
    eps: float,
    m: int,
    stats: BClosureStats | None = None,
) -> tuple[int, ...] | None:
    """Close a cycle through two "good" B vertices using their parent and sibling epochs' paths."""
    if not epoch.id.endswith("1") or len(epoch.id) < 2:
        raise MissingLineage(f"B-closure needs an epoch id of the form x1, got {epoch.id!r}")
    parent_id = epoch.id[:-1]
    sibling_id = parent_id + "0"
    if parent_id not in lineage or sibling_id not in lineage:
        raise MissingLineage(f"epochs {parent_id!r} and {sibling_id!r} must both have run")
    stats = stats if stats is not None else BClosureStats()
    P1 = lineage[parent_id].path
    P2 = lineage[sibling_id].path
    seeds = set(epoch.seeds)
    color = epoch.color
    q = max(1, floor_tol(eps * m))
    need = (1 - 17 * eps) * m
    by_order = tree.order.__getitem__

    W = _pick_W(tree, epoch.B, eps, m)
    stats.W = len(W)
    good: list[tuple[int, int, int, int, int]] = []  # (v, v1, v2, v3, rho)
    for v in W:
        drawn = _spend(oracle, v, color)
        nb = g.neighbor_sets[v]
        on1 = sorted((x for x in P1 if x in nb and x not in seeds), key=by_order)
        on2 = sorted((x for x in P2 if x in nb and x not in seeds), key=by_order)
        if len(on1) < 2 * q or len(on2) < 2 * q:
            stats.short_neighborhoods += 1
            continue
        V1, V2, V3 = set(on1[:q]), set(on1[-q:]), set(on2[-q:])
        nearest = _dist_to_set(tree, v, epoch.seeds)
        if nearest is None:
            continue
        d_rho, rho = nearest
        picks1 = [x for x in drawn if x in V1]
        picks2 = [x for x in drawn if x in V2]
        picks3 = [x for x in drawn if x in V3]
        n3 = {x: _dist_to_set(tree, x, epoch.seeds) for x in picks3}
        scored = []
        for v1 in picks1:
            for v2 in picks2:
                d12 = tree.distance(v1, v2)
                if d12 is None:
                    continue
                for v3 in picks3:
                    if n3[v3] is not None and d12 + n3[v3][0] + d_rho >= need:
                        scored.append((-(d12 + n3[v3][0] + d_rho), v1, v2, v3))
        scored.sort()
        good.extend((v, v1, v2, v3, rho) for _, v1, v2, v3 in scored[:TRIPLES_KEPT])
    stats.good = len({x[0] for x in good})

    revealed = oracle.revealed_edges()
    best: tuple[int, ...] | None = None
    for gu in good:
        for gv in good:
            if gu[0] == gv[0]:
                continue
            cyc = _compose(tree, gu, gv)
            if cyc is None:
                continue
            stats.candidates += 1
            if cycle_is_revealed(g, oracle, cyc, revealed) and (best is None or len(cyc) > len(best)):
                best = cyc
    return best


def _compose(tree: ExplorationTree, gu: tuple, gv: tuple) -> tuple[int, ...] | None:
    """Walk u, u1 .. v2, v, v3 .. rho_u .. u; ``None`` unless it is a simple closed walk."""
    u, u1, _, _, rho_u = gu
    v, _, v2, v3, _ = gv
    a = tree.path(u1, v2)
    b = tree.path(v3, rho_u)
    c = tree.path(rho_u, u)
    if a is None or b is None or c is None:
        return None
    tail = b + c[1:]  # ends at u
    walk = [u] + a + [v] + tail[:-1]
    if len(walk) < 3 or len(set(walk)) != len(walk):
        return None
    return tuple(walk)


# -- driver ------------------------------------------------------------------


def _schedule_key(epoch_id: str) -> tuple[int, int]:
    return int(epoch_id, 2), len(epoch_id)


def long_cycle(
    g: Graph,
    k: int,
    eps: float,
    rng: np.random.Generator,
    m: int | None = None,
    max_epochs: int = 10_000,
) -> CycleResult:
    """Grow epochs until one is interrupted, then close a cycle from its B or C vertices."""
    if m is None:
        m = min_degree(g)
    sc = Scale(eps, k, m)
    oracle = ChoiceOracle(g, ColorSpec.four(k), Mode.WITH_REPLACEMENT, rng=rng)
    tree = ExplorationTree()
    result = CycleResult(cycle=None, target=sc.target)

    run = run_dfs(
        g, oracle, LIGHT_RED, sc.budget, rng, stop_stack=sc.success, record_trace=False
    )
    parent_of = {w: u for u, w in run.tree_edges}
    for v in run.discovered:
        if v in parent_of:
            tree.attach(v, parent_of[v])
        else:
            tree.add_root(v)
    root = Epoch("0", LIGHT_RED, [], A=list(run.best_path.order), path=list(run.best_path.order))
    root.discovered = list(run.discovered)
    root.steps_used = run.draws
    root.stack = list(run.stack)
    root.outcome = Outcome.SUCCESS if len(run.best_path.order) >= sc.success else Outcome.FAIL
    if root.outcome is Outcome.SUCCESS:
        _close_epoch(root, sc)
    result.epochs.append(root)
    lineage = {"0": root}

    queue: list[tuple[tuple[int, int], str, list[int]]] = []

    def spawn(ep: Epoch, pool: list[int]) -> None:
        seeds = pool[-sc.seeds :]
        for child in (ep.id + "0", ep.id + "1"):
            heapq.heappush(queue, (_schedule_key(child), child, seeds))

    if root.outcome is Outcome.SUCCESS:
        spawn(root, root.discovered)

    interrupted: Epoch | None = None
    while queue and len(result.epochs) < max_epochs:
        _, eid, seeds = heapq.heappop(queue)
        ep = run_epoch(g, tree, oracle, eid, seeds, eps, k, m)
        result.epochs.append(ep)
        lineage[eid] = ep
        if ep.outcome is Outcome.SUCCESS:
            spawn(ep, ep.seeds + ep.discovered)
        elif ep.outcome in (Outcome.INTERRUPT_B, Outcome.INTERRUPT_C):
            interrupted = ep
            break

    if interrupted is not None:
        result.interrupt = interrupted.id
        if interrupted.outcome is Outcome.INTERRUPT_C:
            cyc = close_from_C(g, tree, interrupted.C, interrupted.color, oracle, eps, m)
            if cyc is not None:
                result.cycle, result.provenance = cyc, Provenance.FROM_C
        else:
            try:
                cyc = close_from_B(g, tree, interrupted, lineage, oracle, eps, m)
            except MissingLineage as exc:
                result.notes.append(str(exc))
                cyc = None
            if cyc is not None:
                result.cycle, result.provenance = cyc, Provenance.FROM_B

    if result.cycle is None:
        # no interrupt, or the closure came up empty: try every C vertex seen so far
        best = None
        for ep in result.epochs:
            if ep.C:
                cyc = close_from_C(g, tree, ep.C, ep.color, oracle, eps, m)
                if cyc is not None and (best is None or len(cyc) > len(best)):
                    best = cyc
        if best is not None:
            result.cycle, result.provenance = best, Provenance.FROM_C

    if result.cycle is not None and not cycle_is_revealed(g, oracle, result.cycle):
        raise AssertionError("long_cycle produced an invalid cycle")
    result.revealed = oracle.revealed_edges()
    return result
