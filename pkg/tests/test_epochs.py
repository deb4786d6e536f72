from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kout.epochs import (
    Epoch,
    ExplorationTree,
    Outcome,
    Scale,
    VertexClass,
    classify,
    close_from_B,
    close_from_C,
    cycle_is_revealed,
    epoch_color,
    long_cycle,
    run_epoch,
)
from kout.errors import BadId, MissingLineage
from kout.graph import Graph, complete_graph, path_graph, random_min_degree_host
from kout.posa import validate_cycle
from kout.sampler import DARK_BLUE, DARK_RED, LIGHT_BLUE, LIGHT_RED, ChoiceOracle, ColorSpec, Mode


def path_tree(n: int) -> ExplorationTree:
    t = ExplorationTree()
    t.add_root(0)
    for v in range(1, n):
        t.attach(v, v - 1)
    return t


def test_epoch_colors():
    assert epoch_color("0") == LIGHT_RED
    assert epoch_color("010") == LIGHT_RED
    assert epoch_color("01") == DARK_BLUE
    assert epoch_color("00") == DARK_RED
    assert epoch_color("1") == LIGHT_BLUE
    for bad in ("", "012", "a"):
        with pytest.raises(BadId):
            epoch_color(bad)


@st.composite
def random_forest(draw):
    n = draw(st.integers(1, 40))
    parents = [None] + [draw(st.one_of(st.none(), st.integers(0, v - 1))) for v in range(1, n)]
    t = ExplorationTree()
    for v, p in enumerate(parents):
        if p is None:
            t.add_root(v)
        else:
            t.attach(v, p)
    return t, parents


def tree_bfs(parents, s):
    adj = {v: set() for v in range(len(parents))}
    for v, p in enumerate(parents):
        if p is not None:
            adj[v].add(p)
            adj[p].add(v)
    dist = {s: 0}
    q = deque([s])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


@given(random_forest())
def test_tree_distances_match_bfs(data):
    t, parents = data
    n = len(parents)
    for u in range(n):
        ref = tree_bfs(parents, u)
        for w in range(n):
            d = t.distance(u, w)
            assert d == ref.get(w)
            assert d == t.distance(w, u)
            if d is not None:
                p = t.path(u, w)
                assert p[0] == u and p[-1] == w and len(p) == d + 1
                for x in p:
                    assert t.distance(u, x) + t.distance(x, w) == d


def test_tree_ancestor_and_errors():
    t = path_tree(10)
    assert t.ancestor(9, 3) == 3 and t.ancestor(9, 9) == 9
    with pytest.raises(ValueError):
        t.ancestor(2, 5)
    with pytest.raises(ValueError):
        t.add_root(4)
    with pytest.raises(KeyError):
        t.attach(20, 15)
    assert t.edges()[0] == (0, 1)


def test_classify_fresh_vertex_is_A():
    g = complete_graph(10)
    t = ExplorationTree()
    t.add_root(0)
    t.attach(1, 0)
    assert classify(g, t, 1, 0.05, 9) is VertexClass.A


def test_classify_B_and_C():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    t = path_tree(5)
    # far reach (1 - 19 eps) m: 2.4 with eps=0.04, m=10; 81 with eps=0.01, m=100
    assert classify(g, t, 4, 0.04, 10) is VertexClass.C
    assert classify(g, t, 4, 0.01, 100) is VertexClass.B


def test_classify_cross_tree_neighbors_are_not_far():
    # vertex 2 is a root whose only neighbor lives in the other tree
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    t = ExplorationTree()
    t.add_root(0)
    t.attach(1, 0)
    t.add_root(2)
    assert classify(g, t, 2, 0.04, 1) is VertexClass.B


def test_run_epoch_immediate_c_interrupt():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    t = path_tree(5)
    o = ChoiceOracle(g, ColorSpec.four(2), seed=0)
    ep = run_epoch(g, t, o, "01", [4], 0.04, 2, 10)
    assert ep.outcome is Outcome.INTERRUPT_C and ep.steps_used == 0 and ep.C == [4]
    assert o.log == []


def test_run_epoch_fails_with_empty_A():
    g = complete_graph(5)
    t = path_tree(5)
    o = ChoiceOracle(g, ColorSpec.four(2), seed=0)
    ep = run_epoch(g, t, o, "00", [4], 0.02, 2, 100)
    assert ep.B == [4] and ep.A == []
    assert ep.outcome is Outcome.FAIL and ep.steps_used == 0


def test_run_epoch_replays():
    def go():
        rng = np.random.default_rng(17)
        g = random_min_degree_host(600, 60, np.random.default_rng(1))
        return long_cycle(g, 16, 0.1, rng, m=60)

    a, b = go(), go()
    assert a.trace_jsonl() == b.trace_jsonl()
    assert a.cycle == b.cycle and a.interrupt == b.interrupt


def revealed_path_fixture():
    # path 0..5 plus the chord {5, 0}; color 1 reveals every edge
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
    o = ChoiceOracle(g, ColorSpec(((0, 2), (1, 2))), Mode.WITHOUT_REPLACEMENT, seed=3)
    for v in range(6):
        o.draw(v, 1)
        o.draw(v, 1)
    return g, path_tree(6), o


def test_close_from_C_fixture():
    g, t, o = revealed_path_fixture()
    assert close_from_C(g, t, [], 0, o, 0.01, 6) is None
    cyc = close_from_C(g, t, [5], 0, o, 0.01, 6)
    assert cyc == (5, 4, 3, 2, 1, 0)
    assert cycle_is_revealed(g, o, cyc)


def test_close_from_B_requires_lineage():
    g, t, o = revealed_path_fixture()
    ep = Epoch("00", DARK_RED, [])
    with pytest.raises(MissingLineage):
        close_from_B(g, t, ep, {}, o, 0.1, 6)
    ep = Epoch("01", DARK_BLUE, [])
    with pytest.raises(MissingLineage):
        close_from_B(g, t, ep, {"0": Epoch("0", LIGHT_RED, [])}, o, 0.1, 6)


def test_close_from_B_without_good_vertices():
    g, t, _ = revealed_path_fixture()
    o = ChoiceOracle(g, ColorSpec.four(2), seed=1)
    lineage = {"0": Epoch("0", LIGHT_RED, [], path=[0, 1, 2]), "00": Epoch("00", DARK_RED, [], path=[3])}
    ep = Epoch("01", DARK_BLUE, [2], B=[4, 5])
    assert close_from_B(g, t, ep, lineage, o, 0.1, 6) is None


def test_scale_rounding():
    sc = Scale(0.02, 16, 100)
    assert sc.budget == 32 and sc.success == 96 and sc.interrupt == 2 and sc.seeds == 6
    assert sc.target == pytest.approx(62.0)


@pytest.mark.parametrize("seed", range(8))
def test_long_cycle_runs_are_well_formed(seed):
    g = random_min_degree_host(400, 50, np.random.default_rng(100 + seed))
    eps, k, m = 0.1, 24, 50
    res = long_cycle(g, k, eps, np.random.default_rng(seed), m=m)
    sc = Scale(eps, k, m)
    for ep in res.epochs:
        assert ep.color == epoch_color(ep.id)
        sets = [set(ep.A), set(ep.B), set(ep.C)]
        assert sum(map(len, sets)) == len(set().union(*sets))
        assert ep.steps_used <= sc.budget
        if ep.id != "0":
            assert set(ep.stack) <= set(ep.A)
        if ep.outcome is Outcome.SUCCESS:
            assert ep.r_bound_ok
    if res.cycle is not None:
        assert validate_cycle(g, res.cycle)
        assert all((min(a, b), max(a, b)) in res.revealed for a, b in zip(res.cycle, res.cycle[1:] + res.cycle[:1]))
    if res.success:
        assert res.length >= res.target


def test_long_cycle_trivial_target():
    g = random_min_degree_host(300, 40, np.random.default_rng(2))
    found = 0
    for seed in range(5):
        res = long_cycle(g, 32, 0.1, np.random.default_rng(seed), m=40)
        assert res.target <= 0
        found += res.success
        if res.cycle:
            assert len(res.cycle) >= 3
    assert found >= 1


def test_trace_jsonl_fields():
    g = random_min_degree_host(200, 30, np.random.default_rng(0))
    res = long_cycle(g, 8, 0.1, np.random.default_rng(0), m=30)
    import json

    rows = [json.loads(line) for line in res.trace_jsonl().splitlines()]
    assert rows[0]["id"] == "0" and rows[0]["color"] == "light-red"
    assert set(rows[0]) == {"id", "color", "A", "B", "C", "steps", "outcome"}


def b_closure_fixture():
    """Parent path 0..99, sibling path 100..199 hanging off seed 99, B vertices 200 -> 201 off 99.

    Both B vertices see {0..19, 70..89} on the parent path and {100..119, 180..199}
    on the sibling path, so every draw set contains vertices of V1, V2 and V3.
    """
    edges = [(i, i + 1) for i in range(199)]
    edges.remove((99, 100))
    edges += [(99, 100), (99, 200), (200, 201)]
    seen = list(range(20)) + list(range(70, 90)) + list(range(100, 120)) + list(range(180, 200))
    for b in (200, 201):
        edges += [(b, x) for x in seen if (b, x) not in edges]
    g = Graph.from_edges(202, edges)
    t = ExplorationTree()
    t.add_root(0)
    for v in range(1, 200):
        t.attach(v, v - 1)
    t.attach(200, 99)
    t.attach(201, 200)
    spec = ColorSpec(((LIGHT_RED, 1), (DARK_RED, 1), (LIGHT_BLUE, 1), (DARK_BLUE, 81)))
    o = ChoiceOracle(g, spec, Mode.WITHOUT_REPLACEMENT, seed=7)
    for p, c in t.edges():
        o.log.append((p, LIGHT_RED, c))  # the exploration that grew the tree
    lineage = {
        "0": Epoch("0", LIGHT_RED, [], path=list(range(100))),
        "00": Epoch("00", DARK_RED, list(range(94, 100)), path=list(range(100, 200))),
    }
    ep = Epoch("01", DARK_BLUE, list(range(94, 100)), B=[200, 201])
    return g, t, o, lineage, ep


def test_close_from_B_builds_a_long_cycle():
    from kout.epochs import BClosureStats

    g, t, o, lineage, ep = b_closure_fixture()
    stats = BClosureStats()
    cyc = close_from_B(g, t, ep, lineage, o, 0.1, 200, stats)
    assert stats.W == 2 and stats.good == 2 and stats.short_neighborhoods == 0
    assert cyc is not None and cycle_is_revealed(g, o, cyc)
    assert cyc[0] == 200 and 201 in cyc and 99 in cyc
    # u1..v2 runs along the parent path, v3..99 along the sibling path
    assert len(cyc) >= 2 + 50 + 81
