import random

import pytest
from hypothesis import given, settings, strategies as st

from eventgraph.clusters import ClusterEngine
from eventgraph.graph import ContractViolation, edge_key
from eventgraph.oracle import StaticGraph, canonical, oracle_clusters

from helpers import random_mutation, names, static_of


def engine_with(edges, debug=True):
    eng = ClusterEngine(debug=debug)
    adj = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    for n in sorted(adj):
        eng.node_addition(n, [(m, 0.5) for m in sorted(adj[n]) if m in eng.graph])
    return eng


def clusters(eng):
    return {c.canonical() for c in eng.index}


def tri(a, b, c):
    return canonical([a, b, c], [(a, b), (b, c), (a, c)])


def test_node_addition_triangle_rule():
    eng = engine_with([("n1", "n2")])
    d = eng.node_addition("n", [("n1", 0.5), ("n2", 0.5)])
    assert len(d.created) == 1
    assert clusters(eng) == {tri("n", "n1", "n2")}


def test_node_addition_common_neighbour_rule():
    eng = engine_with([("n1", "nc"), ("n2", "nc")])
    eng.node_addition("n", [("n1", 0.5), ("n2", 0.5)])
    (nodes, edges), = clusters(eng)
    assert nodes == ("n", "n1", "n2", "nc") and len(edges) == 4


def test_node_addition_single_edge_does_nothing():
    eng = engine_with([("a", "b")])
    d = eng.node_addition("n", [("a", 0.5)])
    assert not d and len(eng.index) == 0


def test_node_addition_merges_two_clusters():
    # C1 = triangle {1,4,x}, C2 = triangle {2,4,y}; new node n adjacent to 1 and 2
    eng = engine_with([("1", "4"), ("1", "x"), ("4", "x"), ("2", "4"), ("2", "y"), ("4", "y")])
    assert len(eng.index) == 2
    oldest = min(eng.index, key=lambda c: c.seq).id
    d = eng.node_addition("n", [("1", 0.5), ("2", 0.5)])
    assert len(eng.index) == 1
    (c,) = list(eng.index)
    assert c.id == oldest and set(c.nodes) == {"1", "2", "4", "n", "x", "y"}
    assert d.merged and d.merged[0][0] == oldest


def test_node_addition_requires_node():
    with pytest.raises(ContractViolation):
        ClusterEngine().node_addition("ghost")


def test_edge_addition_merges_seeds():
    eng = engine_with([("1", "3"), ("3", "4"), ("1", "4"), ("2", "4"), ("2", "5"), ("4", "5")])
    eng.edge_addition(("1", "2"), 0.5)
    want = oracle_clusters(static_of(eng))
    assert clusters(eng) == want
    (nodes, _), = want
    assert nodes == ("1", "2", "3", "4", "5")


def test_edge_addition_trivial_cases():
    eng = engine_with([], debug=True)
    for n in "ab":
        eng.graph.add_node(n)
    assert not eng.edge_addition(("a", "b"), 0.5)
    eng = engine_with([("a", "c"), ("b", "c")])
    d = eng.edge_addition(("a", "b"), 0.5)
    assert len(d.created) == 1 and clusters(eng) == {tri("a", "b", "c")}
    with pytest.raises(ContractViolation):
        eng.edge_addition(("a", "zz"), 0.5)


GLUED_HUB = [("3", "a"), ("3", "b"), ("a", "b"), ("3", "c"), ("3", "d"), ("c", "d"), ("9", "a"), ("3", "9"), ("9", "c")]


def test_node_deletion_splits_at_articulation():
    eng = engine_with(GLUED_HUB)
    assert len(eng.index) == 1
    old = next(iter(eng.index)).id
    d = eng.node_deletion("9")
    assert clusters(eng) == {tri("3", "a", "b"), tri("3", "c", "d")}
    assert d.split == [(old, [old, d.split[0][1][1]])]
    assert eng.index.by_node["3"] and len(eng.index.by_node["3"]) == 2
    assert "3" in d.pivots[old]
    # the fragment with the smaller keyword set keeps the id
    assert set(eng.index[old].nodes) == {"3", "a", "b"}


def test_node_deletion_dissolves_four_cycle():
    eng = engine_with([("n", "a"), ("a", "b"), ("b", "c"), ("c", "n")])
    cid = next(iter(eng.index)).id
    d = eng.node_deletion("n")
    assert d.dissolved == [cid] and len(eng.index) == 0


def test_node_deletion_outside_clusters():
    eng = engine_with([("a", "b"), ("b", "c")])
    assert not eng.node_deletion("a")
    assert not eng.node_deletion("ghost") and eng.noop_deletions == 1


def test_edge_deletion_book_graph_shrinks():
    eng = engine_with([("n", "3"), ("3", "4"), ("n", "4"), ("4", "1"), ("n", "1")])
    cid = next(iter(eng.index)).id
    d = eng.edge_deletion(("n", "1"))
    assert clusters(eng) == {tri("n", "3", "4")}
    assert d.changed == {cid} and next(iter(eng.index)).id == cid


def test_edge_deletion_trivial_cases():
    eng = engine_with([("a", "b"), ("b", "c"), ("a", "c")])
    d = eng.edge_deletion(("a", "b"))
    assert d.dissolved and len(eng.index) == 0
    eng = engine_with([("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")])
    assert not eng.edge_deletion(("c", "d"))
    assert not eng.edge_deletion(("a", "zz")) and eng.noop_deletions == 1


def test_merge_contract():
    eng = engine_with([("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")])
    ids = sorted(c.id for c in eng.index)
    assert eng.merge_clusters(ids[0], ids[0]) == ids[0]
    with pytest.raises(ContractViolation):
        eng.merge_clusters(ids[0], ids[1])


def test_two_triangles_sharing_edge_single_cluster():
    eng = engine_with([("a", "b"), ("b", "c"), ("a", "c"), ("b", "d"), ("c", "d")])
    (nodes, _), = clusters(eng)
    assert nodes == ("a", "b", "c", "d")


def test_short_cycle_exists_examples():
    eng = engine_with([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    c = next(iter(eng.index))
    assert eng.short_cycle_exists(("a", "b"), c.id)
    eng = engine_with([("5.9", "earthquake"), ("5.9", "turkey"), ("turkey", "earthquake")])
    c = next(iter(eng.index))
    assert eng.short_cycle_exists(("5.9", "earthquake"), c.id)


def test_ring_of_vertex_glued_triangles():
    """Articulation-free cluster that must still split once the cycles linking it go away."""
    edges = []
    hubs = ["h0", "h1", "h2", "h3"]
    for i, h in enumerate(hubs):
        nxt = hubs[(i + 1) % 4]
        t = f"t{i}"
        edges += [(h, nxt), (h, t), (nxt, t)]
    eng = engine_with(edges)
    assert clusters(eng) == oracle_clusters(static_of(eng))
    eng.edge_deletion(("h0", "h1"))
    assert clusters(eng) == oracle_clusters(static_of(eng))


def _two_hop(g, n):
    out = {n} | g.adj.get(n, set())
    for m in list(out):
        out |= g.adj.get(m, set())
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_locality_of_node_operations(seed):
    rng = random.Random(seed)
    pool = names(rng.randint(5, 25))
    eng = ClusterEngine()
    for _ in range(60):
        m = random_mutation(eng, rng, pool)
        if m is None:
            continue
        if m.kind == "node-":
            scope = _two_hop(eng.graph, m.node)
            for cid in eng.index.by_node.get(m.node, ()):
                scope |= set(eng.index[cid].nodes)
            m.apply(eng)
            assert eng.touched <= scope
        elif m.kind == "node+":
            m.apply(eng)
            scope = _two_hop(eng.graph, m.node)
            for cid in eng.index.by_node.get(m.node, ()):
                scope |= set(eng.index[cid].nodes)
            assert eng.touched <= scope
        else:
            m.apply(eng)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(4, 14), st.integers(1, 50))
def test_engine_matches_oracle_after_every_mutation(seed, n, steps):
    rng = random.Random(seed)
    pool = names(n)
    eng = ClusterEngine(debug=True)
    for _ in range(steps):
        m = random_mutation(eng, rng, pool)
        if m is None:
            continue
        m.apply(eng)
        assert clusters(eng) == oracle_clusters(static_of(eng))
        eng.graph.check_invariants()
        for node, cids in eng.index.by_node.items():
            for cid in cids:
                assert node in eng.index[cid].nodes


def test_split_ids_are_deterministic():
    runs = []
    for _ in range(3):
        eng = engine_with(GLUED_HUB)
        d = eng.node_deletion("9")
        runs.append((d.split, sorted((c.id, c.canonical()) for c in eng.index)))
    assert runs[0] == runs[1] == runs[2]


def test_edge_key_order():
    assert edge_key("b", "a") == ("a", "b")
