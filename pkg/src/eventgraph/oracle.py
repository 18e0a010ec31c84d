"""Brute-force reference computations used to check the incremental engine.

Everything here works on a whole static graph and may be slow; nothing in
the streaming path imports this module except the ``bc`` baseline detector.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

Node = Hashable
CanonicalCluster = tuple[tuple, tuple]


def _ek(a, b):
    return (a, b) if a < b else (b, a)


@dataclass
class StaticGraph:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)

    def __post_init__(self) -> None:
        seen = set()
        norm = []
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop at {a!r}")
            e = _ek(a, b)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        self.edges = norm
        known = set(self.nodes)
        for a, b in norm:
            for n in (a, b):
                if n not in known:
                    known.add(n)
                    self.nodes.append(n)

    def adjacency(self) -> dict:
        adj = {n: set() for n in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    @classmethod
    def from_text(cls, text: str) -> "StaticGraph":
        """Parse ``N M`` followed by ``M`` lines ``i j`` (0-based indices)."""
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        n, m = int(lines[0][0]), int(lines[0][1])
        if len(lines) - 1 != m:
            raise ValueError(f"expected {m} edge lines, got {len(lines) - 1}")
        edges = []
        for parts in lines[1:]:
            i, j = int(parts[0]), int(parts[1])
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range")
            edges.append((i, j))
        return cls(list(range(n)), edges)

    def to_text(self) -> str:
        index = {v: i for i, v in enumerate(self.nodes)}
        rows = [f"{len(self.nodes)} {len(self.edges)}"]
        rows += [f"{index[a]} {index[b]}" for a, b in self.edges]
        return "\n".join(rows) + "\n"


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _canon_cycle(seq: Sequence) -> tuple:
    k = seq.index(min(seq))
    rot = list(seq[k:]) + list(seq[:k])
    if len(rot) > 2 and rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return tuple(rot)


def enumerate_short_cycles(g: StaticGraph) -> list[tuple]:
    """All simple 3- and 4-cycles, each once, as canonical node sequences."""
    adj = g.adjacency()
    found: set[tuple] = set()
    for a, b in g.edges:
        for c in adj[a] & adj[b]:
            found.add(_canon_cycle((a, b, c)))
    # a 4-cycle a-b-c-d is two distinct common neighbours b, d of a non-adjacent-or-adjacent pair (a, c)
    nodes = sorted(g.nodes)
    for i, a in enumerate(nodes):
        for c in nodes[i + 1:]:
            common = sorted(adj[a] & adj[c])
            for b, d in itertools.combinations(common, 2):
                found.add(_canon_cycle((a, b, c, d)))
    return sorted(found, key=lambda t: (len(t), t))


def cycle_edges(cycle: Sequence) -> list[tuple]:
    return [_ek(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def canonical(nodes: Iterable, edges: Iterable) -> CanonicalCluster:
    return tuple(sorted(set(nodes))), tuple(sorted(_ek(a, b) for a, b in edges))


def oracle_clusters(g: StaticGraph) -> set[CanonicalCluster]:
    """Edge classes under shared membership in a short cycle."""
    uf = _UnionFind()
    clustered = set()
    for cyc in enumerate_short_cycles(g):
        es = cycle_edges(cyc)
        clustered.update(es)
        for e in es[1:]:
            uf.union(es[0], e)
    classes: dict = defaultdict(list)
    for e in clustered:
        classes[uf.find(e)].append(e)
    out = set()
    for es in classes.values():
        out.add(canonical([n for e in es for n in e], es))
    return out


def edge_on_short_cycle(edges: Iterable, e) -> bool:
    """BFS check: does ``e`` have another path of length <= 3 using only ``edges``?"""
    a, b = e
    e = _ek(a, b)
    adj: dict = defaultdict(set)
    for u, v in edges:
        if _ek(u, v) != e:
            adj[u].add(v)
            adj[v].add(u)
    frontier = {a}
    seen = {a}
    for _ in range(3):
        nxt = set()
        for u in frontier:
            for v in adj[u]:
                if v == b:
                    return True
                if v not in seen:
                    seen.add(v)
                    nxt.add(v)
        frontier = nxt
    return False


def _connected(nodes: set, adj: dict, removed=None) -> bool:
    pool = nodes - {removed} if removed is not None else set(nodes)
    if not pool:
        return True
    start = next(iter(pool))
    stack, seen = [start], {start}
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v in pool and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == pool


def is_biconnected(nodes: Iterable, edges: Iterable) -> bool:
    """Connected, at least 3 nodes, and no single node removal disconnects it."""
    nodes = set(nodes)
    adj: dict = {n: set() for n in nodes}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
        nodes.update((a, b))
    if len(nodes) < 3 or not _connected(nodes, adj):
        return False
    return all(_connected(nodes, adj, removed=v) for v in nodes)


def articulation_points(nodes: Iterable, edges: Iterable) -> set:
    nodes = set(nodes)
    adj: dict = {n: set() for n in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return {v for v in nodes if not _connected(nodes, adj, removed=v)}


def is_mqc(nodes: Iterable, edges: Iterable, strict: bool = False) -> bool:
    """Majority quasi-clique test on the subgraph induced by ``edges``.

    Non-strict: degree >= ceil((N-1)/2). Strict: degree >= floor((N-1)/2) + 1.
    """
    nodes = set(nodes)
    n = len(nodes)
    deg = dict.fromkeys(nodes, 0)
    for a, b in edges:
        if a in deg and b in deg:
            deg[a] += 1
            deg[b] += 1
    need = (n - 1) // 2 + 1 if strict else -(-(n - 1) // 2)
    return all(d >= need for d in deg.values())


def bc_components(g: StaticGraph) -> tuple[list[CanonicalCluster], list[tuple]]:
    """Biconnected components: (components with >= 3 nodes, residual single edges).

    Iterative Hopcroft-Tarjan over the whole graph.
    """
    adj = {n: sorted(v) for n, v in g.adjacency().items()}
    disc: dict = {}
    low: dict = {}
    counter = 0
    comps: list[list[tuple]] = []
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        edge_stack: list[tuple] = []
        stack = [(root, None, iter(adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for v in it:
                if v == parent:
                    continue
                if v not in disc:
                    disc[v] = low[v] = counter
                    counter += 1
                    edge_stack.append((u, v))
                    stack.append((v, u, iter(adj[v])))
                    advanced = True
                    break
                if disc[v] < disc[u]:
                    low[u] = min(low[u], disc[v])
                    edge_stack.append((u, v))
            if advanced:
                continue
            stack.pop()
            if parent is not None:
                low[parent] = min(low[parent], low[u])
                if low[u] >= disc[parent]:
                    comp = []
                    while True:
                        e = edge_stack.pop()
                        comp.append(_ek(*e))
                        if e == (parent, u):
                            break
                    comps.append(comp)
    big, pairs = [], []
    for comp in comps:
        if len(comp) == 1:
            pairs.append(comp[0])
        else:
            big.append(canonical([n for e in comp for n in e], comp))
    return sorted(big), sorted(pairs)


def has_scp(nodes: Iterable, edges: Sequence) -> bool:
    """Every edge of the graph lies on a cycle of length <= 4 inside it."""
    edges = list(edges)
    return bool(edges) and all(edge_on_short_cycle(edges, e) for e in edges)


def _connected_edges(n: int, edges: Sequence[tuple]) -> bool:
    adj: dict = {i: set() for i in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return _connected(set(range(n)), adj)


def iter_graphs_upto(max_nodes: int):
    """Yield ``(n, edges)`` covering every connected graph on 3..max_nodes nodes.

    Graphs up to 7 nodes come from the networkx graph atlas (one per
    isomorphism class); 8-node graphs are produced by attaching a new vertex
    to every subset of every 7-node atlas graph, which reaches every 8-node
    isomorphism class at least once.
    """
    if max_nodes > 8:
        raise ValueError("exhaustive enumeration is limited to 8 nodes")
    from networkx.generators.atlas import graph_atlas_g

    atlas = graph_atlas_g()
    by_n: dict[int, list[list[tuple]]] = defaultdict(list)
    for G in atlas:
        by_n[G.number_of_nodes()].append([tuple(sorted(e)) for e in G.edges()])
    for n in range(3, min(max_nodes, 7) + 1):
        for edges in by_n[n]:
            if _connected_edges(n, edges):
                yield n, edges
    if max_nodes >= 8:
        for base in by_n[7]:
            for mask in range(1, 1 << 7):
                edges = base + [(i, 7) for i in range(7) if mask >> i & 1]
                if _connected_edges(8, edges):
                    yield 8, edges


@dataclass
class MqcSearchReport:
    graphs_checked: int = 0
    mqc_strict: int = 0
    mqc_nonstrict: int = 0
    counterexamples_strict: list = field(default_factory=list)
    counterexamples_nonstrict: list = field(default_factory=list)


def check_mqc_implies_scp(max_nodes: int = 8) -> MqcSearchReport:
    """Search every connected graph up to ``max_nodes`` for MQCs lacking per-edge SCP."""
    rep = MqcSearchReport()
    for n, edges in iter_graphs_upto(max_nodes):
        rep.graphs_checked += 1
        nodes = range(n)
        nonstrict = is_mqc(nodes, edges, strict=False)
        if not nonstrict:
            continue
        strict = is_mqc(nodes, edges, strict=True)
        rep.mqc_nonstrict += 1
        rep.mqc_strict += strict
        if not has_scp(nodes, edges):
            rep.counterexamples_nonstrict.append((n, edges))
            if strict:
                rep.counterexamples_strict.append((n, edges))
    return rep
