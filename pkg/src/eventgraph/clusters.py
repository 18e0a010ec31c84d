"""Incremental maintenance of short-cycle clusters over the AKG.

A cluster is a class of AKG edges that are linked, transitively, by shared
membership in cycles of length 3 or 4; its nodes are the endpoints of those
edges. Additions only create cycles through the new edges, so they seed
small clusters and merge them with any cluster they share an edge with.
Deletions only destroy cycles inside the clusters that owned the removed
edges, so repair stays inside those clusters: peel edges that lost every
short cycle, look for articulation points, then re-derive the edge classes of
what is left.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import AkgGraph, ContractViolation, Edge, edge_key, path_leq3

log = logging.getLogger(__name__)


class Cluster:
    __slots__ = ("id", "seq", "created_quantum", "edges", "node_count")

    def __init__(self, cid: str, seq: int, created_quantum: int):
        self.id = cid
        self.seq = seq
        self.created_quantum = created_quantum
        self.edges: set[Edge] = set()
        self.node_count: dict[str, int] = {}

    @property
    def nodes(self):
        return self.node_count.keys()

    def __len__(self) -> int:
        return len(self.node_count)

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.node_count}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def canonical(self) -> tuple[tuple[str, ...], tuple[Edge, ...]]:
        return tuple(sorted(self.node_count)), tuple(sorted(self.edges))

    def __repr__(self) -> str:
        return f"Cluster({self.id}, nodes={sorted(self.node_count)})"


class ClusterIndex:
    """Clusters by id, by edge (a function) and by node (a node may be in several)."""

    def __init__(self) -> None:
        self.by_id: dict[str, Cluster] = {}
        self.by_edge: dict[Edge, str] = {}
        self.by_node: dict[str, set[str]] = {}
        self._seq = 0

    def __len__(self) -> int:
        return len(self.by_id)

    def __iter__(self):
        return iter(self.by_id.values())

    def __getitem__(self, cid: str) -> Cluster:
        return self.by_id[cid]

    def _attach(self, c: Cluster, e: Edge) -> None:
        if e in c.edges:
            return
        c.edges.add(e)
        for n in e:
            k = c.node_count.get(n, 0)
            c.node_count[n] = k + 1
            if k == 0:
                self.by_node.setdefault(n, set()).add(c.id)

    def _detach(self, c: Cluster, e: Edge) -> None:
        c.edges.discard(e)
        if self.by_edge.get(e) == c.id:
            del self.by_edge[e]
        for n in e:
            k = c.node_count[n] - 1
            if k:
                c.node_count[n] = k
            else:
                del c.node_count[n]
                ids = self.by_node[n]
                ids.discard(c.id)
                if not ids:
                    del self.by_node[n]

    def create(self, edges: Iterable[Edge], quantum: int = 0) -> Cluster:
        """Register a new cluster; it takes ownership of all of ``edges``."""
        self._seq += 1
        c = Cluster(f"c{self._seq}", self._seq, quantum)
        self.by_id[c.id] = c
        for e in edges:
            self._attach(c, e)
            self.by_edge[e] = c.id
        return c

    def extend(self, c: Cluster, edges: Iterable[Edge]) -> None:
        """Add edges to ``c``; edges owned by another cluster stay owned by it."""
        for e in edges:
            self._attach(c, e)
            self.by_edge.setdefault(e, c.id)

    def merge(self, a: str, b: str) -> str:
        """Absorb the younger of two edge-sharing clusters into the older."""
        if a == b:
            return a
        ca, cb = self.by_id[a], self.by_id[b]
        if ca.edges.isdisjoint(cb.edges):
            raise ContractViolation(f"clusters {a} and {b} share no edge")
        if cb.seq < ca.seq:
            ca, cb = cb, ca
        for e in list(cb.edges):
            self._detach(cb, e)
            self._attach(ca, e)
            self.by_edge[e] = ca.id
        del self.by_id[cb.id]
        return ca.id

    def remove_edges(self, c: Cluster, edges: Iterable[Edge]) -> None:
        for e in edges:
            if e in c.edges:
                self._detach(c, e)

    def drop(self, c: Cluster) -> None:
        self.remove_edges(c, list(c.edges))
        del self.by_id[c.id]

    def canonical(self) -> set[tuple[tuple[str, ...], tuple[Edge, ...]]]:
        return {c.canonical() for c in self.by_id.values()}


@dataclass
class ClusterDelta:
    created: list[str] = field(default_factory=list)
    merged: list[tuple[str, list[str]]] = field(default_factory=list)
    split: list[tuple[str, list[str]]] = field(default_factory=list)
    dissolved: list[str] = field(default_factory=list)
    changed: set[str] = field(default_factory=set)
    pivots: dict[str, set[str]] = field(default_factory=dict)

    def extend(self, other: "ClusterDelta") -> "ClusterDelta":
        self.created += other.created
        self.merged += other.merged
        self.split += other.split
        self.dissolved += other.dissolved
        self.changed |= other.changed
        for k, v in other.pivots.items():
            self.pivots.setdefault(k, set()).update(v)
        return self

    def __bool__(self) -> bool:
        return bool(self.created or self.merged or self.split or self.dissolved or self.changed)


def _edge_classes(adj: dict[str, set[str]], edges: Iterable[Edge]) -> list[set[Edge]]:
    """Short-cycle edge classes among ``edges`` (adjacency ``adj`` must match)."""
    parent: dict[Edge, Edge] = {}

    def find(x: Edge) -> Edge:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def link(cycle: list[Edge]) -> None:
        r0 = find(cycle[0])
        for e in cycle[1:]:
            r = find(e)
            if r != r0:
                parent[r] = r0

    edges = list(edges)
    for e in edges:
        parent[e] = e
    on_cycle: set[Edge] = set()
    for u, v in edges:
        nu, nv = adj[u], adj[v]
        for w in nu & nv:
            cyc = [(u, v), edge_key(u, w), edge_key(v, w)]
            link(cyc)
            on_cycle.update(cyc)
        for x in nv:
            if x == u:
                continue
            nx_ = adj[x]
            for y in nu:
                if y != v and y != x and y in nx_:
                    cyc = [(u, v), edge_key(v, x), edge_key(x, y), edge_key(y, u)]
                    link(cyc)
                    on_cycle.update(cyc)
    classes: dict[Edge, set[Edge]] = {}
    for e in on_cycle:
        classes.setdefault(find(e), set()).add(e)
    return list(classes.values())


def _reachable_without(adj: dict[str, set[str]], start: str, banned: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v != banned and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


class ClusterEngine:
    """Owns the AKG and its cluster index; every mutation returns a ClusterDelta.

    ``touched`` holds the nodes examined by the last operation (locality
    instrumentation). With ``debug=True`` the full invariant set is checked
    after every mutation.
    """

    def __init__(self, graph: AkgGraph | None = None, debug: bool = False):
        self.graph = graph if graph is not None else AkgGraph()
        self.index = ClusterIndex()
        self.quantum = 0
        self.debug = debug
        self.touched: set[str] = set()
        self.noop_deletions = 0

    # ------------------------------------------------------------------ additions

    def node_addition(self, n: str, incident: Iterable[tuple[str, float]] | None = None) -> ClusterDelta:
        """Insert ``n`` (with ``incident`` edges, if given) and cluster it."""
        g = self.graph
        if incident is not None:
            g.add_node(n)
            for m, ec in incident:
                g.add_edge(n, m, ec)
        if n not in g:
            raise ContractViolation(f"node {n!r} not in graph")
        self.touched = {n}
        adj = g.adj
        nbrs = sorted(adj[n])
        if len(nbrs) < 2:
            return self._finish(ClusterDelta())
        self.touched.update(nbrs)
        seeds: list[list[Edge]] = []
        for i, n2 in enumerate(nbrs):
            a2 = adj[n2]
            e2 = edge_key(n, n2)
            for n3 in nbrs[i + 1:]:
                a3 = adj[n3]
                e3 = edge_key(n, n3)
                if n3 in a2:
                    seeds.append([e2, e3, edge_key(n2, n3)])
                for n4 in a2 & a3:
                    if n4 != n:
                        self.touched.add(n4)
                        seeds.append([e2, edge_key(n2, n4), edge_key(n4, n3), e3])
        return self._finish(self._integrate(seeds))

    def edge_addition(self, e: Edge, ec: float | None = None) -> ClusterDelta:
        """Insert edge ``e`` between two existing nodes (if ``ec`` given) and cluster it."""
        a, b = e
        g = self.graph
        if a not in g or b not in g:
            raise ContractViolation(f"edge {e} has a missing endpoint")
        if ec is not None and not g.has_edge(a, b):
            g.add_edge(a, b, ec)
        if not g.has_edge(a, b):
            raise ContractViolation(f"edge {e} not in graph")
        key = edge_key(a, b)
        adj = g.adj
        self.touched = {a, b}
        seeds: list[list[Edge]] = []
        na, nb = adj[a], adj[b]
        for n3 in sorted(na):
            if n3 == b:
                continue
            a3 = adj[n3]
            for n4 in nb:
                if n4 == a:
                    continue
                if n3 == n4:
                    self.touched.add(n3)
                    seeds.append([key, edge_key(a, n3), edge_key(b, n3)])
                elif n4 in a3:
                    self.touched.update((n3, n4))
                    seeds.append([key, edge_key(b, n4), edge_key(n4, n3), edge_key(n3, a)])
        return self._finish(self._integrate(seeds))

    def merge_clusters(self, a: str, b: str) -> str:
        """Merge two clusters sharing an edge; the older id survives."""
        self.touched.update(self.index[a].nodes)
        self.touched.update(self.index[b].nodes)
        return self.index.merge(a, b)

    def _integrate(self, seeds: list[list[Edge]]) -> ClusterDelta:
        delta = ClusterDelta()
        if not seeds:
            return delta
        parent = list(range(len(seeds)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        first_seed: dict[Edge, int] = {}
        for i, seed in enumerate(seeds):
            for e in seed:
                j = first_seed.setdefault(e, i)
                if j != i:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
        groups: dict[int, set[Edge]] = {}
        for i, seed in enumerate(seeds):
            groups.setdefault(find(i), set()).update(seed)

        index = self.index
        for root in sorted(groups):
            edges = groups[root]
            owners = {index.by_edge[e] for e in edges if e in index.by_edge}
            if not owners:
                c = index.create(sorted(edges), self.quantum)
                delta.created.append(c.id)
                continue
            order = sorted(owners, key=lambda cid: index[cid].seq)
            survivor = index[order[0]]
            before = set(survivor.nodes)
            index.extend(survivor, sorted(edges))
            for other in order[1:]:
                self.merge_clusters(survivor.id, other)
            if order[1:]:
                delta.merged.append((survivor.id, order[1:]))
            if set(survivor.nodes) != before or order[1:]:
                delta.changed.add(survivor.id)
                self.touched.update(survivor.nodes)
        return delta

    # ------------------------------------------------------------------ deletions

    def node_deletion(self, n: str) -> ClusterDelta:
        """Remove ``n`` and its edges from the AKG and repair the clusters it was in."""
        g = self.graph
        self.touched = {n}
        if n not in g:
            self.noop_deletions += 1
            log.debug("node_deletion: %r not in graph", n)
            return ClusterDelta()
        index = self.index
        affected = sorted(index.by_node.get(n, ()), key=lambda cid: index[cid].seq)
        removed = g.remove_node(n)
        delta = ClusterDelta()
        for cid in affected:
            c = index[cid]
            lost = [e for e in removed if e in c.edges]
            frontier = {m for e in lost for m in e if m != n}
            delta.extend(self._repair(c, lost, frontier))
        return self._finish(delta)

    def edge_deletion(self, e: Edge) -> ClusterDelta:
        """Remove edge ``e`` from the AKG and repair the cluster that owned it."""
        a, b = e
        g = self.graph
        self.touched = {a, b}
        if not g.has_edge(a, b):
            self.noop_deletions += 1
            log.debug("edge_deletion: %r not in graph", e)
            return ClusterDelta()
        key = edge_key(a, b)
        cid = self.index.by_edge.get(key)
        g.remove_edge(a, b)
        if cid is None:
            return self._finish(ClusterDelta())
        c = self.index[cid]
        # a 4-cycle through the lost edge also passes an edge between the endpoints' neighbours
        adj = c.adjacency()
        frontier = {a, b} | adj.get(a, set()) | adj.get(b, set())
        return self._finish(self._repair(c, [key], frontier))

    def short_cycle_exists(self, e: Edge, cid: str) -> bool:
        """Does cluster edge ``e`` lie on a cycle of length <= 4 made of cluster edges?"""
        c = self.index[cid]
        return path_leq3(c.adjacency(), e[0], e[1], None, e)

    def _repair(self, c: Cluster, lost: list[Edge], frontier: set[str]) -> ClusterDelta:
        index = self.index
        delta = ClusterDelta()
        index.remove_edges(c, lost)
        adj = c.adjacency()
        self.touched.update(adj)

        # cycle check: peel cluster edges that no longer sit on a short cycle
        queue = deque(sorted(m for m in frontier if m in adj))
        queued = set(queue)
        peeled: list[Edge] = []
        while queue:
            n2 = queue.popleft()
            queued.discard(n2)
            for n3 in sorted(adj[n2]):
                if n3 not in adj[n2]:
                    continue
                if path_leq3(adj, n2, n3, None, (n2, n3)):
                    continue
                adj[n2].discard(n3)
                adj[n3].discard(n2)
                peeled.append(edge_key(n2, n3))
                for m in (n2, n3, *adj[n2], *adj[n3]):
                    if m not in queued:
                        queued.add(m)
                        queue.append(m)
        for m in [m for m, nb in adj.items() if not nb]:
            del adj[m]

        pivots = self._articulation_check(adj, frontier)
        remaining = [e for e in c.edges if e not in set(peeled)]
        fragments = _edge_classes(adj, remaining)
        if pivots:
            delta.pivots[c.id] = pivots

        if not fragments:
            index.drop(c)
            delta.dissolved.append(c.id)
            return delta
        fragments.sort(key=lambda es: (min(n for e in es for n in e), sorted(es)))
        keep = fragments[0]
        nodes_before = set(c.nodes)
        index.remove_edges(c, [e for e in list(c.edges) if e not in keep])
        if len(fragments) == 1:
            if lost or set(c.nodes) != nodes_before or peeled:
                delta.changed.add(c.id)
            return delta
        new_ids = [c.id]
        for frag in fragments[1:]:
            nc = index.create(sorted(frag), self.quantum)
            new_ids.append(nc.id)
        delta.split.append((c.id, new_ids))
        delta.changed.add(c.id)
        return delta

    @staticmethod
    def _articulation_check(adj: dict[str, set[str]], frontier: set[str]) -> set[str]:
        """Articulation points among the local candidates.

        For frontier pairs that are not adjacent and have exactly one common
        neighbour, that neighbour is a candidate; for adjacent pairs with no
        other short path, both endpoints are.
        """
        live = sorted(m for m in frontier if m in adj)
        candidates: set[str] = set()
        for i, n2 in enumerate(live):
            for n3 in live[i + 1:]:
                if n3 in adj[n2]:
                    if not path_leq3(adj, n2, n3, None, (n2, n3)):
                        candidates.update((n2, n3))
                else:
                    common = adj[n2] & adj[n3]
                    if len(common) == 1:
                        candidates.update(common)
        pivots = set()
        total = len(adj)
        for cand in sorted(candidates):
            nbrs = adj.get(cand)
            if not nbrs or total < 3:
                continue
            start = next(iter(nbrs))
            if len(_reachable_without(adj, start, cand)) < total - 1:
                pivots.add(cand)
        return pivots

    # ------------------------------------------------------------------ checks

    def _finish(self, delta: ClusterDelta) -> ClusterDelta:
        if self.debug:
            self.check_invariants()
        return delta

    def check_invariants(self) -> None:
        """Raise AssertionError if the index or SCP invariants are broken."""
        index = self.index
        g = self.graph
        seen: dict[Edge, str] = {}
        for c in index:
            if len(c.edges) < 3 or len(c.node_count) < 3:
                raise AssertionError(f"{c.id} is smaller than a triangle")
            adj = c.adjacency()
            for e in c.edges:
                if e in seen:
                    raise AssertionError(f"edge {e} in {seen[e]} and {c.id}")
                seen[e] = c.id
                if index.by_edge.get(e) != c.id:
                    raise AssertionError(f"by_edge[{e}] != {c.id}")
                if e not in g.ec:
                    raise AssertionError(f"cluster edge {e} not in graph")
                if not path_leq3(adj, e[0], e[1], None, e):
                    raise AssertionError(f"edge {e} of {c.id} has no short cycle")
            for n in c.node_count:
                if c.id not in index.by_node.get(n, ()):
                    raise AssertionError(f"by_node[{n}] misses {c.id}")
        if set(index.by_edge) != set(seen):
            raise AssertionError("by_edge has stale entries")
