"""Shared randomized mutation harness for cluster-engine tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from eventgraph.clusters import ClusterEngine
from eventgraph.oracle import StaticGraph, edge_on_short_cycle, is_biconnected, oracle_clusters


@dataclass
class Mutation:
    kind: str  # node+, edge+, edge-, node-
    node: str | None = None
    edge: tuple[str, str] | None = None
    incident: tuple[tuple[str, float], ...] = ()

    def apply(self, eng: ClusterEngine):
        if self.kind == "node+":
            return eng.node_addition(self.node, list(self.incident))
        if self.kind == "edge+":
            return eng.edge_addition(self.edge, 0.5)
        if self.kind == "edge-":
            return eng.edge_deletion(self.edge)
        if self.kind == "node-":
            return eng.node_deletion(self.node)
        raise ValueError(self.kind)


def names(n: int) -> list[str]:
    return [f"k{i:03d}" for i in range(n)]


def _near(eng: ClusterEngine, rng: random.Random, a: str) -> str | None:
    """A node within distance 2 of ``a`` that is not adjacent to it, if any."""
    adj = eng.graph.adj
    two = set()
    for m in adj[a]:
        two.update(adj[m])
    two -= adj[a]
    two.discard(a)
    return rng.choice(sorted(two)) if two else None


def random_mutation(
    eng: ClusterEngine, rng: random.Random, pool: list[str], grow: bool = False
) -> Mutation | None:
    """One valid mutation for the current graph, biased towards local edges so cycles form.

    ``grow`` restricts the choice to node additions.
    """
    g = eng.graph
    present = sorted(g.nodes())
    r = 0.0 if grow else rng.random()
    if r < 0.25 or len(present) < 3:
        cand = [x for x in pool if x not in g]
        if not cand:
            return None
        x = rng.choice(cand)
        if present:
            k = min(len(present), rng.choice((0, 1, 2, 2, 3, 4)))
            if rng.random() < 0.7 and present:
                hub = rng.choice(present)
                local = sorted({hub} | g.adj[hub])
                picks = rng.sample(local, min(k, len(local)))
            else:
                picks = rng.sample(present, k)
        else:
            picks = []
        return Mutation("node+", node=x, incident=tuple((m, 0.5) for m in sorted(picks)))
    if r < 0.65:
        a = rng.choice(present)
        b = _near(eng, rng, a) if rng.random() < 0.7 else None
        if b is None:
            b = rng.choice(present)
        if a == b or g.has_edge(a, b):
            return None
        return Mutation("edge+", edge=(a, b))
    if r < 0.9:
        es = sorted(g.edges())
        if not es:
            return None
        return Mutation("edge-", edge=rng.choice(es))
    return Mutation("node-", node=rng.choice(present))


def static_of(eng: ClusterEngine) -> StaticGraph:
    return StaticGraph(sorted(eng.graph.nodes()), sorted(eng.graph.edges()))


class ClusterChecker:
    """Oracle checks of live clusters, memoised on the canonical form."""

    def __init__(self) -> None:
        self.scp_ok: dict = {}
        self.bic_ok: dict = {}
        self.scp_violations: list = []
        self.bic_violations: list = []
        self.checks = 0

    def check(self, eng: ClusterEngine, where) -> None:
        for c in eng.index:
            key = c.canonical()
            self.checks += 1
            if key not in self.scp_ok:
                edges = key[1]
                self.scp_ok[key] = all(edge_on_short_cycle(edges, e) for e in edges)
                self.bic_ok[key] = is_biconnected(key[0], edges)
            if not self.scp_ok[key]:
                self.scp_violations.append((where, key))
            if not self.bic_ok[key]:
                self.bic_violations.append((where, key))


def run_sequence(
    seed: int,
    max_nodes: int,
    steps: int,
    checker: ClusterChecker | None = None,
    grow: int = 0,
) -> ClusterEngine:
    """Apply ``grow`` node additions and then ``steps`` mixed mutations."""
    rng = random.Random(seed)
    pool = names(rng.randint(max(4, min(grow, max_nodes)), max_nodes))
    eng = ClusterEngine()
    done = 0
    attempts = 0
    total = grow + steps
    while done < total and attempts < total * 4:
        attempts += 1
        m = random_mutation(eng, rng, pool, grow=done < grow)
        if m is None:
            continue
        m.apply(eng)
        done += 1
        if checker is not None:
            checker.check(eng, (seed, done))
    return eng


def matches_oracle(eng: ClusterEngine) -> bool:
    return eng.index.canonical() == oracle_clusters(static_of(eng))
