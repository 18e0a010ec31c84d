"""Per-quantum driver: window stats -> AKG edges -> cluster maintenance -> events."""

from __future__ import annotations

import hashlib
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .clusters import ClusterDelta, ClusterEngine
from .correlation import candidate_pairs, refresh_edges
from .graph import edge_key
from .ingest import QuantumBatch
from .oracle import StaticGraph, bc_components
from .ranking import Emitter, EventRecord, KeywordFilter, rank_cluster, spuriousness_analysis
from .window import (
    EngineConfig,
    State,
    StatsStore,
    apply_quantum,
    classify_states,
    expire_stale,
)


@dataclass
class _Series:
    n: int = 0
    total: float = 0.0
    lo: float = float("inf")
    hi: float = float("-inf")

    def add(self, x: float) -> None:
        self.n += 1
        self.total += x
        self.lo = min(self.lo, x)
        self.hi = max(self.hi, x)

    def as_dict(self) -> dict:
        if not self.n:
            return {"min": 0, "mean": 0.0, "max": 0}
        return {"min": self.lo, "mean": round(self.total / self.n, 4), "max": self.hi}


@dataclass
class RunMetrics:
    messages: int = 0
    parse_errors: int = 0
    quanta: int = 0
    elapsed_s: float = 0.0
    cluster_s: float = 0.0
    baseline_s: float = 0.0
    akg_nodes: _Series = field(default_factory=_Series)
    akg_edges: _Series = field(default_factory=_Series)
    clusters_live: _Series = field(default_factory=_Series)
    window_keywords: _Series = field(default_factory=_Series)
    akg_node_ratio: _Series = field(default_factory=_Series)
    events: Counter = field(default_factory=Counter)
    suspect_events: int = 0
    backend: str = ""

    @property
    def messages_per_sec(self) -> float:
        return self.messages / self.elapsed_s if self.elapsed_s > 0 else 0.0

    def as_dict(self) -> dict:
        return {
            "messages": self.messages,
            "parse_errors": self.parse_errors,
            "quanta": self.quanta,
            "elapsed_s": round(self.elapsed_s, 6),
            "messages_per_sec": round(self.messages_per_sec, 1),
            "cluster_s": round(self.cluster_s, 6),
            "baseline_s": round(self.baseline_s, 6),
            "akg_nodes": self.akg_nodes.as_dict(),
            "akg_edges": self.akg_edges.as_dict(),
            "clusters_live": self.clusters_live.as_dict(),
            "window_keywords": self.window_keywords.as_dict(),
            "akg_node_ratio": self.akg_node_ratio.as_dict(),
            "events": dict(sorted(self.events.items())),
            "suspect_events": self.suspect_events,
            "backend": self.backend,
        }


class Detector:
    """Streaming event detector. Feed it consecutive quantum batches.

    ``mode='bc'`` keeps the identical AKG (including short-cycle cluster
    retention) but reports biconnected components recomputed from scratch
    every quantum, residual edges included as size-2 clusters.
    """

    def __init__(
        self,
        config: EngineConfig,
        mode: str = "scp",
        keyword_filter: KeywordFilter | None = None,
        debug: bool = False,
    ):
        if mode not in ("scp", "bc"):
            raise ValueError(f"unknown mode {mode!r}")
        self.config = config
        self.mode = mode
        self.store = StatsStore(config)
        self.engine = ClusterEngine(debug=debug)
        self.graph = self.engine.graph
        self.emitter = Emitter(config.gamma, config.lam, config.tau, keyword_filter)
        self._bc_seen: set[str] = set()
        self.metrics = RunMetrics()
        self.last_cluster_s = 0.0
        self.last_baseline_s = 0.0

    def _weight(self, k: str) -> int:
        st = self.store.stats.get(k)
        return st.weight if st is not None else 0

    def _ids(self, k: str):
        st = self.store.stats.get(k)
        return st.id_set if st is not None else ()

    def process(self, batch: QuantumBatch) -> list[EventRecord]:
        cfg = self.config
        store, engine, graph = self.store, self.engine, self.graph
        q = batch.index
        engine.quantum = q

        dq = apply_quantum(store, batch)
        set1, set2 = classify_states(dq, cfg.gamma, graph)
        pairs = candidate_pairs(set1, set2, graph, store)
        ed = refresh_edges(pairs, store, cfg.lam, graph)

        t0 = time.perf_counter()
        qdelta = ClusterDelta()
        lazy: set[str] = set(set2)
        for k in set2:
            lazy.update(graph.neighbors(k))

        for a, b in ed.removals:
            qdelta.extend(engine.edge_deletion((a, b)))
            lazy.update(engine.touched)
        for a, b, ec in ed.updates:
            graph.set_ec(a, b, ec)
            cid = engine.index.by_edge.get(edge_key(a, b))
            if cid is not None:
                qdelta.changed.add(cid)

        pending: dict[str, list[tuple[str, float]]] = {}
        for a, b, ec in ed.additions:
            pending.setdefault(a, []).append((b, ec))
            pending.setdefault(b, []).append((a, ec))
        applied: set[tuple[str, str]] = set()
        for k in sorted(kw for kw in set1 if kw not in graph):
            incident = []
            for m, ec in sorted(pending.get(k, ())):
                if m in graph:
                    incident.append((m, ec))
                    applied.add(edge_key(k, m))
            qdelta.extend(engine.node_addition(k, incident))
            store[k].state = State.HIGH
        for a, b, ec in ed.additions:
            if (a, b) not in applied:
                qdelta.extend(engine.edge_addition((a, b), ec))

        # lazy exit: unclustered keywords that are not bursty this quantum leave the AKG
        by_node = engine.index.by_node
        for k in sorted(lazy):
            if k in graph and k not in by_node and dq.counts.get(k, 0) < cfg.gamma:
                engine.node_deletion(k)
                store[k].state = State.LOW

        def _remove(k: str) -> None:
            if k in graph:
                qdelta.extend(engine.node_deletion(k))

        expire_stale(store, q, cfg.window, _remove)
        self.last_cluster_s = time.perf_counter() - t0

        touched = set(dq.touched)
        for a, b, _ in ed.updates:
            touched.update((a, b))
        records = self.emitter.emit(q, qdelta, engine.index, graph, self._weight, self._ids, touched)

        self.last_baseline_s = 0.0
        if self.mode == "bc":
            t1 = time.perf_counter()
            records = self._baseline_records(q)
            self.last_baseline_s = time.perf_counter() - t1

        m = self.metrics
        m.quanta += 1
        m.messages += len(batch.messages)
        m.cluster_s += self.last_cluster_s
        m.baseline_s += self.last_baseline_s
        m.akg_nodes.add(len(graph))
        m.akg_edges.add(graph.num_edges)
        m.clusters_live.add(len(engine.index))
        m.window_keywords.add(len(store))
        if len(store):
            m.akg_node_ratio.add(len(graph) / len(store))
        for r in records:
            m.events[r.status] += 1
        return records

    def _baseline_records(self, q: int) -> list[EventRecord]:
        g = StaticGraph(sorted(self.graph.nodes()), sorted(self.graph.edges()))
        comps, pairs = bc_components(g)
        groups = [(list(nodes), list(edges)) for nodes, edges in comps]
        groups += [([a, b], [(a, b)]) for a, b in pairs]
        thr = self.emitter.threshold
        out = []
        for nodes, edges in groups:
            weights = {k: self._weight(k) for k in nodes}
            ecs = {e: self.graph.ec[e] for e in edges}
            rank = rank_cluster(nodes, ecs, weights)
            if rank < thr(len(nodes)):
                continue
            kf = self.emitter.keyword_filter
            if kf is not None and not kf(nodes):
                continue
            cid = "bc-" + hashlib.sha1("\x1f".join(nodes).encode("utf-8")).hexdigest()[:12]
            support: set[int] = set()
            for k in nodes:
                support.update(self._ids(k))
            status = "updated" if cid in self._bc_seen else "new"
            self._bc_seen.add(cid)
            out.append(
                EventRecord(
                    q, cid, status, rank, list(nodes), len(support),
                    [(a, b, ecs[(a, b)]) for a, b in edges], detector="bc",
                )
            )
        out.sort(key=lambda r: (r.keywords, r.cluster_id))
        return out

    def run(self, batches: Iterable[QuantumBatch]) -> list[EventRecord]:
        out: list[EventRecord] = []
        for b in batches:
            out.extend(self.process(b))
        return out

    def finalize(self) -> RunMetrics:
        """Post-hoc spuriousness pass over reported clusters; returns metrics."""
        hist = self.emitter.history
        self.metrics.suspect_events = sum(
            1 for cid in self.emitter.ever_reported
            if cid in hist and spuriousness_analysis(hist[cid]) == "suspect"
        )
        return self.metrics
