"""Cluster scoring, report threshold, event records and lifecycle history."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .clusters import Cluster, ClusterDelta, ClusterIndex
from .graph import AkgGraph, Edge

KeywordFilter = Callable[[Sequence[str]], bool]


def rank_cluster(
    nodes: Iterable[str],
    edges: Mapping[Edge, float],
    weights: Mapping[str, float],
) -> float:
    """Size-normalised sum of the weighted correlation row vector.

    Each node contributes its own weight (the unit diagonal) and each edge
    contributes ``EC * (w_a + w_b)``.
    """
    nodes = list(nodes)
    if not nodes:
        return 0.0
    total = sum(weights[k] for k in nodes)
    for (a, b), ec in edges.items():
        total += ec * (weights[a] + weights[b])
    return total / len(nodes)


def report_threshold(n: int, gamma: float, lam: float, tau: float) -> float:
    """Rank of the weakest legal cluster (a cycle at minimum weight and EC), scaled by ``tau``.

    Independent of ``n``: every node has weight ``gamma`` and two edges at ``lam``.
    """
    return tau * gamma * (1.0 + 2.0 * lam)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


@dataclass
class EventRecord:
    quantum: int
    cluster_id: str
    status: str
    rank: float
    keywords: list[str]
    support: int
    edges: list[tuple[str, str, float]]
    detector: str | None = None

    def to_json(self) -> str:
        kws = ",".join(json.dumps(k, ensure_ascii=False) for k in self.keywords)
        es = ",".join(
            f"[{json.dumps(a, ensure_ascii=False)},{json.dumps(b, ensure_ascii=False)},{_fmt(ec)}]"
            for a, b, ec in self.edges
        )
        head = (
            f'{{"q":{self.quantum},"id":{json.dumps(self.cluster_id)},'
            f'"status":{json.dumps(self.status)},"rank":{_fmt(self.rank)},'
            f'"keywords":[{kws}],"support":{self.support},"edges":[{es}]'
        )
        if self.detector is not None:
            head += f',"detector":{json.dumps(self.detector)}'
        return head + "}"

    @classmethod
    def from_json(cls, line: str) -> "EventRecord":
        d = json.loads(line)
        return cls(
            d["q"], d["id"], d["status"], d["rank"], list(d["keywords"]),
            d["support"], [tuple(e) for e in d["edges"]], d.get("detector"),
        )


class EventHistory:
    """Per-cluster chronological samples of ``(quantum, rank, size)``."""

    def __init__(self) -> None:
        self.samples: dict[str, list[tuple[int, float, int]]] = {}

    def record(self, cid: str, quantum: int, rank: float, size: int) -> None:
        seq = self.samples.setdefault(cid, [])
        if seq and seq[-1][0] >= quantum:
            raise ValueError(f"history for {cid} must advance (got q={quantum})")
        seq.append((quantum, rank, size))

    def __getitem__(self, cid: str) -> list[tuple[int, float, int]]:
        return self.samples[cid]

    def __contains__(self, cid: str) -> bool:
        return cid in self.samples


def spuriousness_analysis(samples: Sequence[tuple[int, float, int]]) -> str | None:
    """``'suspect'`` for a flat keyword set with strictly falling rank, else ``'evolving'``.

    Returns None (deferred) for fewer than three samples. Post-hoc only.
    """
    if len(samples) < 3:
        return None
    sizes = {s[2] for s in samples}
    ranks = [s[1] for s in samples]
    falling = all(later < earlier for earlier, later in zip(ranks, ranks[1:]))
    return "suspect" if len(sizes) == 1 and falling else "evolving"


def cluster_weights(nodes: Iterable[str], weight_of: Callable[[str], int]) -> dict[str, int]:
    return {k: weight_of(k) for k in nodes}


def snapshot(
    c: Cluster,
    graph: AkgGraph,
    weight_of: Callable[[str], int],
    ids_of: Callable[[str], Iterable[int]],
) -> tuple[float, list[str], int, list[tuple[str, str, float]]]:
    weights = cluster_weights(c.nodes, weight_of)
    ecs = {e: graph.ec[e] for e in c.edges}
    rank = rank_cluster(weights, ecs, weights)
    support: set[int] = set()
    for k in c.nodes:
        support.update(ids_of(k))
    edges = [(a, b, ecs[(a, b)]) for a, b in sorted(ecs)]
    return rank, sorted(c.nodes), len(support), edges


@dataclass
class Emitter:
    """Turns per-quantum cluster changes into event records.

    A cluster is reported once its rank reaches the threshold (first public
    appearance is ``new``). Previously reported clusters that disappear get
    a ``dissolved`` record so consumers can retract them.
    """

    gamma: int
    lam: float
    tau: float
    keyword_filter: KeywordFilter | None = None
    history: EventHistory = field(default_factory=EventHistory)
    reported: dict[str, EventRecord] = field(default_factory=dict)
    ever_reported: set[str] = field(default_factory=set)

    def threshold(self, n: int) -> float:
        return report_threshold(n, self.gamma, self.lam, self.tau)

    def emit(
        self,
        quantum: int,
        delta: ClusterDelta,
        index: ClusterIndex,
        graph: AkgGraph,
        weight_of: Callable[[str], int],
        ids_of: Callable[[str], Iterable[int]],
        touched: Iterable[str] = (),
    ) -> list[EventRecord]:
        live = index.by_id
        split_ids = {cid for _, ids in delta.split for cid in ids}
        merged_ids = {s for s, _ in delta.merged}
        absorbed = {a for _, ids in delta.merged for a in ids}
        affected = set(delta.created) | delta.changed | split_ids | merged_ids
        for k in touched:
            affected.update(index.by_node.get(k, ()))

        records: list[EventRecord] = []
        for c in sorted(live.values(), key=lambda c: c.seq):
            rank, keywords, support, edges = snapshot(c, graph, weight_of, ids_of)
            self.history.record(c.id, quantum, rank, len(keywords))
            if c.id not in affected:
                continue
            if rank < self.threshold(len(keywords)):
                continue
            if self.keyword_filter is not None and not self.keyword_filter(keywords):
                continue
            if c.id not in self.reported:
                status = "new"
            elif c.id in split_ids:
                status = "split"
            elif c.id in merged_ids:
                status = "merged"
            else:
                status = "updated"
            rec = EventRecord(quantum, c.id, status, rank, keywords, support, edges)
            self.reported[c.id] = rec
            self.ever_reported.add(c.id)
            records.append(rec)

        gone = sorted((cid for cid in self.reported if cid not in live), key=lambda s: int(s[1:]))
        for cid in gone:
            last = self.reported.pop(cid)
            if cid in absorbed:
                continue
            records.append(EventRecord(quantum, cid, "dissolved", 0.0, last.keywords, last.support, []))
        return records
