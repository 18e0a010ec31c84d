"""Candidate-pair selection and edge correlation (Jaccard over window id sets)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Iterable

from . import kernels
from .graph import AkgGraph, Edge, edge_key
from .window import StatsStore


@dataclass
class EdgeDelta:
    additions: list[tuple[str, str, float]] = field(default_factory=list)
    updates: list[tuple[str, str, float]] = field(default_factory=list)
    removals: list[tuple[str, str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.additions or self.updates or self.removals)


def jaccard(u1: AbstractSet, u2: AbstractSet) -> float:
    n1, n2 = len(u1), len(u2)
    if not n1 and not n2:
        return 0.0
    inter = len(u1 & u2)
    return inter / (n1 + n2 - inter)


def minhash_screen(s1: list[int], s2: list[int]) -> bool:
    """True iff two sorted bottom-p sketches share a value."""
    return kernels.sketches_intersect(s1, s2)


def candidate_pairs(
    set1: Iterable[str],
    set2: Iterable[str],
    akg: AkgGraph,
    store: StatsStore,
) -> list[Edge]:
    """Pairs whose correlation must be (re)computed this quantum.

    Screened pairs within ``set1`` plus every current AKG edge of a ``set2``
    keyword. Sorted, no duplicates.
    """
    p = store.config.p
    high = sorted(set1)
    sketches = [store[k].window_sketch(p) for k in high]
    pairs: set[Edge] = set()
    for i, a in enumerate(high):
        sa = sketches[i]
        for j in range(i + 1, len(high)):
            if kernels.sketches_intersect(sa, sketches[j]):
                pairs.add((a, high[j]))
    for k in set2:
        if k in akg:
            for n in akg.neighbors(k):
                pairs.add(edge_key(k, n))
    return sorted(pairs)


def refresh_edges(
    pairs: Iterable[Edge],
    store: StatsStore,
    lam: float,
    akg: AkgGraph,
) -> EdgeDelta:
    """Classify each pair as addition, update, removal or no-op by exact Jaccard."""
    delta = EdgeDelta()
    stats = store.stats
    for a, b in pairs:
        sa, sb = stats.get(a), stats.get(b)
        ec = jaccard(sa.id_set, sb.id_set) if sa is not None and sb is not None else 0.0
        present = akg.has_edge(a, b)
        if ec >= lam:
            if not present:
                delta.additions.append((a, b, ec))
            elif akg.ec[edge_key(a, b)] != ec:
                delta.updates.append((a, b, ec))
        elif present:
            delta.removals.append((a, b))
    return delta
