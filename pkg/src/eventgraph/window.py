"""Sliding-window keyword statistics.

Each keyword keeps one entry per quantum it occurred in (within the last
``w`` quanta): the distinct hashed user ids of that quantum and their
bottom-p sketch. The window id set is the union of those entries, kept as a
multiplicity map so eviction is O(entry size).
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Container

from . import kernels
from .ingest import QuantumBatch


class ConfigError(ValueError):
    pass


@dataclass
class EngineConfig:
    quantum: int = 160
    window: int = 30
    gamma: int = 4
    lam: float = 0.20
    p: int | None = None
    tau: float = 1.0
    hash_seed: int = 0
    quantum_mode: str = "count"

    def __post_init__(self) -> None:
        if self.p is None and self.gamma >= 1 and 0.0 < self.lam <= 1.0:
            self.p = default_sketch_size(self.gamma, self.lam)
        self.validate()

    def validate(self) -> None:
        if self.quantum < 1:
            raise ConfigError("quantum must be >= 1")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.gamma < 1:
            raise ConfigError("gamma must be >= 1")
        if not 0.0 < self.lam <= 1.0:
            raise ConfigError("lambda must be in (0, 1]")
        if self.p is None or self.p < 1:
            raise ConfigError("minhash p must be >= 1")
        if self.tau < 0:
            raise ConfigError("tau must be >= 0")
        if self.quantum_mode not in ("count", "time"):
            raise ConfigError("quantum_mode must be 'count' or 'time'")


def default_sketch_size(gamma: int, lam: float) -> int:
    return max(1, min(math.ceil(gamma / 2), math.ceil(1.0 / lam)))


class State(enum.Enum):
    LOW = "low"
    HIGH = "high"


@dataclass(slots=True)
class QuantumEntry:
    quantum: int
    users: frozenset[int]
    sketch: list[int]


class KeywordStats:
    __slots__ = ("keyword", "entries", "counts", "state", "last_seen", "_sketch", "_sketch_p")

    def __init__(self, keyword: str):
        self.keyword = keyword
        self.entries: deque[QuantumEntry] = deque()
        self.counts: dict[int, int] = {}
        self.state = State.LOW
        self.last_seen = -1
        self._sketch: list[int] | None = None
        self._sketch_p = 0

    def push(self, entry: QuantumEntry) -> None:
        self.entries.append(entry)
        counts = self.counts
        for u in entry.users:
            counts[u] = counts.get(u, 0) + 1
        self.last_seen = entry.quantum
        self._sketch = None

    def evict_through(self, quantum: int) -> None:
        """Drop entries for quanta ``<= quantum``."""
        counts = self.counts
        while self.entries and self.entries[0].quantum <= quantum:
            old = self.entries.popleft()
            for u in old.users:
                c = counts[u] - 1
                if c:
                    counts[u] = c
                else:
                    del counts[u]
            self._sketch = None

    @property
    def id_set(self):
        """Distinct hashed user ids over the window (a live keys view)."""
        return self.counts.keys()

    @property
    def weight(self) -> int:
        return len(self.counts)

    def window_sketch(self, p: int) -> list[int]:
        if self._sketch is None or self._sketch_p != p:
            sk: list[int] = []
            for e in self.entries:
                sk = kernels.merge_bottom_p(sk, e.sketch, p)
            self._sketch = sk
            self._sketch_p = p
        return self._sketch


@dataclass
class QuantumDelta:
    index: int
    counts: dict[str, int]
    touched: frozenset[str]


@dataclass
class StatsStore:
    config: EngineConfig
    stats: dict[str, KeywordStats] = field(default_factory=dict)
    by_quantum: dict[int, list[str]] = field(default_factory=dict)
    last_index: int | None = None
    drained: set[str] = field(default_factory=set)
    _user_hash: dict[str, int] = field(default_factory=dict)

    def __contains__(self, keyword: str) -> bool:
        return keyword in self.stats

    def __getitem__(self, keyword: str) -> KeywordStats:
        return self.stats[keyword]

    def __len__(self) -> int:
        return len(self.stats)

    def user_hash(self, user: str) -> int:
        h = self._user_hash.get(user)
        if h is None:
            h = self._user_hash[user] = kernels.hash_user(user, self.config.hash_seed)
        return h

    def forget(self, keyword: str) -> None:
        self.stats.pop(keyword, None)
        self.drained.discard(keyword)


def hash_user(user: str, seed: int) -> int:
    """64-bit seeded hash of a user id, stable for the whole run."""
    return kernels.hash_user(user, seed)


def bottom_p_merge(a: list[int], b: list[int], p: int) -> list[int]:
    """The ``p`` smallest distinct values of two sorted sketches."""
    return kernels.merge_bottom_p(a, b, p)


def apply_quantum(store: StatsStore, batch: QuantumBatch) -> QuantumDelta:
    """Fold one quantum into the window and evict entries older than ``w`` quanta."""
    q = batch.index
    if store.last_index is not None and q != store.last_index + 1:
        raise ValueError(f"quantum {q} does not follow {store.last_index}")
    cfg = store.config
    users_by_kw: dict[str, set[int]] = {}
    for msg in batch.messages:
        if not msg.keywords:
            continue
        uh = store.user_hash(msg.user)
        for kw in msg.keywords:
            s = users_by_kw.get(kw)
            if s is None:
                users_by_kw[kw] = {uh}
            else:
                s.add(uh)

    # evict before pushing; window after this quantum is (q - w, q]
    for kw in store.by_quantum.pop(q - cfg.window, ()):
        st = store.stats.get(kw)
        if st is None:
            continue
        st.evict_through(q - cfg.window)
        if not st.entries:
            store.drained.add(kw)

    p = cfg.p
    stats = store.stats
    for kw, users in users_by_kw.items():
        st = stats.get(kw)
        if st is None:
            st = stats[kw] = KeywordStats(kw)
        st.push(QuantumEntry(q, frozenset(users), kernels.bottom_p(users, p)))
        store.drained.discard(kw)
    store.by_quantum[q] = list(users_by_kw)
    store.last_index = q
    counts = {kw: len(u) for kw, u in users_by_kw.items()}
    return QuantumDelta(q, counts, frozenset(counts))


def classify_states(
    delta: QuantumDelta, gamma: int, akg_nodes: Container[str]
) -> tuple[set[str], set[str]]:
    """Split this quantum's keywords into (newly-high, touched AKG nodes).

    A keyword may land in both sets.
    """
    set1 = {kw for kw, c in delta.counts.items() if c >= gamma}
    set2 = {kw for kw in delta.counts if kw in akg_nodes}
    return set1, set2


def expire_stale(
    store: StatsStore, q: int, w: int, remove: Callable[[str], object] | None = None
) -> list[str]:
    """Remove keywords unseen for ``w`` quanta; ``remove`` drops them from the AKG."""
    stale = sorted(kw for kw in store.drained if store.stats[kw].last_seen <= q - w)
    for kw in stale:
        if remove is not None:
            remove(kw)
        store.forget(kw)
    return stale

