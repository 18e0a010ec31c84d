"""The active keyword graph: an undirected weighted adjacency store."""

from __future__ import annotations

from typing import AbstractSet, Iterable, Iterator

Edge = tuple[str, str]


class ContractViolation(RuntimeError):
    """An operation was called outside its precondition."""


def edge_key(a: str, b: str) -> Edge:
    return (a, b) if a < b else (b, a)


class AkgGraph:
    """Undirected simple graph keyed by keyword, with an EC value per edge.

    Removing an absent node or edge is a no-op and bumps ``noop_removals``.
    """

    def __init__(self) -> None:
        self.adj: dict[str, set[str]] = {}
        self.ec: dict[Edge, float] = {}
        self.noop_removals = 0

    def __contains__(self, node: str) -> bool:
        return node in self.adj

    def __len__(self) -> int:
        return len(self.adj)

    def nodes(self) -> Iterator[str]:
        return iter(self.adj)

    def edges(self) -> Iterator[Edge]:
        return iter(self.ec)

    @property
    def num_edges(self) -> int:
        return len(self.ec)

    def add_node(self, node: str) -> None:
        self.adj.setdefault(node, set())

    def remove_node(self, node: str) -> list[Edge]:
        """Remove ``node`` and its incident edges; returns the removed edges."""
        nbrs = self.adj.pop(node, None)
        if nbrs is None:
            self.noop_removals += 1
            return []
        removed = []
        for n in nbrs:
            self.adj[n].discard(node)
            e = edge_key(node, n)
            del self.ec[e]
            removed.append(e)
        return removed

    def add_edge(self, a: str, b: str, ec: float) -> None:
        if a == b:
            raise ContractViolation(f"self-loop on {a!r}")
        if a not in self.adj or b not in self.adj:
            raise ContractViolation(f"edge ({a!r}, {b!r}) has a missing endpoint")
        self.adj[a].add(b)
        self.adj[b].add(a)
        self.ec[edge_key(a, b)] = ec

    def set_ec(self, a: str, b: str, ec: float) -> None:
        e = edge_key(a, b)
        if e not in self.ec:
            raise ContractViolation(f"edge {e} absent")
        self.ec[e] = ec

    def remove_edge(self, a: str, b: str) -> bool:
        e = edge_key(a, b)
        if e not in self.ec:
            self.noop_removals += 1
            return False
        del self.ec[e]
        self.adj[a].discard(b)
        self.adj[b].discard(a)
        return True

    def has_edge(self, a: str, b: str) -> bool:
        nbrs = self.adj.get(a)
        return nbrs is not None and b in nbrs

    def neighbors(self, node: str) -> set[str]:
        return self.adj[node]

    def degree(self, node: str) -> int:
        return len(self.adj[node])

    def common_neighbors(self, a: str, b: str) -> set[str]:
        try:
            return self.adj[a] & self.adj[b]
        except KeyError as exc:
            raise ContractViolation(f"missing node {exc.args[0]!r}") from None

    def path_leq3_within(
        self,
        a: str,
        b: str,
        scope: AbstractSet[str] | None = None,
        excluding: Edge | None = None,
    ) -> bool:
        """Is there an ``a``-``b`` path of length <= 3 inside ``scope``?

        The edge ``excluding`` (if given) may not be used; ``scope=None``
        means the whole graph.
        """
        return path_leq3(self.adj, a, b, scope, excluding)

    def dump(self) -> str:
        """Tab-separated edge list ``k1 k2 EC``, sorted, one edge per line."""
        lines = [f"{a}\t{b}\t{ec:.6f}" for (a, b), ec in sorted(self.ec.items())]
        return "\n".join(lines) + ("\n" if lines else "")

    def check_invariants(self) -> None:
        deg = 0
        for n, nbrs in self.adj.items():
            if n in nbrs:
                raise AssertionError(f"self-loop at {n}")
            for m in nbrs:
                if n not in self.adj.get(m, ()):
                    raise AssertionError(f"asymmetric adjacency {n}-{m}")
                if edge_key(n, m) not in self.ec:
                    raise AssertionError(f"edge {n}-{m} missing EC")
            deg += len(nbrs)
        if deg != 2 * len(self.ec):
            raise AssertionError("degree sum != 2 * |E|")


def path_leq3(
    adj: dict[str, set[str]] | dict[str, AbstractSet[str]],
    a: str,
    b: str,
    scope: AbstractSet[str] | None = None,
    excluding: Edge | None = None,
) -> bool:
    """Bounded local check: direct edge, common neighbor, or neighbor-neighbor edge."""
    ab = edge_key(a, b)
    ex = excluding if excluding is None else edge_key(*excluding)
    if ex is not None and ex != ab:
        return _path_leq3_general(adj, a, b, scope, ex)
    na = adj[a]
    nb = adj[b]
    if b in na and ex is None:
        return True
    if scope is None:
        xs = [x for x in na if x != b]
        ys = nb
    else:
        xs = [x for x in na if x != b and x in scope]
        ys = {y for y in nb if y != a and y in scope}
    for x in xs:
        if x in ys:
            return True
    for x in xs:
        nx_ = adj[x]
        for y in ys:
            if y != a and y != x and y in nx_:
                return True
    return False


def _path_leq3_general(adj, a, b, scope, ex: Edge) -> bool:
    def ok(u: str, v: str) -> bool:
        return edge_key(u, v) != ex and (scope is None or v in scope)

    for x in adj[a]:
        if not ok(a, x):
            continue
        if x == b:
            return True
        for y in adj[x]:
            if y == a or not ok(x, y):
                continue
            if y == b:
                return True
            if b in adj[y] and ok(y, b):
                return True
    return False


def iter_edges(adj: dict[str, Iterable[str]]) -> Iterator[Edge]:
    for a, nbrs in adj.items():
        for b in nbrs:
            if a < b:
                yield (a, b)
