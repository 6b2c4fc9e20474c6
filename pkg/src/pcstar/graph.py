"""Directed, undirected and partially directed graphs over nodes ``0..n-1``.

All graph values are immutable. Derived structure (parents, adjacency,
ancestors) is computed lazily and cached on the instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Literal

from .errors import GraphError

Edge = tuple[int, int]


def _check_node(n: int, v: int) -> None:
    if not (0 <= v < n):
        raise GraphError(f"node {v} out of range for graph on {n} nodes")


def _undirected(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph; ``(u, v)`` in ``edges`` means ``u -> v``."""

    n: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            _check_node(self.n, u)
            _check_node(self.n, v)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if (v, u) in edges:
                raise GraphError(f"two-cycle between {u} and {v}")
        if self.topological_order is None:
            raise GraphError("edge set contains a directed cycle")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> Dag:
        return cls(n, frozenset(edges))

    @cached_property
    def parents(self) -> tuple[frozenset[int], ...]:
        pa: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            pa[v].add(u)
        return tuple(frozenset(p) for p in pa)

    @cached_property
    def children(self) -> tuple[frozenset[int], ...]:
        ch: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            ch[u].add(v)
        return tuple(frozenset(c) for c in ch)

    @cached_property
    def topological_order(self) -> tuple[int, ...] | None:
        # Kahn's algorithm with a sorted frontier, so the order is deterministic.
        indeg = [0] * self.n
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            indeg[v] += 1
            out[u].append(v)
        frontier = sorted(v for v in range(self.n) if indeg[v] == 0)
        order = []
        while frontier:
            u = frontier.pop(0)
            order.append(u)
            for v in sorted(out[u]):
                indeg[v] -= 1
                if indeg[v] == 0:
                    frontier.append(v)
            frontier.sort()
        if len(order) != self.n:
            return None
        return tuple(order)

    @cached_property
    def _ancestor_sets(self) -> tuple[frozenset[int], ...]:
        anc: list[set[int]] = [set() for _ in range(self.n)]
        for v in self.topological_order:
            for p in self.parents[v]:
                anc[v].add(p)
                anc[v] |= anc[p]
        return tuple(frozenset(a) for a in anc)

    @cached_property
    def _descendant_sets(self) -> tuple[frozenset[int], ...]:
        desc: list[set[int]] = [set() for _ in range(self.n)]
        for v in reversed(self.topological_order):
            for c in self.children[v]:
                desc[v].add(c)
                desc[v] |= desc[c]
        return tuple(frozenset(d) for d in desc)

    def ancestors(self, v: int) -> frozenset[int]:
        _check_node(self.n, v)
        return self._ancestor_sets[v]

    def descendants(self, v: int) -> frozenset[int]:
        _check_node(self.n, v)
        return self._descendant_sets[v]

    def in_degree(self, v: int) -> int:
        return len(self.parents[v])

    @property
    def max_in_degree(self) -> int:
        return max((len(p) for p in self.parents), default=0)

    def adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges


RelativeKind = Literal["parents", "children", "ancestors", "descendants", "An", "De"]


def relatives(g: Dag, v: int | Iterable[int], kind: RelativeKind) -> frozenset[int]:
    """Relatives of a node or node set.

    For a set ``S``, ``ancestors`` is the union of the members' ancestors with
    ``S`` removed, and ``An`` adds ``S`` back (likewise for descendants/``De``).
    """
    nodes = [v] if isinstance(v, int) else list(v)
    for x in nodes:
        _check_node(g.n, x)
    s = frozenset(nodes)
    if kind == "parents":
        return frozenset().union(*(g.parents[x] for x in nodes))
    if kind == "children":
        return frozenset().union(*(g.children[x] for x in nodes))
    if kind in ("ancestors", "An"):
        an = frozenset().union(*(g.ancestors(x) for x in nodes)) - s
        return an | s if kind == "An" else an
    if kind in ("descendants", "De"):
        de = frozenset().union(*(g.descendants(x) for x in nodes)) - s
        return de | s if kind == "De" else de
    raise GraphError(f"unknown relative kind {kind!r}")


@dataclass(frozen=True)
class Skeleton:
    """Undirected simple graph; edges are stored as ``(min, max)`` pairs."""

    n: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self):
        edges = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            _check_node(self.n, u)
            _check_node(self.n, v)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            edges.add(_undirected(u, v))
        object.__setattr__(self, "edges", frozenset(edges))

    @classmethod
    def complete(cls, n: int) -> Skeleton:
        return cls(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def adjacent(self, u: int, v: int) -> bool:
        return _undirected(u, v) in self.edges


def skeleton(g: Dag | Pdag) -> Skeleton:
    if isinstance(g, Pdag):
        return Skeleton(g.n, g.undirected | {_undirected(u, v) for u, v in g.directed})
    return Skeleton(g.n, frozenset(_undirected(u, v) for u, v in g.edges))


PossibleSource = tuple[tuple[int, ...], tuple[int, int]]


@dataclass(frozen=True)
class Pdag:
    """Partially directed graph: a CPDAG plus possible-source annotations.

    ``possible_sources`` holds ``(cycle, (a, b))`` entries recording that the
    source of the induced cycle ``cycle`` is one of ``a`` or ``b``.
    """

    n: int
    directed: frozenset[Edge] = frozenset()
    undirected: frozenset[Edge] = frozenset()
    possible_sources: frozenset[PossibleSource] = frozenset()

    def __post_init__(self):
        directed = frozenset((int(u), int(v)) for u, v in self.directed)
        undirected = frozenset(_undirected(int(u), int(v)) for u, v in self.undirected)
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "undirected", undirected)
        object.__setattr__(
            self,
            "possible_sources",
            frozenset((tuple(w), _undirected(*ab)) for w, ab in self.possible_sources),
        )
        for u, v in directed | undirected:
            _check_node(self.n, u)
            _check_node(self.n, v)
        overlap = {_undirected(u, v) for u, v in directed} & undirected
        if overlap:
            raise GraphError(f"edges both directed and undirected: {sorted(overlap)}")
        if len({_undirected(u, v) for u, v in directed}) != len(directed):
            raise GraphError("an edge is directed both ways")
        # Acyclicity of the directed part is enforced by Dag.
        Dag(self.n, directed)

    @classmethod
    def from_skeleton(cls, s: Skeleton) -> Pdag:
        return cls(s.n, frozenset(), s.edges)

    @classmethod
    def from_dag(cls, g: Dag) -> Pdag:
        return cls(g.n, g.edges, frozenset())

    @property
    def skeleton(self) -> Skeleton:
        return skeleton(self)

    def is_directed(self, u: int, v: int) -> bool:
        return (u, v) in self.directed

    def is_undirected(self, u: int, v: int) -> bool:
        return _undirected(u, v) in self.undirected


def unshielded_triples(s: Skeleton) -> set[tuple[int, int, int]]:
    """All ``(i, k, j)`` with ``i - k - j`` in ``s``, ``i`` and ``j`` non-adjacent, ``i < j``."""
    out = set()
    for k in range(s.n):
        nb = sorted(s.adjacency[k])
        for a in range(len(nb)):
            for b in range(a + 1, len(nb)):
                i, j = nb[a], nb[b]
                if not s.adjacent(i, j):
                    out.add((i, k, j))
    return out


def induced_subgraph(g, w: Iterable[int]):
    """Restrict ``g`` to the node set ``w``; node ids are kept as they are."""
    keep = frozenset(w)

    def inside(e):
        return e[0] in keep and e[1] in keep

    if isinstance(g, Dag):
        return Dag(g.n, frozenset(filter(inside, g.edges)))
    if isinstance(g, Skeleton):
        return Skeleton(g.n, frozenset(filter(inside, g.edges)))
    if isinstance(g, Pdag):
        return Pdag(
            g.n,
            frozenset(filter(inside, g.directed)),
            frozenset(filter(inside, g.undirected)),
            frozenset(ps for ps in g.possible_sources if keep.issuperset(ps[0])),
        )
    raise GraphError(f"cannot take induced subgraph of {type(g).__name__}")


def induced_cycles(s: Skeleton, max_len: int | None = None, min_len: int = 3) -> list[tuple[int, ...]]:
    """Enumerate chordless cycles of ``s`` with ``min_len <= length <= max_len``.

    Each cycle is reported once, as a tuple in cycle order starting at its
    smallest node and continuing toward the smaller of that node's two cycle
    neighbours. Worst-case cost is exponential in ``n``.
    """
    if max_len is None:
        max_len = s.n
    if max_len < 3:
        raise GraphError("max_len must be at least 3")
    adj = s.adjacency
    found: list[tuple[int, ...]] = []

    def extend(path: list[int], on_path: set[int]):
        start, last = path[0], path[-1]
        for v in sorted(adj[last]):
            if v <= start or v in on_path:
                continue
            # v may touch only the path's last node, and the start when closing.
            if any(v in adj[x] for x in path[1:-1]):
                continue
            if start in adj[v]:
                if len(path) >= 2 and path[1] < v and len(path) + 1 >= min_len:
                    found.append(tuple(path) + (v,))
                continue
            if len(path) + 1 < max_len:
                path.append(v)
                on_path.add(v)
                extend(path, on_path)
                path.pop()
                on_path.discard(v)

    for start in range(s.n):
        for first in sorted(adj[start]):
            if first > start:
                extend([start, first], {start, first})
    return sorted(found, key=lambda c: (len(c), c))
