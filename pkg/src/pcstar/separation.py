"""d-, star- and C*-separation, critical DAGs and global Markov properties."""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from .errors import GenericityError, GraphError, ResourceError
from .graph import Dag
from .tropical import WeightedDag

Criterion = Literal["d", "star", "cstar"]
CRITERIA: tuple[Criterion, ...] = ("d", "star", "cstar")

#: Largest ``n - 2`` for which unbounded global Markov enumeration is allowed.
MAX_FREE_NODES = 16


@dataclass(frozen=True, order=True)
class CIStatement:
    """``i`` is independent of ``j`` given ``k``; normalised so that ``i < j``."""

    i: int
    j: int
    k: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        i, j, k = int(self.i), int(self.j), frozenset(int(x) for x in self.k)
        if i == j:
            raise GraphError("a CI statement needs two distinct nodes")
        if i in k or j in k:
            raise GraphError("endpoints may not appear in the conditioning set")
        if i > j:
            i, j = j, i
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "k", k)

    def sort_key(self):
        return (self.i, self.j, len(self.k), tuple(sorted(self.k)))

    def __str__(self):
        return f"{self.i} _||_ {self.j} | {{{','.join(map(str, sorted(self.k)))}}}"


def _check_query(n: int, i: int, j: int, k: Iterable[int]) -> frozenset[int]:
    k = frozenset(k)
    for v in (i, j, *k):
        if not 0 <= v < n:
            raise GraphError(f"node {v} out of range for graph on {n} nodes")
    if i == j:
        raise GraphError("separation query needs two distinct nodes")
    if i in k or j in k:
        raise GraphError("query endpoints may not be in the conditioning set")
    return k


def d_separated(g: Dag, i: int, j: int, k: Iterable[int]) -> bool:
    """d-separation via the moral graph of the ancestral set of ``{i, j} | k``."""
    k = _check_query(g.n, i, j, k)
    keep = {i, j} | set(k)
    for v in list(keep):
        keep |= g.ancestors(v)
    adj: dict[int, set[int]] = {v: set() for v in keep}
    for v in keep:
        pa = [p for p in g.parents[v] if p in keep]
        for p in pa:
            adj[p].add(v)
            adj[v].add(p)
        for a, b in itertools.combinations(pa, 2):
            adj[a].add(b)
            adj[b].add(a)
    seen = {i}
    stack = [i]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v in k or v in seen:
                continue
            if v == j:
                return False
            seen.add(v)
            stack.append(v)
    return True


def star_separated(g: Dag, i: int, j: int, k: Iterable[int]) -> bool:
    """True iff no d-connecting ``i - j`` path with at most one collider exists.

    Simple paths are enumerated depth first; a prefix is abandoned as soon as
    it is blocked or holds a second collider.
    """
    k = _check_query(g.n, i, j, k)
    an_k = set(k)
    for v in k:
        an_k |= g.ancestors(v)
    pa, ch = g.parents, g.children

    # State: current node, whether we arrived through an edge pointing into it,
    # number of colliders so far.
    def search(u: int, into_u: bool, colliders: int, visited: set[int]) -> bool:
        for v in pa[u] | ch[u]:
            if v in visited:
                continue
            out_of_u = v in ch[u]  # u -> v
            if u != i:
                is_collider = into_u and not out_of_u
                if is_collider:
                    if u not in an_k or colliders >= 1:
                        continue
                    c = colliders + 1
                else:
                    if u in k:
                        continue
                    c = colliders
            else:
                c = colliders
            if v == j:
                return True
            visited.add(v)
            if search(v, out_of_u, c, visited):
                return True
            visited.discard(v)
        return False

    return not search(i, False, 0, {i})


def _bits(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << v
    return m


def _require_generic(w: WeightedDag):
    if not w.generic:
        bad = np.argwhere(~w.unique)
        pair = tuple(int(x) for x in bad[0])
        raise GenericityError(f"weights are not generic: critical {pair[0]}->{pair[1]} path is not unique", pair)


def critical_matrix(w: WeightedDag, k: Iterable[int]) -> np.ndarray:
    """Boolean adjacency matrix of the critical DAG of ``w`` given ``k``."""
    _require_generic(w)
    kb = _bits(k)
    masks = w.intermediate_masks
    if masks.dtype == object:
        blocked = np.vectorize(lambda m: (m & kb) != 0, otypes=[bool])(masks)
    else:
        blocked = (masks & np.uint64(kb)) != 0
    d = w.reach & ~blocked
    np.fill_diagonal(d, False)
    return d


@dataclass(frozen=True)
class CriticalDag:
    """Edge ``i -> j`` iff ``j`` is reachable from ``i`` and the critical path avoids ``K`` internally."""

    dag: Dag
    source: WeightedDag
    k: frozenset[int]


def critical_dag(w: WeightedDag, k: Iterable[int]) -> CriticalDag:
    k = frozenset(k)
    d = critical_matrix(w, k)
    edges = frozenset((int(a), int(b)) for a, b in zip(*np.nonzero(d)))
    return CriticalDag(Dag(w.n, edges), w, k)


def _cstar_connected(d: np.ndarray, i: int, j: int, in_k: np.ndarray) -> bool:
    # Patterns (a)-(e) in the critical DAG, all nodes distinct, both orientations.
    if d[i, j] or d[j, i]:
        return True
    n = d.shape[0]
    free = ~in_k
    free[[i, j]] = False
    # (b) p -> i, p -> j with p outside K
    if np.any(d[:, i] & d[:, j] & free):
        return True
    # (c) i -> l <- j with l in K
    if np.any(d[i] & d[j] & in_k):
        return True
    into_i = d[:, i] & free
    into_j = d[:, j] & free
    # Colliders in K reachable in one step from a free parent of i (resp. j).
    l_from_i = d[into_i].any(axis=0) & in_k if into_i.any() else np.zeros(n, dtype=bool)
    l_from_j = d[into_j].any(axis=0) & in_k if into_j.any() else np.zeros(n, dtype=bool)
    # (d) p -> i, p -> l <- j, and the mirror image
    if np.any(l_from_i & d[j]) or np.any(l_from_j & d[i]):
        return True
    # (e) p -> i, p -> l <- q, q -> j with p != q; p == q is already pattern (b)
    return bool(np.any(l_from_i & l_from_j))


def cstar_separated(w: WeightedDag, i: int, j: int, k: Iterable[int]) -> bool:
    """C*-separation: no connecting pattern (a)-(e) in the critical DAG given ``k``."""
    k = _check_query(w.n, i, j, k)
    d = critical_matrix(w, k)
    in_k = np.zeros(w.n, dtype=bool)
    in_k[list(k)] = True
    return not _cstar_connected(d, i, j, in_k)


def separated(model, criterion: Criterion, i: int, j: int, k: Iterable[int]) -> bool:
    if criterion == "cstar":
        if not isinstance(model, WeightedDag):
            raise GraphError("C*-separation needs a weighted DAG")
        return cstar_separated(model, i, j, k)
    g = model.dag if isinstance(model, WeightedDag) else model
    if criterion == "d":
        return d_separated(g, i, j, k)
    if criterion == "star":
        return star_separated(g, i, j, k)
    raise GraphError(f"unknown criterion {criterion!r}")


def global_markov(model, criterion: Criterion, max_cond_size: int | None = None) -> set[CIStatement]:
    """Every separation statement of ``model`` with ``|K| <= max_cond_size``."""
    n = model.n
    if max_cond_size is None:
        if n - 2 > MAX_FREE_NODES:
            raise ResourceError(
                f"enumerating all conditioning sets on {n} nodes visits 2^{n - 2} sets per pair; "
                "pass max_cond_size to cap the enumeration"
            )
        max_cond_size = max(n - 2, 0)
    if criterion == "cstar":
        _require_generic(model)
    out = set()
    for i, j in itertools.combinations(range(n), 2):
        rest = [v for v in range(n) if v not in (i, j)]
        for size in range(min(max_cond_size, len(rest)) + 1):
            for k in itertools.combinations(rest, size):
                if separated(model, criterion, i, j, k):
                    out.add(CIStatement(i, j, frozenset(k)))
    return out


def sorted_statements(statements: Iterable[CIStatement]) -> list[CIStatement]:
    return sorted(statements, key=CIStatement.sort_key)


class SeparationOracle:
    """Memoised separation queries against a hidden model.

    ``calls`` counts every query, ``evaluations`` only the ones that missed the
    cache. Cache insertion is guarded by a lock, so one oracle can serve
    several threads.
    """

    def __init__(self, model, kind: Criterion):
        if kind not in CRITERIA:
            raise GraphError(f"unknown oracle kind {kind!r}")
        if kind == "cstar":
            if not isinstance(model, WeightedDag):
                raise GraphError("a cstar oracle needs a weighted DAG")
            _require_generic(model)
        self.kind = kind
        self.model = model
        self.n = model.n
        self._cache: dict[tuple[int, int, frozenset[int]], bool] = {}
        self._lock = threading.Lock()
        self.calls = 0
        self.evaluations = 0
        self.max_cond_size = 0

    def query(self, i: int, j: int, k: Iterable[int] = ()) -> bool:
        k = frozenset(k)
        if i > j:
            i, j = j, i
        key = (i, j, k)
        with self._lock:
            self.calls += 1
            self.max_cond_size = max(self.max_cond_size, len(k))
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        answer = separated(self.model, self.kind, i, j, k)
        with self._lock:
            if key not in self._cache:
                self._cache[key] = answer
                self.evaluations += 1
        return answer

    __call__ = query

    def stats(self) -> dict[str, int]:
        with self._lock:
            return {
                "calls": self.calls,
                "evaluations": self.evaluations,
                "cache_hits": self.calls - self.evaluations,
                "max_cond_size": self.max_cond_size,
            }


def oracle(model, kind: Criterion) -> SeparationOracle:
    return SeparationOracle(model, kind)
