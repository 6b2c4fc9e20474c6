"""PC and PCstar structure learning driven by a separation oracle.

Every phase talks to the hidden model only through ``oracle.query(i, j, K)``.
Iteration order is deterministic: edges and triples are visited in sorted
order and conditioning sets in colex order.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import InconsistencyError
from .graph import Dag, Edge, Pdag, Skeleton, induced_cycles, unshielded_triples

log = logging.getLogger(__name__)

Triple = tuple[int, int, int]
#: Largest graph on which cycle orientation is switched on by default.
CYCLES_DEFAULT_MAX_N = 20


def colex(pool: Iterable[int], size: int) -> list[tuple[int, ...]]:
    """Size-``size`` subsets of ``pool`` in colexicographic order."""
    return sorted(itertools.combinations(sorted(pool), size), key=lambda t: t[::-1])


class SepsetTable(dict):
    """Maps an unordered pair ``(i, j)``, ``i < j``, to the set that separated it."""

    def get_pair(self, i: int, j: int):
        return self.get((min(i, j), max(i, j)))


@dataclass
class DiscoveryResult:
    cpdag: Pdag
    sepsets: SepsetTable
    colliders: frozenset[Triple] = frozenset()
    # (cycle, source) when a source was identified, (cycle, (k1, k2)) otherwise
    oriented_cycles: list[tuple[tuple[int, ...], Union[int, tuple[int, int]]]] = field(default_factory=list)
    stats: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# mutable working graph


class _Work:
    def __init__(self, n: int, directed=(), undirected=(), possible_sources=()):
        self.n = n
        self.directed: set[Edge] = set(directed)
        self.undirected: set[Edge] = {(min(u, v), max(u, v)) for u, v in undirected}
        self.possible_sources = set(possible_sources)

    @classmethod
    def of(cls, p: Pdag) -> _Work:
        return cls(p.n, p.directed, p.undirected, p.possible_sources)

    def freeze(self) -> Pdag:
        return Pdag(self.n, frozenset(self.directed), frozenset(self.undirected), frozenset(self.possible_sources))

    def adjacent(self, u, v) -> bool:
        return (u, v) in self.directed or (v, u) in self.directed or (min(u, v), max(u, v)) in self.undirected

    def is_und(self, u, v) -> bool:
        return (min(u, v), max(u, v)) in self.undirected

    def parents(self, v) -> set[int]:
        return {a for a, b in self.directed if b == v}

    def children(self, v) -> set[int]:
        return {b for a, b in self.directed if a == v}

    def und_neighbors(self, v) -> set[int]:
        return {b if a == v else a for a, b in self.undirected if v in (a, b)}

    def neighbors(self, v) -> set[int]:
        return self.parents(v) | self.children(v) | self.und_neighbors(v)

    def reaches(self, src, dst) -> bool:
        """Directed path ``src -> ... -> dst`` through directed edges."""
        stack, seen = [src], {src}
        while stack:
            u = stack.pop()
            if u == dst:
                return True
            for a, b in self.directed:
                if a == u and b not in seen:
                    seen.add(b)
                    stack.append(b)
        return False

    def orient(self, u, v) -> bool:
        """Turn ``u - v`` into ``u -> v``; refuses if that closes a directed cycle."""
        key = (min(u, v), max(u, v))
        if key not in self.undirected:
            return (u, v) in self.directed
        if self.reaches(v, u):
            log.debug("skipping %d->%d: would close a directed cycle", u, v)
            return False
        self.undirected.discard(key)
        self.directed.add((u, v))
        return True


def detected_colliders(p: Pdag) -> set[Triple]:
    """Unshielded colliders ``a -> b <- c`` (``a < c``) among the directed edges of ``p``."""
    adj = p.skeleton.adjacency
    parents: dict[int, list[int]] = {}
    for a, b in p.directed:
        parents.setdefault(b, []).append(a)
    out = set()
    for b, pa in parents.items():
        for a, c in itertools.combinations(sorted(pa), 2):
            if c not in adj[a]:
                out.add((a, b, c))
    return out


# ---------------------------------------------------------------------------
# skeleton


def pc_skeleton(oracle, n: int, max_cond: int | None = None, stats: dict | None = None) -> tuple[Skeleton, SepsetTable]:
    """Skeleton learning by edge deletion from the complete graph.

    At level ``l`` each remaining edge ``i - j`` is tested against every
    ``K`` of size ``l`` lying inside ``adj(i) - j`` or inside ``adj(j) - i``;
    the first separating ``K`` deletes the edge and is stored as its sepset.
    Levels continue until no edge has enough neighbours (or ``max_cond``).
    """
    adj = [set(range(n)) - {v} for v in range(n)]
    sepsets = SepsetTable()
    max_queried = 0
    calls = 0
    level = 0
    while max_cond is None or level <= max_cond:
        testable = False
        for i, j in itertools.combinations(range(n), 2):
            if j not in adj[i]:
                continue
            ai, aj = adj[i] - {j}, adj[j] - {i}
            if len(ai) < level and len(aj) < level:
                continue
            testable = True
            cands = set(itertools.combinations(sorted(ai), level)) | set(itertools.combinations(sorted(aj), level))
            for k in sorted(cands, key=lambda t: t[::-1]):
                calls += 1
                max_queried = max(max_queried, level)
                if oracle.query(i, j, k):
                    adj[i].discard(j)
                    adj[j].discard(i)
                    sepsets[(i, j)] = frozenset(k)
                    break
        if not testable:
            break
        level += 1
    skel = Skeleton(n, frozenset((u, v) for u in range(n) for v in adj[u] if u < v))
    if stats is not None:
        stats["skeleton_queries"] = calls
        stats["max_cond_queried"] = max_queried
        stats["max_sepset_size"] = max((len(k) for k in sepsets.values()), default=0)
        stats["levels"] = level
    return skel, sepsets


# ---------------------------------------------------------------------------
# collider orientation


def _apply_colliders(skel: Skeleton, triples: Iterable[Triple]) -> Pdag:
    work = _Work(skel.n, (), skel.edges)
    for i, k, j in sorted(triples):
        for a in (i, j):
            if work.is_und(a, k):
                work.orient(a, k)
            elif (k, a) in work.directed:
                log.warning("collider %d->%d<-%d conflicts with an earlier orientation", i, k, j)
    return work.freeze()


def orient_colliders_sepset(skel: Skeleton, sepsets: SepsetTable) -> Pdag:
    """Classic PC rule: ``i - k - j`` becomes ``i -> k <- j`` when ``k`` is not in Sepset(i, j).

    Under C*-separation this rule can orient non-colliders; :func:`orient_colliders`
    is the safe replacement.
    """
    triples = [(i, k, j) for i, k, j in unshielded_triples(skel) if k not in sepsets.get_pair(i, j)]
    return _apply_colliders(skel, triples)


def is_collider(skel: Skeleton, oracle, i: int, k: int, j: int, max_extra: int | None = None) -> bool:
    """True iff no ``S`` with ``k in S``, ``S`` inside ``adj(i) | adj(j)``, separates ``i`` and ``j``."""
    pool = sorted((skel.adjacency[i] | skel.adjacency[j]) - {i, j, k})
    top = len(pool) if max_extra is None else min(max_extra, len(pool))
    for size in range(top + 1):
        for extra in colex(pool, size):
            if oracle.query(i, j, (k, *extra)):
                return False
    return True


def orient_colliders(skel: Skeleton, oracle, sepsets: SepsetTable | None = None, max_extra: int | None = None) -> Pdag:
    """Orient ``i -> k <- j`` for the unshielded triples that no set containing ``k`` separates.

    ``sepsets`` is accepted for interface symmetry with the classic rule and is
    not consulted.
    """
    triples = [t for t in sorted(unshielded_triples(skel)) if is_collider(skel, oracle, *t, max_extra=max_extra)]
    return _apply_colliders(skel, triples)


# ---------------------------------------------------------------------------
# induced cycles


def _cycle_colliders(cycle: tuple[int, ...], directed: frozenset[Edge]) -> list[Triple]:
    m = len(cycle)
    out = []
    for idx in range(m):
        a, b, c = cycle[idx - 1], cycle[idx], cycle[(idx + 1) % m]
        if (a, b) in directed and (c, b) in directed:
            out.append((a, b, c))
    return out


def _external_collider_free_walk(adj, colliders: set[Triple], w: int, sink: int, inside: frozenset[int]) -> bool:
    # Polynomial over-approximation: searches walks instead of simple paths.
    def blocked(a, b, c):
        return (a, b, c) in colliders or (c, b, a) in colliders

    start = [(w, v, v not in inside) for v in adj[w]]
    seen = set()
    stack = []
    for state in start:
        if state[1] == sink:
            if state[2]:
                return True
            continue
        if state not in seen:
            seen.add(state)
            stack.append(state)
    while stack:
        prev, cur, outside = stack.pop()
        for v in adj[cur]:
            if v == prev or blocked(prev, cur, v):
                continue
            nxt_out = outside or v not in inside
            if v == sink:
                if nxt_out:
                    return True
                continue
            state = (cur, v, nxt_out)
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return False


def _external_collider_free_path(adj, colliders: set[Triple], w: int, sink: int, inside: frozenset[int], budget: int) -> bool | None:
    """Exact simple-path search; None when the step budget runs out."""
    steps = 0

    def blocked(a, b, c):
        return (a, b, c) in colliders or (c, b, a) in colliders

    def dfs(prev, cur, outside, visited) -> bool | None:
        nonlocal steps
        for v in sorted(adj[cur]):
            if v in visited or (prev is not None and blocked(prev, cur, v)):
                continue
            steps += 1
            if steps > budget:
                return None
            nxt_out = outside or v not in inside
            if v == sink:
                if nxt_out:
                    return True
                continue
            visited.add(v)
            found = dfs(cur, v, nxt_out, visited)
            visited.discard(v)
            if found is None or found:
                return found
        return False

    return dfs(None, w, False, {w})


def _externally_blocked(p: Pdag, cycle: tuple[int, ...], sink: int, budget: int = 200_000) -> bool:
    """Every ``w - sink`` path that leaves the cycle passes a detected unshielded collider."""
    adj = p.skeleton.adjacency
    colliders = detected_colliders(p)
    inside = frozenset(cycle)
    for w in cycle:
        if w == sink:
            continue
        if not _external_collider_free_walk(adj, colliders, w, sink, inside):
            continue
        found = _external_collider_free_path(adj, colliders, w, sink, inside, budget)
        if found is None:
            log.info("path budget exhausted on cycle %s; treating it as not orientable", cycle)
            return False
        if found:
            return False
    return True


def find_orientable_cycles(p: Pdag, max_len: int | None = None) -> list[tuple[tuple[int, ...], Triple]]:
    """Induced cycles with exactly one detected collider that pass the external-path check.

    Returns ``(cycle, (k1, k, k2))`` pairs, the cycle in order starting at its
    smallest node.
    """
    out = []
    for cycle in induced_cycles(p.skeleton, max_len=max_len, min_len=4):
        found = _cycle_colliders(cycle, p.directed)
        if len(found) != 1:
            continue
        k1, k, k2 = found[0]
        if _externally_blocked(p, cycle, k):
            out.append((cycle, (min(k1, k2), k, max(k1, k2))))
    return out


def _ancestor_pool(p: Pdag, cycle: Iterable[int]) -> list[int]:
    """Nodes outside the cycle that reach it along directed or undirected edges."""
    work = _Work.of(p)
    inside = set(cycle)
    seen = set(inside)
    stack = list(inside)
    while stack:
        v = stack.pop()
        for u in work.parents(v) | work.und_neighbors(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return sorted(seen - inside)


def _witness_sets(p: Pdag, cycle, pool_limit: int, cap: int) -> Iterator[tuple[int, ...]]:
    pool = _ancestor_pool(p, cycle)
    outside = sorted(set(range(p.n)) - set(cycle))
    tried = set()

    def fresh(ks):
        for k in ks:
            if k not in tried:
                tried.add(k)
                yield k

    if pool:
        yield from fresh([tuple(pool)])
    top = len(pool) if len(pool) <= pool_limit else min(cap, len(pool))
    for size in range(top + 1):
        yield from fresh(colex(pool, size))
    for size in range(min(cap, len(outside)) + 1):
        yield from fresh(colex(outside, size))


def witness_counts(
    p: Pdag, cycle: tuple[int, ...], collider: Triple, oracle, pool_limit: int = 10, cap: int = 2
) -> dict[int, int]:
    """For each cycle node ``i`` other than the collider, how many ``j`` in the
    cycle admit some ``K`` outside it with ``i`` and the sink separated given ``{j} | K``."""
    k1, k, k2 = collider
    witness_sets = list(_witness_sets(p, cycle, pool_limit, cap))
    counts = {}
    for i in cycle:
        if i in (k1, k, k2):
            continue
        count = 0
        for j in cycle:
            if j in (i, k):
                continue
            if any(oracle.query(i, k, (j, *extra)) for extra in witness_sets):
                count += 1
        counts[i] = count
    return counts


def _orient_from_source(work: _Work, cycle: tuple[int, ...], source: int, sink: int):
    m = len(cycle)
    start = cycle.index(source)
    for step in (1, -1):
        idx = start
        while cycle[idx] != sink:
            nxt = (idx + step) % m
            u, v = cycle[idx], cycle[nxt]
            if (v, u) in work.directed:
                raise InconsistencyError(f"cycle {cycle}: edge {v}->{u} contradicts source {source}", cycle=cycle)
            if not work.orient(u, v):
                raise InconsistencyError(f"cycle {cycle}: cannot orient {u}->{v}", cycle=cycle)
            idx = nxt


def cycle_source(counts: dict[int, int], cycle, collider: Triple) -> int | tuple[int, int]:
    """The unique maximiser of the witness counts, or ``(k1, k2)`` when all are zero."""
    k1, _, k2 = collider
    if not counts or max(counts.values()) == 0:
        return (k1, k2)
    top = max(counts.values())
    winners = [i for i, c in counts.items() if c == top]
    if len(winners) > 1:
        raise InconsistencyError(f"cycle {cycle}: witness counts tie between {winners}", cycle=cycle)
    return winners[0]


def orient_cycle(
    p: Pdag, cycle: tuple[int, ...], collider: Triple, oracle, pool_limit: int = 10, cap: int = 2
) -> Pdag:
    """Orient an orientable cycle away from its source, or mark ``k1``/``k2`` as possible sources."""
    counts = witness_counts(p, cycle, collider, oracle, pool_limit, cap)
    return _apply_cycle(p, cycle, collider, cycle_source(counts, cycle, collider))


def _apply_cycle(p: Pdag, cycle, collider, source) -> Pdag:
    work = _Work.of(p)
    if isinstance(source, tuple):
        work.possible_sources.add((tuple(cycle), source))
    else:
        _orient_from_source(work, tuple(cycle), source, collider[1])
    return work.freeze()


# ---------------------------------------------------------------------------
# orientation closure


def _rule_chain(w: _Work) -> bool:
    # a -> b - c, a and c non-adjacent: b -> c
    for a, b in sorted(w.directed):
        for c in sorted(w.und_neighbors(b)):
            if c != a and not w.adjacent(a, c) and w.orient(b, c):
                return True
    return False


def _rule_transitive(w: _Work) -> bool:
    # a -> b -> c with a - c: a -> c
    for a, c in sorted(w.undirected):
        for x, y in ((a, c), (c, a)):
            if w.children(x) & w.parents(y) and w.orient(x, y):
                return True
    return False


def _rule_diamond(w: _Work) -> bool:
    # a - b, a - c, b -> d <- c, a - d, b and c non-adjacent: a -> d
    for a, d in sorted(w.undirected):
        for x, y in ((a, d), (d, a)):
            cands = sorted(w.und_neighbors(x) & w.parents(y))
            for b, c in itertools.combinations(cands, 2):
                if not w.adjacent(b, c) and w.orient(x, y):
                    return True
    return False


def meek_rules(p: Pdag) -> Pdag:
    """Close ``p`` under the chain, transitivity and diamond orientation rules."""
    work = _Work.of(p)
    while _rule_chain(work) or _rule_transitive(work) or _rule_diamond(work):
        pass
    return work.freeze()


# ---------------------------------------------------------------------------
# pipelines


def _oracle_calls(oracle) -> int:
    return oracle.stats()["calls"] if hasattr(oracle, "stats") else 0


def pc(oracle, n: int, max_cond: int | None = None) -> DiscoveryResult:
    """Classic PC: skeleton, sepset-based colliders, orientation closure."""
    t0 = time.perf_counter()
    calls0 = _oracle_calls(oracle)
    stats: dict = {}
    skel, sepsets = pc_skeleton(oracle, n, max_cond, stats)
    with_colliders = orient_colliders_sepset(skel, sepsets)
    cpdag = meek_rules(with_colliders)
    stats["queries"] = _oracle_calls(oracle) - calls0
    stats["wall_ms"] = (time.perf_counter() - t0) * 1e3
    return DiscoveryResult(cpdag, sepsets, frozenset(detected_colliders(with_colliders)), [], stats)


@dataclass(frozen=True)
class PcstarOptions:
    cycles: bool | None = None  # None: on when n <= CYCLES_DEFAULT_MAX_N
    max_cycle_len: int | None = None
    max_cond: int | None = None
    max_collider_extra: int | None = None
    witness_pool_limit: int = 10
    witness_cap: int = 2


def _orient_cycles(p: Pdag, oracle, opts: PcstarOptions):
    oriented = []
    current = p
    for cycle, collider in find_orientable_cycles(p, opts.max_cycle_len):
        counts = witness_counts(current, cycle, collider, oracle, opts.witness_pool_limit, opts.witness_cap)
        source = cycle_source(counts, cycle, collider)
        current = _apply_cycle(current, cycle, collider, source)
        oriented.append((cycle, source))
    return current, oriented


def pcstar_variants(oracle, n: int, opts: PcstarOptions = PcstarOptions()) -> tuple[DiscoveryResult, DiscoveryResult]:
    """Run PCstar once without and once with cycle orientation, sharing the first two phases."""
    t0 = time.perf_counter()
    calls0 = _oracle_calls(oracle)
    stats: dict = {}
    skel, sepsets = pc_skeleton(oracle, n, opts.max_cond, stats)
    with_colliders = orient_colliders(skel, oracle, sepsets, opts.max_collider_extra)
    colliders = frozenset(detected_colliders(with_colliders))
    plain = meek_rules(with_colliders)
    t1 = time.perf_counter()
    plain_stats = dict(stats, queries=_oracle_calls(oracle) - calls0, wall_ms=(t1 - t0) * 1e3, cycles=False)
    cyc_pdag, oriented = _orient_cycles(with_colliders, oracle, opts)
    cyc = meek_rules(cyc_pdag)
    t2 = time.perf_counter()
    cyc_stats = dict(stats, queries=_oracle_calls(oracle) - calls0, wall_ms=(t2 - t0) * 1e3, cycles=True)
    return (
        DiscoveryResult(plain, sepsets, colliders, [], plain_stats),
        DiscoveryResult(cyc, sepsets, colliders, oriented, cyc_stats),
    )


def pcstar(oracle, n: int, opts: PcstarOptions | None = None, **kwargs) -> DiscoveryResult:
    """Skeleton, collider detection, optional induced-cycle orientation, orientation closure.

    Keyword arguments override fields of :class:`PcstarOptions`.
    """
    opts = opts or PcstarOptions()
    if kwargs:
        opts = PcstarOptions(**{**opts.__dict__, **kwargs})
    cycles = opts.cycles if opts.cycles is not None else n <= CYCLES_DEFAULT_MAX_N
    t0 = time.perf_counter()
    calls0 = _oracle_calls(oracle)
    stats: dict = {}
    skel, sepsets = pc_skeleton(oracle, n, opts.max_cond, stats)
    current = orient_colliders(skel, oracle, sepsets, opts.max_collider_extra)
    colliders = frozenset(detected_colliders(current))
    oriented = []
    if cycles:
        current, oriented = _orient_cycles(current, oracle, opts)
    cpdag = meek_rules(current)
    stats.update(queries=_oracle_calls(oracle) - calls0, wall_ms=(time.perf_counter() - t0) * 1e3, cycles=cycles)
    return DiscoveryResult(cpdag, sepsets, colliders, oriented, stats)


def recovered_edges(cpdag: Pdag, truth: Dag) -> int:
    """Edges of ``truth`` that ``cpdag`` directs the same way."""
    return len(cpdag.directed & truth.edges)
