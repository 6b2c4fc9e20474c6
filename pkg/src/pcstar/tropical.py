"""Max-times path algebra on weighted DAGs.

Float weights are combined in the log domain (max-plus), which keeps products
of long paths finite. Exact mode keeps :class:`fractions.Fraction` weights in
the original max-times domain and compares them without tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Literal, Mapping

import numpy as np

from .errors import GenericityError, GraphError
from .graph import Dag, Edge

#: Relative tolerance on log-weights below which two path weights tie.
TIE_RTOL = 1e-9


def log_tie(a: float, b: float) -> bool:
    """Whether two log-domain weights are equal up to :data:`TIE_RTOL`."""
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= TIE_RTOL * max(1.0, abs(a))


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    kind: Literal["directed", "trek", "general"] = "directed"
    # Set when another path ties with this one for the maximum weight.
    tied: bool = False

    def __len__(self):
        return len(self.nodes)

    @property
    def intermediates(self) -> tuple[int, ...]:
        return self.nodes[1:-1]


def _closure_log(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Max-plus closure by repeated squaring, with predecessor tracking.

    ``a`` holds log-weights with ``-inf`` for missing edges. Returns the star
    (diagonal 0) and ``pred`` where ``pred[i, j]`` is the node before ``j`` on
    the recorded best ``i -> j`` path (``-1`` on the diagonal and when
    unreachable).
    """
    n = a.shape[0]
    star = np.array(a, dtype=float)
    np.fill_diagonal(star, 0.0)
    pred = np.where(np.isfinite(star), np.arange(n)[:, None], -1)
    np.fill_diagonal(pred, -1)
    if n == 0:
        return star, pred
    cols = np.arange(n)[None, :]
    for _ in range(max(1, math.ceil(math.log2(n)))):
        via = star[:, :, None] + star[None, :, :]
        mid = via.argmax(axis=1)
        best = np.take_along_axis(via, mid[:, None, :], axis=1)[:, 0, :]
        tol = TIE_RTOL * np.maximum(1.0, np.abs(np.where(np.isfinite(star), star, 0.0)))
        improved = best > star + tol
        improved &= ~(np.isneginf(star) & np.isneginf(best))
        if not improved.any():
            break
        pred = np.where(improved, pred[mid, cols], pred)
        star = np.where(improved, best, star)
    return star, pred


def _closure_exact(a: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[list[int]]]:
    n = len(a)
    star = [[Fraction(1) if i == j else Fraction(a[i][j]) for j in range(n)] for i in range(n)]
    pred = [[i if (i != j and star[i][j] > 0) else -1 for j in range(n)] for i in range(n)]
    for _ in range(max(1, math.ceil(math.log2(n))) if n else 0):
        changed = False
        new = [row[:] for row in star]
        new_pred = [row[:] for row in pred]
        for i in range(n):
            for j in range(n):
                for m in range(n):
                    w = star[i][m] * star[m][j]
                    if w > new[i][j]:
                        new[i][j] = w
                        new_pred[i][j] = pred[m][j]
                        changed = True
        star, pred = new, new_pred
        if not changed:
            break
    return star, pred


def tropical_star(matrix) -> np.ndarray:
    """Kleene star of a non-negative max-times matrix whose support is acyclic.

    Zero entries mean "no edge"; the diagonal of the result is 1.
    """
    m = np.asarray(matrix)
    if m.dtype == object:
        star, _ = _closure_exact([list(row) for row in m])
        return np.array(star, dtype=object)
    with np.errstate(divide="ignore"):
        logm = np.log(m.astype(float))
    star, _ = _closure_log(logm)
    return np.exp(star)


class WeightedDag:
    """A DAG with strictly positive edge weights ``c[u, v]`` on ``u -> v``.

    The Kleene star, critical-path predecessor table and per-pair uniqueness
    flags are computed once at construction.
    """

    def __init__(self, dag: Dag, c, exact: bool = False):
        self.dag = dag
        self.exact = exact
        n = dag.n
        if exact:
            cm = np.empty((n, n), dtype=object)
            src = np.asarray(c, dtype=object) if n else np.empty((0, 0), dtype=object)
            for i in range(n):
                for j in range(n):
                    cm[i, j] = Fraction(src[i, j])
        else:
            cm = np.array(c, dtype=float).reshape(n, n)
        for i in range(n):
            for j in range(n):
                present = (i, j) in dag.edges
                w = cm[i, j]
                if present and not w > 0:
                    raise GraphError(f"edge {i}->{j} needs a strictly positive weight, got {w}")
                if not present and w != 0:
                    raise GraphError(f"weight {w} on non-edge {i}->{j}")
                if not exact and present and not math.isfinite(w):
                    raise GraphError(f"edge {i}->{j} has non-finite weight")
        cm.flags.writeable = False
        self.c = cm
        self._build()

    @classmethod
    def from_weights(cls, n: int, weights: Mapping[Edge, float], exact: bool = False) -> WeightedDag:
        dag = Dag(n, frozenset(weights))
        if exact:
            c = np.full((n, n), Fraction(0), dtype=object)
            for (u, v), w in weights.items():
                c[u, v] = Fraction(w)
        else:
            c = np.zeros((n, n))
            for (u, v), w in weights.items():
                c[u, v] = w
        return cls(dag, c, exact=exact)

    @property
    def n(self) -> int:
        return self.dag.n

    @property
    def edges(self) -> frozenset[Edge]:
        return self.dag.edges

    def weight(self, u: int, v: int):
        return self.c[u, v]

    def weights(self) -> dict[Edge, float]:
        return {e: self.c[e] for e in sorted(self.dag.edges)}

    def _build(self):
        n = self.n
        if self.exact:
            star, pred = _closure_exact([list(row) for row in self.c])
            self._score = star
            self.kleene = np.array(star, dtype=object).reshape(n, n)
            self.reach = self.kleene > 0
        else:
            with np.errstate(divide="ignore"):
                logc = np.log(self.c)
            self.log_c = logc
            star, pred = _closure_log(logc)
            self.log_kleene = star
            self._score = star
            self.kleene = np.exp(star)
            self.reach = np.isfinite(star)
        self.crit_parent = np.asarray(pred, dtype=int).reshape(n, n)
        self.unique = self._uniqueness()

    def _combine(self, a, b):
        return a * b if self.exact else a + b

    def _ties(self, a, b) -> bool:
        return a == b if self.exact else log_tie(a, b)

    def _uniqueness(self) -> np.ndarray:
        # The critical i->j path is unique iff its last edge p->j is the unique
        # maximiser over parents p and the critical i->p path is itself unique.
        n = self.n
        unique = np.ones((n, n), dtype=bool)
        score = self._score
        if self.exact:
            logc = self.c
        else:
            logc = self.log_c
        for j in self.dag.topological_order:
            parents = sorted(self.dag.parents[j])
            for i in range(n):
                if i == j or not self.reach[i, j]:
                    continue
                cands = [(self._combine(score[i][p], logc[p, j]), p) for p in parents if self.reach[i, p]]
                cands.sort(key=lambda t: t[0], reverse=True)
                best, p_best = cands[0]
                ok = bool(unique[i, p_best])
                if len(cands) > 1 and self._ties(best, cands[1][0]):
                    ok = False
                unique[i, j] = ok
        unique.flags.writeable = False
        return unique

    @cached_property
    def generic(self) -> bool:
        return bool(self.unique.all())

    @cached_property
    def intermediate_masks(self) -> np.ndarray:
        """Bitmask of the intermediate nodes on each recorded critical path."""
        n = self.n
        dtype = np.uint64 if n <= 64 else object
        masks = np.zeros((n, n), dtype=dtype)
        for i in range(n):
            for j in range(n):
                if i == j or not self.reach[i, j]:
                    continue
                m = 0
                v = int(self.crit_parent[i, j])
                while v != i:
                    m |= 1 << v
                    v = int(self.crit_parent[i, v])
                masks[i, j] = m
        masks.flags.writeable = False
        return masks

    def __repr__(self):
        return f"WeightedDag(n={self.n}, edges={len(self.edges)}, exact={self.exact})"


def path_weight(w: WeightedDag, p: Path | tuple[int, ...]):
    """Product of edge weights along a directed path (1 for a single node)."""
    nodes = p.nodes if isinstance(p, Path) else tuple(p)
    if not nodes:
        raise GraphError("empty path")
    if len(set(nodes)) != len(nodes):
        raise GraphError(f"path {nodes} repeats a node")
    total = Fraction(1) if w.exact else 1.0
    for u, v in zip(nodes, nodes[1:]):
        if (u, v) not in w.edges:
            raise GraphError(f"{u}->{v} is not an edge, so {nodes} is not a directed path")
        total = total * w.c[u, v]
    return total


def kleene_star(w: WeightedDag) -> np.ndarray:
    """Critical-path weights ``c*[i, j]``: 0 if unreachable, 1 on the diagonal."""
    return w.kleene


def critical_path(w: WeightedDag, i: int, j: int, strict: bool = True) -> Path | None:
    """The maximum-weight directed ``i -> j`` path, or None if unreachable.

    With ``strict`` a tie raises :class:`GenericityError`; otherwise one of the
    tied paths is returned with ``tied=True``.
    """
    for v in (i, j):
        if not 0 <= v < w.n:
            raise GraphError(f"node {v} out of range")
    if i == j:
        return Path((i,))
    if not w.reach[i, j]:
        return None
    tied = not w.unique[i, j]
    if tied and strict:
        raise GenericityError(f"critical {i}->{j} path is not unique", pair=(i, j))
    nodes = [j]
    v = j
    while v != i:
        v = int(w.crit_parent[i, v])
        nodes.append(v)
    return Path(tuple(reversed(nodes)), tied=tied)


def is_generic(w: WeightedDag) -> bool:
    """True iff every reachable ordered pair has a unique critical path."""
    return w.generic
