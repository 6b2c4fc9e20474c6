from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenericityError
from .graph import Dag, Edge
from .tropical import WeightedDag, log_tie


@dataclass(frozen=True)
class ReducedModel:
    """Weighted transitive reduction of ``parent``.

    ``wtr`` keeps exactly the edges that are their own unique critical path,
    with the original weights; ``removed_edges`` lists the rest.
    """

    wtr: WeightedDag
    parent: WeightedDag
    removed_edges: tuple[Edge, ...]


def _best_bypass(w: WeightedDag, u: int, v: int):
    """Weight of the heaviest ``u -> v`` path with at least one intermediate node."""
    mids = [m for m in range(w.n) if m not in (u, v) and w.reach[u, m] and w.reach[m, v]]
    if not mids:
        return None
    if w.exact:
        return max(w.kleene[u, m] * w.kleene[m, v] for m in mids)
    return max(w.log_kleene[u, m] + w.log_kleene[m, v] for m in mids)


def weighted_transitive_reduction(w: WeightedDag) -> ReducedModel:
    """Drop every edge ``u -> v`` that some longer directed path outweighs.

    Raises :class:`GenericityError` when an edge ties with its best bypass.
    """
    keep, removed = [], []
    for u, v in sorted(w.edges):
        bypass = _best_bypass(w, u, v)
        if bypass is None:
            keep.append((u, v))
            continue
        own = w.c[u, v] if w.exact else w.log_c[u, v]
        tie = own == bypass if w.exact else log_tie(own, bypass)
        if tie:
            raise GenericityError(f"edge {u}->{v} ties with a longer path", pair=(u, v))
        (keep if own > bypass else removed).append((u, v))
    c = np.array(w.c, copy=True)
    for e in removed:
        c[e] = 0
    wtr = WeightedDag(Dag(w.n, frozenset(keep)), c, exact=w.exact)
    return ReducedModel(wtr, w, tuple(removed))
