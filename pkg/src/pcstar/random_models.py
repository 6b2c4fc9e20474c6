"""Seeded random weighted DAGs with bounded in-degree and generic weights."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .errors import GenerationError
from .graph import Dag
from .tropical import WeightedDag


@dataclass(frozen=True)
class GenConfig:
    """Generator settings.

    Node ``v`` gets its in-degree uniformly from ``0..min(d, v)``, unless
    ``edge_prob`` is set, in which case each earlier node becomes a parent with
    that probability (capped at ``d`` parents). Weights are log-uniform on
    ``[weight_low, weight_high]``.
    """

    n: int
    d: int
    seed: int = 0
    edge_prob: float | None = None
    weight_low: float = 0.5
    weight_high: float = 2.0
    max_resamples: int = 100

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not 0 < self.weight_low <= self.weight_high:
            raise ValueError("weight bounds must satisfy 0 < low <= high")
        if self.edge_prob is not None and not 0 <= self.edge_prob <= 1:
            raise ValueError("edge_prob must lie in [0, 1]")


def _topology(cfg: GenConfig, rng: np.random.Generator) -> list[tuple[int, int]]:
    edges = []
    for v in range(1, cfg.n):
        if cfg.edge_prob is None:
            k = int(rng.integers(0, min(cfg.d, v) + 1))
            parents = rng.choice(v, size=k, replace=False) if k else []
        else:
            parents = np.flatnonzero(rng.random(v) < cfg.edge_prob)
            if len(parents) > cfg.d:
                parents = rng.choice(parents, size=cfg.d, replace=False)
        edges.extend((int(p), v) for p in sorted(parents))
    return edges


def random_weighted_dag(cfg: GenConfig) -> WeightedDag:
    rng = np.random.default_rng(cfg.seed)
    edges = _topology(cfg, rng)
    dag = Dag(cfg.n, frozenset(edges))
    lo, hi = np.log(cfg.weight_low), np.log(cfg.weight_high)
    for _ in range(cfg.max_resamples):
        c = np.zeros((cfg.n, cfg.n))
        for u, v in edges:
            c[u, v] = np.exp(rng.uniform(lo, hi))
        w = WeightedDag(dag, c)
        if w.generic:
            return w
    raise GenerationError(f"no generic weights found in {cfg.max_resamples} draws (seed {cfg.seed})")


def replicate_seeds(seed: int, replicates: int) -> list[int]:
    """Per-replicate seeds split off ``seed`` with :class:`numpy.random.SeedSequence`."""
    children = np.random.SeedSequence(seed).spawn(replicates)
    return [int(s.generate_state(1, dtype=np.uint64)[0]) for s in children]


def replicate_suite(cfg: GenConfig, replicates: int) -> Iterator[WeightedDag]:
    for s in replicate_seeds(cfg.seed, replicates):
        yield random_weighted_dag(replace(cfg, seed=s))
