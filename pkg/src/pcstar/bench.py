"""Random-model benchmark: one CSV row of averages per (n, d) cell."""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence, TextIO

import numpy as np

from .discovery import PcstarOptions, pcstar_variants, recovered_edges
from .errors import GenerationError, GenericityError, InconsistencyError
from .random_models import GenConfig, random_weighted_dag, replicate_seeds
from .reduction import weighted_transitive_reduction
from .separation import SeparationOracle

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "n",
    "d",
    "replicates",
    "mean_edges_G",
    "mean_edges_Gtr",
    "mean_recovered_plain",
    "mean_recovered_cycles",
    "mean_queries",
    "mean_ms",
    "failures",
)


@dataclass
class ReplicateOutcome:
    n: int
    d: int
    replicate: int
    seed: int
    status: str = "ok"
    edges_G: int = 0
    edges_Gtr: int = 0
    directed_plain: int = 0
    undirected_plain: int = 0
    recovered_plain: int = 0
    directed_cycles: int = 0
    undirected_cycles: int = 0
    recovered_cycles: int = 0
    cycles_oriented: int = 0
    queries: int = 0
    ms: float = 0.0


RAW_COLUMNS = tuple(f.name for f in fields(ReplicateOutcome))


@dataclass
class BenchRow:
    n: int
    d: int
    replicates: int
    mean_edges_G: float
    mean_edges_Gtr: float
    mean_recovered_plain: float
    mean_recovered_cycles: float
    mean_queries: float
    mean_ms: float
    failures: int


def cell_seed(seed: int, n: int, d: int) -> int:
    return int(np.random.SeedSequence([seed, n, d]).generate_state(1, dtype=np.uint64)[0])


def run_replicate(n: int, d: int, replicate: int, seed: int, opts: PcstarOptions = PcstarOptions()) -> ReplicateOutcome:
    out = ReplicateOutcome(n, d, replicate, seed)
    try:
        w = random_weighted_dag(GenConfig(n=n, d=d, seed=seed))
        truth = weighted_transitive_reduction(w).wtr.dag
        oracle = SeparationOracle(w, "cstar")
        plain, cyc = pcstar_variants(oracle, n, opts)
    except (GenerationError, GenericityError, InconsistencyError) as exc:
        log.warning("n=%d d=%d replicate %d failed: %s", n, d, replicate, exc)
        out.status = f"{type(exc).__name__}: {exc}"
        return out
    out.edges_G = len(w.edges)
    out.edges_Gtr = len(truth.edges)
    out.directed_plain = len(plain.cpdag.directed)
    out.undirected_plain = len(plain.cpdag.undirected)
    out.recovered_plain = recovered_edges(plain.cpdag, truth)
    out.directed_cycles = len(cyc.cpdag.directed)
    out.undirected_cycles = len(cyc.cpdag.undirected)
    out.recovered_cycles = recovered_edges(cyc.cpdag, truth)
    out.cycles_oriented = sum(1 for _, s in cyc.oriented_cycles if isinstance(s, int))
    out.queries = cyc.stats["queries"]
    out.ms = cyc.stats["wall_ms"]
    return out


def _run(args):
    return run_replicate(*args)


def aggregate(n: int, d: int, outcomes: Sequence[ReplicateOutcome]) -> BenchRow:
    ok = [o for o in outcomes if o.status == "ok"]

    def mean(attr):
        return float(np.mean([getattr(o, attr) for o in ok])) if ok else float("nan")

    return BenchRow(
        n=n,
        d=d,
        replicates=len(outcomes),
        mean_edges_G=mean("edges_G"),
        mean_edges_Gtr=mean("edges_Gtr"),
        mean_recovered_plain=mean("recovered_plain"),
        mean_recovered_cycles=mean("recovered_cycles"),
        mean_queries=mean("queries"),
        mean_ms=mean("ms"),
        failures=len(outcomes) - len(ok),
    )


def run_bench(
    nodes: Iterable[int],
    degrees: Iterable[int],
    replicates: int,
    seed: int,
    workers: int = 1,
    opts: PcstarOptions = PcstarOptions(),
) -> tuple[list[BenchRow], list[ReplicateOutcome]]:
    """Run every (n, d) cell; results do not depend on ``workers``."""
    cells = [(n, d) for n in nodes for d in degrees]
    jobs = []
    for n, d in cells:
        for r, s in enumerate(replicate_seeds(cell_seed(seed, n, d), replicates)):
            jobs.append((n, d, r, s, opts))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run, jobs, chunksize=1))
    else:
        outcomes = [_run(j) for j in jobs]
    rows = []
    for n, d in cells:
        rows.append(aggregate(n, d, [o for o in outcomes if (o.n, o.d) == (n, d)]))
    return rows, outcomes


def _fmt(x):
    return f"{x:.4f}" if isinstance(x, float) else str(x)


def write_rows(fh: TextIO, rows: Sequence[BenchRow]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in CSV_COLUMNS])


def write_raw(fh: TextIO, outcomes: Sequence[ReplicateOutcome]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RAW_COLUMNS)
    for o in outcomes:
        d = asdict(o)
        writer.writerow([_fmt(d[c]) for c in RAW_COLUMNS])


def read_rows(fh: TextIO) -> list[dict]:
    return list(csv.DictReader(fh))
