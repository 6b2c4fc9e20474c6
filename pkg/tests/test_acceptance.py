"""Acceptance suite: one test per criterion, each logging a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also repeated in the terminal summary.
"""

import csv
import functools
import json
import time

import numpy as np

from conftest import CASSIOPEIA, DIAMOND21_CSTAR, DIAMOND_CSTAR, collider_cycle, dag, shift, stmt, weighted
from pcstar import (
    GenConfig,
    SeparationOracle,
    WeightedDag,
    find_orientable_cycles,
    global_markov,
    orient_colliders,
    orient_colliders_sepset,
    orient_cycle,
    pc,
    pc_skeleton,
    pcstar,
    random_weighted_dag,
    skeleton,
    weighted_transitive_reduction,
)
from pcstar.cli import main


def _log_uniform(rng, size=None):
    return np.exp(rng.uniform(np.log(0.5), np.log(2.0), size))


def test_c01_three_node_threshold(tmp_path, capsys, record):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    mismatches, below = [], 0
    for draw in range(100):
        c12, c23, c13 = (float(x) for x in _log_uniform(rng, 3) * [1, 1, 2])
        path = tmp_path / f"g{draw}.txt"
        path.write_text(f"1 2 {c12!r}\n2 3 {c23!r}\n1 3 {c13!r}\n")
        code = main(["markov", "--graph", str(path), "--criterion", "cstar"])
        got = json.loads(capsys.readouterr().out)
        want = [{"i": "1", "j": "3", "K": ["2"]}] if c13 < c12 * c23 else []
        below += c13 < c12 * c23
        if code != 0 or got != want:
            mismatches.append(draw)
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 1.0 and 0 < below < 100
    with capsys.disabled():
        record(1, ok, f"100 draws ({below} below threshold), {len(mismatches)} mismatches, {elapsed:.2f}s")
    assert ok


def test_c02_diamond21(record):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(20):
        c21, c13, c34 = _log_uniform(rng, 3)
        c24 = c21 * c13 * c34 * rng.uniform(0.1, 0.9)
        w = weighted(4, {(2, 1): c21, (1, 3): c13, (3, 4): c34, (2, 4): c24})
        skel, _ = pc_skeleton(SeparationOracle(w, "cstar"), 4)
        if global_markov(w, "cstar") != DIAMOND21_CSTAR or skel.edges != {shift(1, 2), shift(1, 3), shift(3, 4)}:
            failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 1.0
    record(2, ok, f"20 weightings, {failures} failures, {elapsed:.2f}s")
    assert ok


def test_c03_diamond_pipeline(record):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    problems = []
    for _ in range(20):
        c12, c24, c13 = _log_uniform(rng, 3)
        c34 = c12 * c24 / c13 * rng.uniform(1.2, 4.0)
        w = weighted(4, {(1, 2): c12, (2, 4): c24, (1, 3): c13, (3, 4): c34})
        o = SeparationOracle(w, "cstar")
        if global_markov(w, "cstar") != DIAMOND_CSTAR:
            problems.append("markov")
        skel, sepsets = pc_skeleton(o, 4)
        naive = orient_colliders_sepset(skel, sepsets)
        if naive.directed <= w.edges:
            problems.append("naive rule did not mis-orient")
        if orient_colliders(skel, o).directed != {shift(2, 4), shift(3, 4)}:
            problems.append("colliders")
        res = pcstar(o, 4)
        if [s for _, s in res.oriented_cycles] != [0] or res.cpdag.directed != w.edges or res.cpdag.undirected:
            problems.append("cycle")
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 1.0
    record(3, ok, f"20 weightings, problems={sorted(set(problems))}, {elapsed:.2f}s")
    assert ok


def test_c04_d_star_equivalence(record):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    differ = 0
    for seed in range(200):
        n, d = int(rng.integers(4, 9)), int(rng.integers(1, 4))
        g = random_weighted_dag(GenConfig(n=n, d=d, seed=seed)).dag
        if pc(SeparationOracle(g, "d"), n).cpdag != pc(SeparationOracle(g, "star"), n).cpdag:
            differ += 1
    elapsed = time.perf_counter() - t0
    ok = differ == 0 and elapsed < 120
    record(4, ok, f"200 DAGs, {differ} CPDAG differences, {elapsed:.1f}s")
    assert ok


@functools.lru_cache(maxsize=None)
def _criterion5_runs():
    rng = np.random.default_rng(5)
    runs = []
    t0 = time.perf_counter()
    for seed in range(200):
        n, d = int(rng.integers(3, 11)), int(rng.integers(1, 5))
        w = random_weighted_dag(GenConfig(n=n, d=d, seed=seed))
        stats = {}
        skel, _ = pc_skeleton(SeparationOracle(w, "cstar"), n, stats=stats)
        truth = weighted_transitive_reduction(w).wtr.dag
        runs.append((skel == skeleton(truth), stats, truth.max_in_degree))
    return runs, time.perf_counter() - t0


def test_c05_skeleton_is_reduction(record):
    runs, elapsed = _criterion5_runs()
    wrong = sum(not same for same, _, _ in runs)
    ok = wrong == 0 and elapsed < 300
    record(5, ok, f"{len(runs)} models, {wrong} skeleton mismatches, {elapsed:.1f}s")
    assert ok


def test_c06_inclusion_chain(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    broken, strict_ds, strict_sc = 0, 0, 0
    for seed in range(100):
        n, d = int(rng.integers(3, 8)), int(rng.integers(1, 4))
        w = random_weighted_dag(GenConfig(n=n, d=d, seed=seed))
        gd, gs, gc = global_markov(w.dag, "d"), global_markov(w.dag, "star"), global_markov(w, "cstar")
        broken += not (gd <= gs <= gc)
        strict_ds += gd < gs
        strict_sc += gs < gc
    cas = dag(5, *CASSIOPEIA)
    d21 = weighted(4, {(2, 1): 2.0, (1, 3): 2.0, (3, 4): 2.0, (2, 4): 1.0})
    witness_ds = global_markov(cas, "d") < global_markov(cas, "star")
    witness_sc = global_markov(d21.dag, "star") < global_markov(d21, "cstar")
    elapsed = time.perf_counter() - t0
    ok = broken == 0 and (strict_ds or witness_ds) and (strict_sc or witness_sc) and elapsed < 120
    record(
        6,
        ok,
        f"100 models, {broken} violations; strict d<star in {strict_ds} (+Cassiopeia {witness_ds}), "
        f"strict star<C* in {strict_sc} (+21-diamond {witness_sc}), {elapsed:.1f}s",
    )
    assert ok


def test_c07_reduction_keeps_markov(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    differ, reduced = 0, 0
    for seed in range(100):
        n, d = int(rng.integers(3, 9)), int(rng.integers(1, 5))
        w = random_weighted_dag(GenConfig(n=n, d=d, seed=seed))
        red = weighted_transitive_reduction(w)
        reduced += bool(red.removed_edges)
        differ += global_markov(w, "cstar") != global_markov(red.wtr, "cstar")
    elapsed = time.perf_counter() - t0
    ok = differ == 0 and elapsed < 180
    record(7, ok, f"100 models ({reduced} with removed edges), {differ} differences, {elapsed:.1f}s")
    assert ok


def test_c08_cycle_sources(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    cases, wrong = 0, []
    for m in range(4, 9):
        for source in range(1, m):
            for _ in range(5):
                w = collider_cycle(m, source, rng)
                o = SeparationOracle(w, "cstar")
                p = orient_colliders(pc_skeleton(o, m)[0], o)
                found = find_orientable_cycles(p)
                cases += 1
                if len(found) != 1:
                    wrong.append((m, source, "not orientable"))
                    continue
                out = orient_cycle(p, *found[0], o)
                cycle = found[0][0]
                if source in (1, m - 1):
                    good = out.possible_sources == {(cycle, (1, m - 1))} and out.directed == p.directed
                else:
                    good = out.directed == w.edges and not out.possible_sources
                if not good:
                    wrong.append((m, source))
    elapsed = time.perf_counter() - t0
    ok = not wrong and elapsed < 60
    record(8, ok, f"{cases} cycles of length 4-8, wrong={wrong[:5]}, {elapsed:.1f}s")
    assert ok


def test_c09_hexagon(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    base = {(1, 2): None, (3, 2): None, (4, 5): None, (6, 5): None, (1, 6): None, (3, 4): None}
    c = dict(zip(base, _log_uniform(rng, len(base))))
    markovs, undirected_ok = [], True
    for tail16 in (True, False):
        for tail34 in (True, False):
            weights = {(1, 2): c[(1, 2)], (3, 2): c[(3, 2)], (4, 5): c[(4, 5)], (6, 5): c[(6, 5)]}
            weights[(1, 6) if tail16 else (6, 1)] = c[(1, 6)]
            weights[(3, 4) if tail34 else (4, 3)] = c[(3, 4)]
            w = weighted(6, weights)
            markovs.append(global_markov(w, "cstar"))
            res = pcstar(SeparationOracle(w, "cstar"), 6)
            undirected_ok &= res.cpdag.undirected == {shift(1, 6), shift(3, 4)}
            undirected_ok &= res.cpdag.directed == {shift(1, 2), shift(3, 2), shift(4, 5), shift(6, 5)}
    same = all(m == markovs[0] for m in markovs)
    elapsed = time.perf_counter() - t0
    ok = same and undirected_ok and elapsed < 60
    record(9, ok, f"4 completions, identical Markov={same}, 1-6 and 3-4 left undirected={undirected_ok}, {elapsed:.2f}s")
    assert ok


def test_c10_conditioning_size_bound(record):
    runs, _ = _criterion5_runs()
    over = [(s["max_cond_queried"], deg) for _, s, deg in runs if s["max_cond_queried"] > deg]
    sepset_over = sum(s["max_sepset_size"] > deg for _, s, deg in runs)
    ok = not over
    record(
        10,
        ok,
        f"{len(over)}/{len(runs)} runs queried |K| above max in-degree of G^tr "
        f"(worst {max(over, default=None)}); sepsets above it: {sepset_over}",
    )
    assert ok


def test_c11_benchmark_table(tmp_path, capsys, record):
    out = tmp_path / "table.csv"
    t0 = time.perf_counter()
    args = ["bench", "--nodes", "10,15,20", "--max-indegree", "2,3,4", "--replicates", "50", "--seed", "11", "--csv", str(out)]
    code = main(args)
    elapsed = time.perf_counter() - t0
    rows = list(csv.DictReader(out.open()))
    shape_ok = code == 0 and len(rows) == 9 and all(int(r["replicates"]) >= 50 for r in rows)
    ordering = all(
        float(r["mean_edges_Gtr"]) <= float(r["mean_edges_G"])
        and float(r["mean_recovered_cycles"]) >= float(r["mean_recovered_plain"])
        for r in rows
    )
    first = next(r for r in rows if (r["n"], r["d"]) == ("10", "2"))
    band = 6 <= float(first["mean_edges_G"]) <= 12 and 6 <= float(first["mean_edges_Gtr"]) <= 12
    ok = shape_ok and ordering and band and elapsed < 1800
    with capsys.disabled():
        record(
            11,
            ok,
            f"9 cells x 50, orderings hold={ordering}, n=10 d=2 edges "
            f"{float(first['mean_edges_G']):.2f}/{float(first['mean_edges_Gtr']):.2f}, {elapsed:.0f}s",
        )
    assert ok


def test_c12_scale(record):
    w = random_weighted_dag(GenConfig(n=31, d=3, seed=12))
    t0 = time.perf_counter()
    res = pcstar(SeparationOracle(w, "cstar"), 31, cycles=False)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 600 and not res.stats["cycles"]
    record(12, ok, f"n=31 d=3 without cycle orientation: {res.stats['queries']} queries, {elapsed:.1f}s")
    assert ok


def test_examples_are_well_formed():
    assert stmt(1, 4, 3) in DIAMOND21_CSTAR
    assert isinstance(weighted(2, {(1, 2): 1.0}), WeightedDag)
