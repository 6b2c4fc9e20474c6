import numpy as np
import pytest

from conftest import random_model, shift, weighted
from oracles import brute_kleene
from pcstar import GenericityError, global_markov, kleene_star, weighted_transitive_reduction


def test_diamond21_drops_the_bypassed_edge(diamond21):
    red = weighted_transitive_reduction(diamond21)
    assert red.removed_edges == (shift(2, 4),)
    assert red.wtr.edges == {shift(2, 1), shift(1, 3), shift(3, 4)}
    assert red.parent is diamond21


def test_heavy_direct_edge_is_kept():
    w = weighted(3, {(1, 2): 2.0, (2, 3): 2.0, (1, 3): 5.0})
    assert weighted_transitive_reduction(w).removed_edges == ()


def test_diamond_is_already_reduced(diamond):
    assert weighted_transitive_reduction(diamond).wtr.edges == diamond.edges


def test_tie_raises():
    w = weighted(3, {(1, 2): 2.0, (2, 3): 2.0, (1, 3): 4.0})
    with pytest.raises(GenericityError):
        weighted_transitive_reduction(w)


def test_kept_weights_unchanged(diamond21):
    red = weighted_transitive_reduction(diamond21)
    for e in red.wtr.edges:
        assert red.wtr.c[e] == diamond21.c[e]
    assert red.wtr.c[shift(2, 4)] == 0.0


@pytest.mark.parametrize("seed", range(40))
def test_properties_on_random_models(seed):
    w = random_model(seed, 8, 4)
    red = weighted_transitive_reduction(w)
    tr = red.wtr
    # same critical weights, and every kept edge is its own critical path
    assert np.allclose(kleene_star(tr), kleene_star(w))
    _, crit, _ = brute_kleene(w.n, w.weights())
    assert tr.edges == {(u, v) for u, v in w.edges if crit[u][v] == (u, v)}
    # idempotent
    assert weighted_transitive_reduction(tr).removed_edges == ()
    # minimal: dropping any kept edge changes some critical weight
    for e in tr.edges:
        weights = {f: x for f, x in tr.weights().items() if f != e}
        star, _, _ = brute_kleene(w.n, weights)
        assert float(star[e[0]][e[1]]) < tr.kleene[e] - 1e-12


@pytest.mark.parametrize("seed", range(20))
def test_markov_property_preserved(seed):
    w = random_model(500 + seed, 7, 3)
    assert global_markov(w, "cstar") == global_markov(weighted_transitive_reduction(w).wtr, "cstar")


def test_exact_mode():
    from fractions import Fraction

    w = weighted(4, {(2, 1): Fraction(2), (1, 3): Fraction(2), (3, 4): Fraction(2), (2, 4): Fraction(1)}, exact=True)
    red = weighted_transitive_reduction(w)
    assert red.removed_edges == (shift(2, 4),)
    assert red.wtr.exact
