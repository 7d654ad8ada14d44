import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logitlab.errors import GraphError, HypothesisError
from logitlab.game import SocialGraph, all_profiles, profile_index, verify_potential
from logitlab.generators import (
    clique_game,
    gen_dominant,
    gen_graphical_coordination,
    gen_lbpot,
    gen_random_potential,
    is_dominant_family,
    ring_game,
)
from logitlab.kernel import LogitChain, update_distribution
from logitlab.metrics import potential_stats
from logitlab.exact import gibbs


def by_weight(game):
    w = all_profiles(game.radices).sum(axis=1)
    return [float(game.potential[w == k][0]) for k in range(game.n + 1)]


def test_single_edge_potential():
    g = gen_graphical_coordination(SocialGraph.from_edges(2, [(0, 1)]), 1, 1, 0, 0)
    assert list(g.potential) == [-1, 0, 0, -1]
    assert verify_potential(g, g.potential).ok


def test_clique_and_ring_values():
    g = clique_game(4)
    assert g.potential[profile_index((1, 1, 0, 0), g.radices)] == -2
    r = ring_game(3)
    assert r.potential[profile_index((1, 1, 1), r.radices)] == -3


def test_coordination_utilities_are_edge_sums():
    g = gen_graphical_coordination(SocialGraph.path(3), 3, 2, 0.5, 1)
    x = (0, 1, 1)
    # player 1 has neighbours 0 and 2: payoff(1 vs 0) = d, payoff(1 vs 1) = b
    assert g.utility(1, x) == 1 + 2
    assert g.utility(0, x) == 0.5


def test_coordination_hypotheses():
    with pytest.raises(HypothesisError):
        gen_graphical_coordination(SocialGraph.ring(3), 0, 1, 0, 1)
    with pytest.raises(GraphError):
        gen_graphical_coordination(SocialGraph.from_edges(2, [(0, 1), (0, 1)]), 1, 1, 0, 0)


def test_lbpot_examples():
    g = gen_lbpot(4, 2, 1)
    assert by_weight(g) == [-2, -1, 0, -1, -2]
    s = potential_stats(g.potential, g.radices)
    assert (s.delta_global, s.delta_local) == (2, 1)
    assert by_weight(gen_lbpot(2, 1, 1)) == [-1, 0, -1]
    with pytest.raises(HypothesisError):
        gen_lbpot(4, 2, 0.5)
    with pytest.raises(HypothesisError):
        gen_lbpot(4, 2, 3)


def test_lbpot_symmetric_about_c():
    g = gen_lbpot(6, 3, 1)
    w = all_profiles(g.radices).sum(axis=1)
    c = 3
    for k in range(7):
        mirror = 2 * c - k
        if 0 <= mirror <= 6:
            assert np.all(g.potential[w == k] == g.potential[w == mirror][0])


def test_dominant_examples():
    g = gen_dominant(2, 2)
    assert is_dominant_family(g)
    for beta in (0.0, 0.5, 3.0, 50.0):
        chain = LogitChain(g, beta)
        for k in range(4):
            x = all_profiles(g.radices)[k]
            for i in range(2):
                assert update_distribution(chain, x, i)[0] >= 0.5 - 1e-15
    assert potential_stats(g.potential, g.radices).delta_global == 1
    pi = gibbs(gen_dominant(3, 2).potential, 60.0)
    assert pi[1:].sum() < 1e-20
    with pytest.raises(HypothesisError):
        gen_dominant(2, 1)


def test_random_potential_determinism():
    a = gen_random_potential(3, 2, 1)
    b = gen_random_potential(3, 2, 1)
    assert np.array_equal(a.potential, b.potential)
    assert verify_potential(a, a.potential).ok
    assert not np.array_equal(a.potential, gen_random_potential(3, 2, 2).potential)
    assert a.potential.min() >= 0 and a.potential.max() <= 1


def test_random_potential_frozen_values():
    # PCG64 stream for seed 7; guards against silent generator changes
    g = gen_random_potential(2, 2, 7)
    assert np.allclose(g.potential, [0.62509547, 0.8972138, 0.77568569, 0.22520719], atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["ring", "clique", "lbpot", "dominant", "random"]), st.integers(2, 5), st.integers(0, 1000))
def test_generated_games_are_potential_games(family, n, seed):
    if family == "ring":
        g = ring_game(max(n, 3), 1 + seed % 3)
    elif family == "clique":
        g = clique_game(n, 1 + seed % 2, 1 + seed % 3)
    elif family == "lbpot":
        g = gen_lbpot(n, n, 2)
    elif family == "dominant":
        g = gen_dominant(n, 2 + seed % 2)
    else:
        g = gen_random_potential(n, 2 + seed % 2, seed)
    assert verify_potential(g, g.potential, tol=1e-12).ok
