import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logitlab.errors import BudgetError, GraphError, NotPotentialError, RangeError, ShapeError
from logitlab.game import (
    Game,
    SocialGraph,
    all_profiles,
    check_budget,
    dominant_profile,
    extract_potential,
    hamming_distance,
    hamming_edges,
    hamming_neighbors,
    index_profile,
    is_potential_game,
    potential_of,
    profile_index,
    state_budget,
    verify_potential,
)
from logitlab.generators import gen_graphical_coordination, gen_random_potential

from oracles import brute_potential_ok, profiles


def matching_pennies():
    # player 0 wants to match, player 1 wants to mismatch
    u0 = [1, -1, -1, 1]
    return Game((2, 2), [u0, [-v for v in u0]])


def edge_game():
    return gen_graphical_coordination(SocialGraph.from_edges(2, [(0, 1)]), 1, 1, 0, 0)


# indexing


def test_profile_index_examples():
    assert profile_index((0, 0, 0), (2, 2, 2)) == 0
    assert profile_index((1, 0, 1), (2, 2, 2)) == 5
    assert index_profile(5, (3, 2)) == (2, 1)


def test_index_matches_enumeration_order():
    radices = (3, 2, 4)
    for k, p in enumerate(profiles(radices)):
        assert profile_index(p, radices) == k
    assert [tuple(r) for r in all_profiles(radices)] == profiles(radices)


@pytest.mark.parametrize("radices", [(2,) * 12, (4, 4, 4, 4, 4, 4), (3, 5, 7)])
def test_index_bijection_exhaustive(radices):
    table = all_profiles(radices)
    for k in range(0, len(table), max(1, len(table) // 500)):
        assert index_profile(k, radices) == tuple(table[k])
        assert profile_index(tuple(table[k]), radices) == k


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5), st.data())
def test_index_roundtrip_property(radices, data):
    p = tuple(data.draw(st.integers(0, m - 1)) for m in radices)
    assert index_profile(profile_index(p, radices), radices) == p


def test_index_range_errors():
    with pytest.raises(RangeError):
        profile_index((2, 0), (2, 2))
    with pytest.raises(RangeError):
        profile_index((0,), (2, 2))
    with pytest.raises(RangeError):
        index_profile(4, (2, 2))
    with pytest.raises(RangeError):
        index_profile(-1, (2, 2))


def test_hamming_helpers():
    radices = (3, 2)
    nb = hamming_neighbors(0, radices)
    assert sorted(nb) == [1, 2, 3]
    a, b = hamming_edges(radices)
    # each player contributes (pairs within a line) * lines
    assert len(a) == 3 * 2 + 1 * 3
    assert all(hamming_distance(index_profile(x, radices), index_profile(y, radices)) == 1 for x, y in zip(a, b))


def test_budget(monkeypatch):
    monkeypatch.setenv("LOGITLAB_BUDGET", "64")
    assert state_budget() == 64
    with pytest.raises(BudgetError):
        check_budget(65)
    with pytest.raises(BudgetError):
        Game((2,) * 7, np.zeros((7, 128)))


# graphs


def test_social_graph_validation():
    with pytest.raises(GraphError):
        SocialGraph.from_edges(3, [(0, 0)])
    with pytest.raises(GraphError):
        SocialGraph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        SocialGraph.from_edges(3, [(0, 3)])
    assert SocialGraph.ring(5).is_ring()
    assert not SocialGraph.path(5).is_ring()
    assert SocialGraph.clique(4).is_clique()


def test_game_shape_checks():
    with pytest.raises(ShapeError):
        Game((2, 2), np.zeros((2, 3)))
    with pytest.raises(RangeError):
        Game((0, 2), np.zeros((2, 0)))


def test_callback_game_matches_table():
    g = edge_game()
    cb = Game((2, 2), utility_fn=lambda i, x: float(g.utility(i, x)))
    assert np.array_equal(cb.utility_table(), g.utility_table())


# potentials


def test_verify_potential_examples():
    g = edge_game()
    phi = np.array([-1.0, 0.0, 0.0, -1.0])
    assert verify_potential(g, phi).ok
    zero = np.zeros(4)
    bad = verify_potential(g, zero)
    assert not bad.ok and bad.violation == pytest.approx(1.0)
    assert bad.witness is not None
    mp = matching_pennies()
    assert not is_potential_game(mp)


def test_verify_potential_shape_error():
    with pytest.raises(ShapeError):
        verify_potential(edge_game(), np.zeros(3))


def test_verify_potential_agrees_with_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(30):
        radices = tuple(rng.integers(1, 4, size=rng.integers(1, 4)))
        size = int(np.prod(radices))
        if trial % 2:
            phi = rng.normal(size=size)
            util = np.tile(-phi, (len(radices), 1)) + rng.integers(0, 2) * rng.normal(size=(len(radices), size)) * 1e-3
        else:
            phi = rng.normal(size=size)
            util = rng.normal(size=(len(radices), size))
        g = Game(radices, util)
        assert verify_potential(g, phi).ok == brute_potential_ok(util.tolist(), phi.tolist(), radices)


def test_extract_potential_examples():
    zero = Game((2, 3), np.zeros((2, 6)))
    assert np.array_equal(extract_potential(zero), np.zeros(6))
    g = Game((2, 2), edge_game().utilities)  # drop the attached table
    assert np.allclose(extract_potential(g), [0, 1, 1, 0])
    with pytest.raises(NotPotentialError) as err:
        extract_potential(matching_pennies())
    assert err.value.witness is not None


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10**6), st.floats(-5, 5))
def test_extracted_potential_is_shift_invariant(n, m, seed, shift):
    g = gen_random_potential(n, m, seed)
    phi = extract_potential(Game(g.radices, g.utilities))
    assert verify_potential(g, phi, tol=1e-12).ok
    shifted = extract_potential(Game(g.radices, g.utilities + shift))
    diffs = phi[:, None] - phi[None, :]
    assert np.allclose(shifted[:, None] - shifted[None, :], diffs, atol=1e-9)


def test_potential_of_prefers_attached_table():
    g = edge_game()
    assert np.array_equal(potential_of(g), g.potential)


def test_degenerate_single_strategy_player():
    g = Game((1, 2), [[0.0, 0.0], [0.0, 1.0]])
    assert is_potential_game(g)
    assert dominant_profile(g) == (0, 1)


def test_dominant_profile():
    g = Game((2, 2), [[0, -1, 0, -1], [0, 0, -1, -1]])
    assert dominant_profile(g) == (0, 0)
    assert dominant_profile(matching_pennies()) is None
    assert dominant_profile(edge_game()) is None
