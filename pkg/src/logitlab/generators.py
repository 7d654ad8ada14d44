"""Constructors for the game families studied here."""

from __future__ import annotations

import numpy as np

from .errors import HypothesisError
from .game import (
    COORDINATION,
    POTENTIAL,
    Game,
    SocialGraph,
    all_profiles,
    check_budget,
    space_size,
)

PRNG_ID = "numpy.PCG64+SeedSequence"


def coordination_payoff(s: int, t: int, a: float, b: float, c: float, d: float) -> float:
    """Payoff to a player choosing ``s`` against a neighbour choosing ``t``."""
    if s == 0:
        return a if t == 0 else c
    return d if t == 0 else b


def edge_potential(s: int, t: int, delta0: float, delta1: float) -> float:
    if s == t:
        return -delta0 if s == 0 else -delta1
    return 0.0


def gen_graphical_coordination(graph: SocialGraph, a: float, b: float, c: float, d: float) -> Game:
    delta0, delta1 = a - d, b - c
    if not (delta0 > 0 and delta1 > 0):
        raise HypothesisError(f"coordination needs a-d > 0 and b-c > 0, got {delta0} and {delta1}")
    n = graph.n
    radices = (2,) * n
    check_budget(space_size(radices))
    x = all_profiles(radices)
    util = np.zeros((n, x.shape[0]))
    phi = np.zeros(x.shape[0])
    # payoff matrix indexed [own, other]
    pay = np.array([[a, c], [d, b]], dtype=np.float64)
    pot = np.array([[-delta0, 0.0], [0.0, -delta1]])
    for u, v in graph.edges:
        util[u] += pay[x[:, u], x[:, v]]
        util[v] += pay[x[:, v], x[:, u]]
        phi += pot[x[:, u], x[:, v]]
    return Game(radices, util, COORDINATION, potential=phi, graph=graph, payoffs=(a, b, c, d))


def gen_lbpot(n: int, g: float, l: float) -> Game:
    """Binary potential ``-l * min(c, |c - w(x)|)`` with ``c = g / l``.

    ``w(x)`` is the number of ones.  Requires ``2g/n <= l <= g``.
    """
    if n < 1 or not (2 * g / n <= l <= g) or l <= 0:
        raise HypothesisError(f"lbpot needs 2g/n <= l <= g with l > 0, got n={n}, g={g}, l={l}")
    radices = (2,) * n
    check_budget(space_size(radices))
    c = g / l
    w = all_profiles(radices).sum(axis=1)
    phi = -l * np.minimum(c, np.abs(c - w))
    return potential_game(radices, phi)


def gen_dominant(n: int, m: int) -> Game:
    """Every player gets 0 at the all-zeros profile and -1 elsewhere."""
    if n < 1 or m < 2:
        raise HypothesisError(f"dominant game needs n >= 1 and m >= 2, got n={n}, m={m}")
    radices = (m,) * n
    check_budget(space_size(radices))
    phi = np.ones(space_size(radices))
    phi[0] = 0.0
    return potential_game(radices, phi)


def gen_random_potential(n: int, m: int, seed: int, range_: float = 1.0) -> Game:
    """Potential with i.i.d. uniform entries in ``[0, range_]``.

    Seeded through numpy's PCG64 bit generator, so identical seeds give
    identical tables on every platform numpy supports.
    """
    radices = (m,) * n
    size = space_size(radices)
    check_budget(size)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    phi = rng.uniform(0.0, range_, size=size)
    return potential_game(radices, phi)


def potential_game(radices, phi) -> Game:
    """Potential-kind game whose utilities are ``u_i = -phi`` for every player."""
    phi = np.asarray(phi, dtype=np.float64)
    util = np.tile(-phi, (len(radices), 1))
    return Game(tuple(radices), util, POTENTIAL, potential=phi)


def ring_game(n: int, delta: float = 1.0) -> Game:
    return gen_graphical_coordination(SocialGraph.ring(n), delta, delta, 0.0, 0.0)


def clique_game(n: int, delta0: float = 1.0, delta1: float = 1.0) -> Game:
    return gen_graphical_coordination(SocialGraph.clique(n), delta0, delta1, 0.0, 0.0)


def is_dominant_family(game: Game) -> bool:
    """True when ``game`` is (structurally) the gen_dominant construction."""
    m = game.radices[0]
    if m < 2 or any(r != m for r in game.radices):
        return False
    want = -np.ones(game.size)
    want[0] = 0.0
    return bool(np.array_equal(game.utility_table(), np.tile(want, (game.n, 1))))
