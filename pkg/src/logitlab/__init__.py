"""Logit dynamics on finite games: exact mixing analysis, structural metrics,
bounds and coupling simulations."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .game import (  # noqa: F401
    COORDINATION,
    GENERIC,
    POTENTIAL,
    Game,
    SocialGraph,
    all_profiles,
    dominant_profile,
    extract_potential,
    games_equal,
    hamming_distance,
    hamming_neighbors,
    index_profile,
    is_potential_game,
    potential_of,
    profile_index,
    space_size,
    verify_potential,
)
from .generators import (  # noqa: F401
    PRNG_ID,
    clique_game,
    gen_dominant,
    gen_graphical_coordination,
    gen_lbpot,
    gen_random_potential,
    potential_game,
    ring_game,
)
from .gameio import parse_game, serialize_game  # noqa: F401
from .kernel import LogitChain, softmax, step, transition_matrix, transition_sparse, update_distribution  # noqa: F401
from .exact import (  # noqa: F401
    exact_mixing_time,
    gibbs,
    relaxation_sandwich,
    reversibility_check,
    spectrum,
    stationary,
    tv_distance,
)
from .metrics import cutwidth, cutwidth_of_ordering, potential_stats, zeta  # noqa: F401
from .bounds import bottleneck_ratio, compute_exact, theory_report  # noqa: F401
from .coupling import coupled_step, coupling_time, coupling_tv_bound, estimate_hitting  # noqa: F401
