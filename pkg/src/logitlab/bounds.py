"""Numeric evaluation of the mixing-time bounds and their proof machinery.

Every ``log`` appearing in a proof constant is the natural logarithm.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import exact
from .errors import HypothesisError, NotReversibleError, NumericalError
from .game import (
    COORDINATION,
    Game,
    all_profiles,
    dominant_profile,
    index_profile,
    is_potential_game,
    potential_of,
    profile_index,
    strides,
)
from .generators import is_dominant_family
from .kernel import LogitChain, transition_matrix
from .metrics import CutwidthReport, HillReport, PotentialStats, cutwidth, potential_stats, zeta

HALF_TOL = 1e-12


# ---------------------------------------------------------------------------
# bottleneck ratio


@dataclass(frozen=True)
class Bottleneck:
    ratio: float
    pi_set: float
    lower_bound: float
    label: str = ""


def _as_mask(R, size: int) -> np.ndarray:
    R = np.asarray(R)
    if R.dtype == bool:
        if R.shape != (size,):
            raise ValueError("boolean state mask has the wrong length")
        return R
    mask = np.zeros(size, dtype=bool)
    mask[R.astype(np.int64)] = True
    return mask


def bottleneck_ratio(P, pi, R, eps: float = exact.DEFAULT_EPS, label: str = "") -> Bottleneck:
    """``B(R) = Q(R, R^c) / pi(R)`` and the lower bound ``(1-2 eps) / (2 B(R))``."""
    P = np.asarray(P, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    mask = _as_mask(R, pi.size)
    if not mask.any() or mask.all():
        raise ValueError("R must be a non-empty proper subset of the state space")
    pi_R = float(pi[mask].sum())
    if pi_R <= 0.0:
        raise NumericalError("pi(R) underflowed to 0")
    if pi_R > 0.5 + HALF_TOL:
        raise HypothesisError(f"pi(R) = {pi_R:.6g} exceeds 1/2")
    flow = float((pi[mask][:, None] * P[np.ix_(mask, ~mask)]).sum())
    B = flow / pi_R
    lower = math.inf if B == 0.0 else (1.0 - 2.0 * eps) / (2.0 * B)
    return Bottleneck(B, pi_R, lower, label)


def bottleneck_families(game: Game, pi) -> list[tuple[str, np.ndarray]]:
    """Candidate sets: potential level sets, weight sets, minimiser singletons."""
    pi = np.asarray(pi)
    out = []
    nonzero = (all_profiles(game.radices) != 0).sum(axis=1)
    for c in range(1, game.n + 1):
        out.append((f"weight<{c}", nonzero < c))
    if is_potential_game(game):
        phi = potential_of(game)
        for c in np.unique(phi):
            out.append((f"phi>={c:.12g}", phi >= c))
        for k in np.flatnonzero(phi == phi.min()):
            mask = np.zeros(game.size, dtype=bool)
            mask[k] = True
            out.append((f"singleton:{int(k)}", mask))
    keep = []
    for label, mask in out:
        if mask.any() and not mask.all() and 0.0 < pi[mask].sum() <= 0.5 + HALF_TOL:
            keep.append((label, mask))
    return keep


def best_bottleneck(game: Game, P, pi, eps: float = exact.DEFAULT_EPS) -> Bottleneck | None:
    best = None
    for label, mask in bottleneck_families(game, pi):
        b = bottleneck_ratio(P, pi, mask, eps, label)
        if best is None or b.lower_bound > best.lower_bound:
            best = b
    return best


# ---------------------------------------------------------------------------
# canonical paths for binary games


def canonical_path(ordering: Sequence[int], x: Sequence[int], y: Sequence[int]) -> list[tuple[int, ...]]:
    """Profiles visited when the coordinates where ``x`` and ``y`` disagree are
    switched to ``y`` one at a time, earliest in ``ordering`` first."""
    cur = list(x)
    path = [tuple(cur)]
    for v in ordering:
        if cur[v] != y[v]:
            cur[v] = y[v]
            path.append(tuple(cur))
    return path


def f_edge(
    ordering: Sequence[int],
    edge: tuple[Sequence[int], Sequence[int]],
    x: Sequence[int],
    y: Sequence[int],
    pi,
) -> tuple[int, ...]:
    """Complementary splice of ``x`` and ``y`` charged to ``edge`` on their path.

    With ``i`` the coordinate the edge flips, coordinates before ``i`` in the
    ordering come from ``x`` and the rest from ``y`` when ``pi(u) <= pi(v)``;
    otherwise ``i`` itself also comes from ``x``.
    """
    u, v = tuple(edge[0]), tuple(edge[1])
    path = canonical_path(ordering, x, y)
    if not any(path[k] == u and path[k + 1] == v for k in range(len(path) - 1)):
        raise ValueError(f"edge {u} -> {v} is not on the canonical path from {x} to {y}")
    i = next(k for k in range(len(u)) if u[k] != v[k])
    radices = (2,) * len(u)
    pi = np.asarray(pi)
    pu = pi[profile_index(u, radices)]
    pv = pi[profile_index(v, radices)]
    pos = {vert: k for k, vert in enumerate(ordering)}
    cut = pos[i] if pu <= pv else pos[i] + 1
    return tuple(x[j] if pos[j] < cut else y[j] for j in range(len(u)))


def canonical_path_set(ordering: Sequence[int], radices: Sequence[int]) -> dict[tuple[int, int], tuple[int, ...]]:
    """Flat-index paths for every ordered pair of distinct profiles."""
    size = int(np.prod(radices))
    profiles = [index_profile(k, radices) for k in range(size)]
    out = {}
    for a in range(size):
        for b in range(size):
            if a != b:
                out[(a, b)] = tuple(
                    profile_index(p, radices) for p in canonical_path(ordering, profiles[a], profiles[b])
                )
    return out


def _edge_loads(paths, weight) -> dict[tuple[int, int], float]:
    loads: dict[tuple[int, int], float] = {}
    for (a, b), path in paths.items():
        w = weight(a, b)
        if w == 0.0:
            continue
        w *= len(path) - 1
        for k in range(len(path) - 1):
            e = (path[k], path[k + 1])
            loads[e] = loads.get(e, 0.0) + w
    return loads


def congestion(Q, pi, paths) -> tuple[float, tuple[int, int] | None]:
    """Maximum over chain edges of ``sum pi(x) pi(y) |path| / Q(e)``."""
    Q = np.asarray(Q)
    pi = np.asarray(pi)
    loads = _edge_loads(paths, lambda a, b: float(pi[a] * pi[b]))
    best, arg = 0.0, None
    for e, load in loads.items():
        q = Q[e]
        if q <= 0.0:
            raise ValueError(f"path uses {e}, which is not an edge of the chain")
        if load / q > best:
            best, arg = load / q, e
    return best, arg


def admissible_paths(potential, radices: Sequence[int]) -> dict[tuple[int, int], tuple[int, ...]]:
    """One path of at most two admissible edges per ordered Hamming pair.

    An edge ``(u, v)`` is admissible when ``u`` or ``v`` minimises the potential
    on the line of profiles both belong to; otherwise the path detours through
    that line's minimiser (lowest index on ties).
    """
    phi = np.asarray(potential)
    st = strides(radices)
    out = {}
    for u in range(phi.size):
        for j, m in enumerate(radices):
            xj = (u // st[j]) % m
            line = [int(u + (a - xj) * st[j]) for a in range(m)]
            vals = phi[line]
            low = vals.min()
            z = line[int(np.argmin(vals))]
            for v in line:
                if v == u:
                    continue
                if phi[u] == low or phi[v] == low:
                    out[(u, v)] = (u, v)
                else:
                    out[(u, v)] = (u, z, v)
    return out


def congestion_ratio(Q, Q_hat, pi, pi_hat, paths) -> tuple[float, float]:
    """Congestion ratio ``alpha`` of ``paths`` and ``gamma = max pi / pi_hat``.

    ``paths`` maps each off-diagonal edge of the comparison chain to a path of
    edges of the chain with edge measure ``Q``.
    """
    Q = np.asarray(Q)
    Q_hat = np.asarray(Q_hat)
    for (a, b), path in paths.items():
        if path[0] != a or path[-1] != b:
            raise ValueError(f"path for ({a}, {b}) does not connect its endpoints")
    loads = _edge_loads(paths, lambda a, b: float(Q_hat[a, b]))
    alpha = 0.0
    for e, load in loads.items():
        if Q[e] <= 0.0:
            raise ValueError(f"path uses {e}, which is not an edge of the chain")
        alpha = max(alpha, load / Q[e])
    gamma = float(np.max(np.asarray(pi) / np.asarray(pi_hat)))
    return alpha, gamma


# ---------------------------------------------------------------------------
# theory report


@dataclass
class BoundEntry:
    id: str
    formula: str
    kind: str  # "upper" | "lower" | "landscape"
    target: str  # "t_mix" | "t_rel" | "phi"
    applicable: bool
    reason: str = ""
    value: float | None = None
    exact: float | None = None
    satisfied: bool | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class BoundsReport:
    beta: float
    eps: float
    entries: list[BoundEntry]

    def entry(self, key: str) -> BoundEntry:
        for e in self.entries:
            if e.id == key:
                return e
        raise KeyError(key)

    def applicable(self) -> list[BoundEntry]:
        return [e for e in self.entries if e.applicable]

    def all_satisfied(self) -> bool:
        return all(e.satisfied is not False for e in self.entries)

    def to_dict(self) -> dict:
        return {"beta": self.beta, "eps": self.eps, "entries": [asdict(e) for e in self.entries]}


@dataclass
class ExactQuantities:
    P: np.ndarray
    pi: np.ndarray
    t_mix: int
    t_rel: float | None
    pi_min: float
    reversible: bool
    distances: np.ndarray | None = None


def compute_exact(game: Game, beta: float, eps: float = exact.DEFAULT_EPS, cap: int = exact.DEFAULT_CAP) -> ExactQuantities:
    chain = LogitChain(game, beta)
    P = transition_matrix(chain)
    pi = exact.stationary(P)
    mix = exact.exact_mixing_time(P, pi, eps, cap)
    viol, _ = exact.reversibility_check(P, pi)
    t_rel = None
    reversible = viol <= exact.REVERSIBILITY_TOL
    if reversible:
        try:
            t_rel = exact.spectrum(P, pi).t_rel
        except (NotReversibleError, NumericalError):
            t_rel = None
    return ExactQuantities(P, pi, mix.t_mix, t_rel, float(pi.min()), reversible, mix.distances)


def _judge(entry: BoundEntry) -> None:
    if not entry.applicable or entry.exact is None or entry.value is None:
        return
    if entry.kind == "upper" and entry.target == "t_mix":
        entry.satisfied = entry.exact <= math.ceil(entry.value)
    elif entry.kind == "upper":
        entry.satisfied = entry.exact <= entry.value * (1 + 1e-9) + 1e-9
    elif entry.kind == "lower":
        entry.satisfied = entry.exact >= entry.value - 1e-9


def _na(key, formula, kind, target, reason) -> BoundEntry:
    return BoundEntry(key, formula, kind, target, False, reason)


def theory_report(
    game: Game,
    beta: float,
    eps: float = exact.DEFAULT_EPS,
    stats: PotentialStats | None = None,
    hill: HillReport | None = None,
    width: CutwidthReport | None = None,
    exact_q: ExactQuantities | None = None,
) -> BoundsReport:
    n, m, size = game.n, game.max_radix, game.size
    log_eps = math.log(1.0 / eps)
    entries: list[BoundEntry] = []
    potential = is_potential_game(game)
    t_mix = exact_q.t_mix if exact_q is not None else None
    t_rel = exact_q.t_rel if exact_q is not None else None

    if potential:
        phi = potential_of(game)
        stats = stats or potential_stats(phi, game.radices)
        hill = hill or zeta(phi, game.radices)
        dphi, lphi = stats.delta_global, stats.delta_local
        rel = 2 * m * n * math.exp(beta * dphi)
        entries.append(BoundEntry("delta_phi_relaxation", "2 m n exp(beta dPhi)", "upper", "t_rel", True, value=rel, exact=t_rel))
        entries.append(
            BoundEntry(
                "delta_phi_mixing",
                "2 m n exp(beta dPhi) (ln(1/eps) + beta dPhi + n ln m)",
                "upper",
                "t_mix",
                True,
                value=rel * (log_eps + beta * dphi + n * math.log(m)),
                exact=t_mix,
            )
        )
        c = beta * n * lphi
        if c < 1.0:
            alpha = (1.0 - c) / n
            val = math.ceil((math.log(n) + log_eps) / alpha)
            entries.append(
                BoundEntry(
                    "small_beta",
                    "ceil((ln n + ln(1/eps)) / alpha), alpha = (1 - beta n dphi) / n",
                    "upper",
                    "t_mix",
                    True,
                    value=float(val),
                    exact=t_mix,
                    extra={"c": c, "alpha": alpha},
                )
            )
        else:
            entries.append(_na("small_beta", "beta n dphi < 1", "upper", "t_mix", f"beta*n*dphi = {c:.4g} >= 1"))
        zrel = n * float(m) ** (2 * n + 1) * math.exp(beta * hill.zeta)
        entries.append(BoundEntry("zeta_relaxation", "n m^(2n+1) exp(beta zeta)", "upper", "t_rel", True, value=zrel, exact=t_rel, extra={"zeta": hill.zeta}))
        entries.append(
            BoundEntry(
                "zeta_mixing",
                "n m^(2n+1) exp(beta zeta) (ln(1/eps) + beta dPhi + ln|S|)",
                "upper",
                "t_mix",
                True,
                value=zrel * (log_eps + beta * dphi + math.log(size)),
                exact=t_mix,
            )
        )
    else:
        for key, target in (
            ("delta_phi_relaxation", "t_rel"),
            ("delta_phi_mixing", "t_mix"),
            ("small_beta", "t_mix"),
            ("zeta_relaxation", "t_rel"),
            ("zeta_mixing", "t_mix"),
        ):
            entries.append(_na(key, "", "upper", target, "not a potential game"))

    dom = dominant_profile(game)
    if dom is not None:
        t_star = max(1, math.ceil(2 * n * math.log(n)))
        k = math.ceil(2 * m**n * log_eps)
        entries.append(
            BoundEntry(
                "dominant_upper",
                "k t*, t* = ceil(2 n ln n), k = ceil(2 m^n ln(1/eps))",
                "upper",
                "t_mix",
                True,
                value=float(k * t_star),
                exact=t_mix,
                extra={"t_star": t_star, "k": k, "dominant_profile": list(dom)},
            )
        )
    else:
        entries.append(_na("dominant_upper", "", "upper", "t_mix", "no dominant profile"))

    if is_dominant_family(game) and m**n > 1 and beta > math.log(m**n - 1):
        entries.append(
            BoundEntry(
                "dominant_lower",
                "(1 - 2 eps)/2 * (m^n - 1)/(m - 1)",
                "lower",
                "t_mix",
                True,
                value=(1 - 2 * eps) / 2 * (m**n - 1) / (m - 1),
                exact=t_mix,
            )
        )
    else:
        entries.append(_na("dominant_lower", "", "lower", "t_mix", "needs the dominant construction with beta > ln(m^n - 1)"))

    if game.kind == COORDINATION and game.graph is not None:
        d0, d1 = game.deltas
        width = width or cutwidth(game.graph)
        chi = width.cutwidth
        dmax = max(d0, d1)
        grel = 2 * n**2 * math.exp(chi * (d0 + d1) * beta)
        entries.append(BoundEntry("graphical_relaxation", "2 n^2 exp(chi (d0 + d1) beta)", "upper", "t_rel", True, value=grel, exact=t_rel, extra={"cutwidth": chi}))
        entries.append(
            BoundEntry(
                "graphical_mixing",
                "2 n^3 exp(chi (d0 + d1) beta) (n d0 beta + 1)",
                "upper",
                "t_mix",
                True,
                value=2 * n**3 * math.exp(chi * (d0 + d1) * beta) * (n * dmax * beta + 1),
                exact=t_mix,
                extra={"cutwidth": chi},
            )
        )
        if game.graph.is_ring() and d0 == d1:
            grow = 1 + math.exp(2 * d0 * beta)
            entries.append(
                BoundEntry(
                    "ring_upper",
                    "ceil((ln n + ln(1/eps)) n (1 + exp(2 delta beta)) / 2)",
                    "upper",
                    "t_mix",
                    True,
                    value=float(math.ceil((math.log(n) + log_eps) * n * grow / 2)),
                    exact=t_mix,
                )
            )
            entries.append(BoundEntry("ring_lower", "(1 - 2 eps)(1 + exp(2 delta beta)) / 2", "lower", "t_mix", True, value=(1 - 2 * eps) * grow / 2, exact=t_mix))
        else:
            entries.append(_na("ring_upper", "", "upper", "t_mix", "needs a ring with d0 == d1"))
            entries.append(_na("ring_lower", "", "lower", "t_mix", "needs a ring with d0 == d1"))
        if game.graph.is_clique():
            entries.append(_clique_landscape(game, d0, d1))
        else:
            entries.append(_na("clique_landscape", "", "landscape", "phi", "graph is not a clique"))
    else:
        for key, kind, target in (
            ("graphical_relaxation", "upper", "t_rel"),
            ("graphical_mixing", "upper", "t_mix"),
            ("ring_upper", "upper", "t_mix"),
            ("ring_lower", "lower", "t_mix"),
            ("clique_landscape", "landscape", "phi"),
        ):
            entries.append(_na(key, "", kind, target, "not a graphical coordination game"))

    if exact_q is not None and t_rel is not None:
        entries.append(
            BoundEntry("relaxation_lower", "(t_rel - 1) ln(1/(2 eps))", "lower", "t_mix", True, value=(t_rel - 1) * math.log(1 / (2 * eps)), exact=t_mix)
        )
        entries.append(
            BoundEntry("relaxation_upper", "t_rel ln(1/(eps pi_min))", "upper", "t_mix", True, value=t_rel * math.log(1 / (eps * exact_q.pi_min)), exact=t_mix)
        )
    else:
        entries.append(_na("relaxation_lower", "", "lower", "t_mix", "needs exact reversible analysis"))
        entries.append(_na("relaxation_upper", "", "upper", "t_mix", "needs exact reversible analysis"))

    if exact_q is not None:
        bn = best_bottleneck(game, exact_q.P, exact_q.pi, eps)
        if bn is not None:
            entries.append(
                BoundEntry(
                    "bottleneck_lower",
                    "(1 - 2 eps) / (2 B(R))",
                    "lower",
                    "t_mix",
                    True,
                    value=bn.lower_bound,
                    exact=t_mix,
                    extra={"set": bn.label, "ratio": bn.ratio, "pi_set": bn.pi_set},
                )
            )
        else:
            entries.append(_na("bottleneck_lower", "", "lower", "t_mix", "no candidate set with pi(R) <= 1/2"))
    else:
        entries.append(_na("bottleneck_lower", "", "lower", "t_mix", "needs exact analysis"))

    for e in entries:
        _judge(e)
    return BoundsReport(beta, eps, entries)


def clique_weight_potential(n: int, k: int, d0: float, d1: float) -> float:
    """Potential of any clique profile with ``k`` players on strategy 1."""
    return -((n - k) * (n - k - 1) / 2 * d0 + k * (k - 1) / 2 * d1)


def clique_peak_weight(n: int, d0: float, d1: float) -> int:
    """Integer nearest to the continuous maximiser ``(n-1) d0/(d0+d1) + 1/2``."""
    return int(math.floor((n - 1) * d0 / (d0 + d1) + 0.5 + 0.5))


def _clique_landscape(game: Game, d0: float, d1: float) -> BoundEntry:
    n = game.n
    phi = potential_of(game)
    w = all_profiles(game.radices).sum(axis=1)
    formula_ok = all(
        np.allclose(phi[w == k], clique_weight_potential(n, k, d0, d1), rtol=0, atol=1e-9) for k in range(n + 1)
    )
    k_star = clique_peak_weight(n, d0, d1)
    peak = clique_weight_potential(n, k_star, d0, d1)
    zeta_pred = peak - max(clique_weight_potential(n, 0, d0, d1), clique_weight_potential(n, n, d0, d1))
    hill = zeta(phi, game.radices)
    ok = formula_ok and abs(peak - phi.max()) <= 1e-9 and abs(zeta_pred - hill.zeta) <= 1e-9
    return BoundEntry(
        "clique_landscape",
        "k* = round((n-1) d0/(d0+d1) + 1/2), phi(k) = -((n-k)(n-k-1)/2 d0 + k(k-1)/2 d1)",
        "landscape",
        "phi",
        True,
        value=float(k_star),
        exact=float(hill.zeta),
        satisfied=bool(ok),
        extra={"phi_max": peak, "zeta_predicted": zeta_pred},
    )
