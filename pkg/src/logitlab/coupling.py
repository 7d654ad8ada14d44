"""Monte Carlo couplings of the logit chain, coupling-time TV estimates and
hitting-time estimates.

Random streams: a run is identified by a root seed and a key tuple.  Trial
``k`` of pair ``p`` draws from ``PCG64(SeedSequence(seed, spawn_key=(p, k)))``,
so each trial's result depends only on its own key and trials can be run in
any order or in parallel.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .game import index_profile, profile_index, strides
from .kernel import CDF_CACHE_ENTRIES, LogitChain, _cumulative, update_distribution

DEFAULT_HORIZON = 10**6
Z95 = 1.959963984540054
_CHUNK = 4096


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


class _Tables:
    """Per-player probability and CDF rows indexed by flat profile."""

    def __init__(self, chain: LogitChain):
        self.chain = chain
        game = chain.game
        self.radices = game.radices
        self.n = game.n
        self.st = [int(s) for s in strides(game.radices)]
        self.cached = game.size * sum(game.radices) <= CDF_CACHE_ENTRIES
        if self.cached:
            self.cdf = [_cumulative(chain, i).tolist() for i in range(self.n)]
            self.prob = [np.diff(_cumulative(chain, i), axis=1, prepend=0.0).tolist() for i in range(self.n)]

    def probs(self, i: int, k: int) -> list[float]:
        if self.cached:
            return self.prob[i][k]
        return update_distribution(self.chain, index_profile(k, self.radices), i).tolist()

    def cdf_row(self, i: int, k: int) -> list[float]:
        if self.cached:
            return self.cdf[i][k]
        c = np.cumsum(update_distribution(self.chain, index_profile(k, self.radices), i))
        c[-1] = 1.0
        return c.tolist()

    def move(self, k: int, i: int, z: int) -> int:
        s, m = self.st[i], self.radices[i]
        return k + (z - (k // s) % m) * s


def _pick(cdf: Sequence[float], u: float) -> int:
    return min(bisect.bisect_right(cdf, u), len(cdf) - 1)


def interval_labels(sx: Sequence[float], sy: Sequence[float], u: float) -> tuple[int, int]:
    """Strategies both chains take for a shared uniform ``u``.

    ``[0, l)`` holds segments of length ``min(sx[z], sy[z])`` in strategy
    order; each chain's leftover mass ``s[z] - min`` is laid out from 1
    downward, again in strategy order.
    """
    acc = 0.0
    common = [min(a, b) for a, b in zip(sx, sy)]
    for z, c in enumerate(common):
        acc += c
        if u < acc:
            return z, z
    return _residual(sx, common, u), _residual(sy, common, u)


def _residual(s, common, u: float) -> int:
    top = 1.0
    last = None
    for z, (p, c) in enumerate(zip(s, common)):
        r = p - c
        if r <= 0.0:
            continue
        last = z
        top -= r
        if u >= top:
            return z
    # u fell into rounding slack
    return last if last is not None else int(np.argmax(s))


def coupled_step(chain: LogitChain, x: Sequence[int], y: Sequence[int], rng: np.random.Generator) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """One step of the interval coupling from ``(x, y)``."""
    i = int(rng.integers(chain.n))
    u = float(rng.random())
    sx = update_distribution(chain, x, i)
    sy = update_distribution(chain, y, i) if tuple(x) != tuple(y) else sx
    zx, zy = interval_labels(sx.tolist(), sy.tolist(), u)
    x2, y2 = list(x), list(y)
    x2[i], y2[i] = zx, zy
    return tuple(x2), tuple(y2)


def coupled_batch(chain: LogitChain, x: Sequence[int], y: Sequence[int], size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Flat indices of ``size`` independent coupled successors of ``(x, y)``."""
    game = chain.game
    kx, ky = profile_index(x, game.radices), profile_index(y, game.radices)
    st = strides(game.radices)
    players = rng.integers(game.n, size=size)
    us = rng.random(size)
    ox = np.empty(size, dtype=np.int64)
    oy = np.empty(size, dtype=np.int64)
    for i in range(game.n):
        mask = players == i
        u = us[mask]
        sx = update_distribution(chain, x, i)
        sy = update_distribution(chain, y, i)
        common = np.minimum(sx, sy)
        edges = np.cumsum(common)
        zx = np.full(u.size, -1)
        inside = u < edges[-1]
        zc = np.minimum(np.searchsorted(edges, u[inside], side="right"), sx.size - 1)
        zx[inside] = zc
        zy = zx.copy()
        for s, out in ((sx, zx), (sy, zy)):
            r = s - common
            tops = 1.0 - np.cumsum(r)  # segment z is [tops[z], tops[z] + r[z])
            rest = ~inside
            pick = np.full(rest.sum(), -1)
            ur = u[rest]
            for z in range(s.size):
                if r[z] > 0.0:
                    hit = (pick < 0) & (ur >= tops[z])
                    pick[hit] = z
            pick[pick < 0] = int(np.flatnonzero(r > 0)[-1]) if np.any(r > 0) else int(np.argmax(s))
            out[rest] = pick
        ox[mask] = kx + (zx - x[i]) * st[i]
        oy[mask] = ky + (zy - y[i]) * st[i]
    return ox, oy


def grand_step(chain: LogitChain, states: Sequence[Sequence[int]], rng: np.random.Generator) -> list[tuple[int, ...]]:
    """Move every chain with one shared ``(i, U)`` by inverse CDF."""
    i = int(rng.integers(chain.n))
    u = float(rng.random())
    out = []
    for x in states:
        c = np.cumsum(update_distribution(chain, x, i))
        c[-1] = 1.0
        z = _pick(c.tolist(), u)
        y = list(x)
        y[i] = z
        out.append(tuple(y))
    return out


@dataclass(frozen=True)
class CouplingRun:
    x: tuple[int, ...]
    y: tuple[int, ...]
    horizon: int
    tau: int | None  # None when censored
    key: tuple[int, ...]

    @property
    def censored(self) -> bool:
        return self.tau is None


def _couple_indices(tables: _Tables, kx: int, ky: int, horizon: int, rng: np.random.Generator) -> int | None:
    if kx == ky:
        return 0
    t = 0
    while t < horizon:
        m = min(_CHUNK, horizon - t)
        players = rng.integers(tables.n, size=m).tolist()
        us = rng.random(m).tolist()
        for i, u in zip(players, us):
            t += 1
            zx, zy = interval_labels(tables.probs(i, kx), tables.probs(i, ky), u)
            kx, ky = tables.move(kx, i, zx), tables.move(ky, i, zy)
            if kx == ky:
                return t
    return None


def coupling_time(
    chain: LogitChain,
    x: Sequence[int],
    y: Sequence[int],
    horizon: int = DEFAULT_HORIZON,
    seed: int = 0,
    key: tuple[int, ...] = (0,),
) -> CouplingRun:
    """First meeting time of the interval coupling, censored at ``horizon``.

    After meeting the copies make identical moves, so they stay together.
    """
    tables = _Tables(chain)
    rng = trial_rng(seed, *key)
    kx, ky = profile_index(x, chain.game.radices), profile_index(y, chain.game.radices)
    tau = _couple_indices(tables, kx, ky, horizon, rng)
    return CouplingRun(tuple(x), tuple(y), horizon, tau, tuple(key))


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class TVEstimate:
    t: int
    estimate: float  # worst pair's fraction of runs not coupled by t
    half_width: float  # distance from estimate to the 95% Wilson upper limit
    pair: tuple[tuple[int, ...], tuple[int, ...]] | None
    trials: int
    per_pair: tuple[float, ...]


def default_pairs(radices: Sequence[int], seed: int, extra: int = 4) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs of unanimity profiles plus ``extra`` random pairs."""
    n = len(radices)
    top = min(radices)
    uni = [(a,) * n for a in range(top)]
    pairs = [(uni[a], uni[b]) for a in range(len(uni)) for b in range(a + 1, len(uni))]
    rng = trial_rng(seed, 2**31 - 1)
    for _ in range(extra):
        x = tuple(int(rng.integers(m)) for m in radices)
        y = tuple(int(rng.integers(m)) for m in radices)
        if x != y:
            pairs.append((x, y))
    return pairs


def coupling_tv_bound(
    chain: LogitChain,
    t: int,
    trials: int,
    seed: int = 0,
    pairs: Iterable[tuple[Sequence[int], Sequence[int]]] | None = None,
) -> TVEstimate:
    """Upper estimate of ``max_{x,y} TV(P^t(x,.), P^t(y,.))`` over a pair family.

    For each pair the fraction of ``trials`` coupled runs still apart at time
    ``t`` estimates ``P(tau > t)``, which bounds that pair's distance.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if pairs is None:
        pairs = default_pairs(chain.game.radices, seed)
    pairs = [(tuple(x), tuple(y)) for x, y in pairs]
    tables = _Tables(chain)
    rad = chain.game.radices
    best, arg, best_fail = -1.0, None, 0
    per = []
    for p, (x, y) in enumerate(pairs):
        kx, ky = profile_index(x, rad), profile_index(y, rad)
        fails = 0
        for k in range(trials):
            if _couple_indices(tables, kx, ky, t, trial_rng(seed, p, k)) is None:
                fails += 1
        frac = fails / trials
        per.append(frac)
        if frac > best:
            best, arg, best_fail = frac, (x, y), fails
    if arg is None:
        return TVEstimate(t, 0.0, 0.0, None, trials, ())
    upper = wilson_interval(best_fail, trials)[1]
    return TVEstimate(t, best, upper - best, arg, trials, tuple(per))


@dataclass(frozen=True)
class HittingSummary:
    mean: float | None  # over uncensored runs
    median: float | None  # None when at least half the runs are censored
    censored: int
    trials: int
    horizon: int
    times: tuple[int | None, ...]


def _target_test(chain: LogitChain, target) -> Callable[[int], bool]:
    rad = chain.game.radices
    if callable(target):
        memo: dict[int, bool] = {}

        def test(k: int) -> bool:
            hit = memo.get(k)
            if hit is None:
                hit = memo[k] = bool(target(index_profile(k, rad)))
            return hit

        return test
    keys = set()
    for item in target:
        keys.add(profile_index(item, rad) if isinstance(item, (tuple, list)) else int(item))
    return keys.__contains__


def hitting_time(tables: _Tables, k: int, test: Callable[[int], bool], horizon: int, rng: np.random.Generator) -> int | None:
    if test(k):
        return 0
    t = 0
    while t < horizon:
        m = min(_CHUNK, horizon - t)
        players = rng.integers(tables.n, size=m).tolist()
        us = rng.random(m).tolist()
        for i, u in zip(players, us):
            t += 1
            k = tables.move(k, i, _pick(tables.cdf_row(i, k), u))
            if test(k):
                return t
    return None


def estimate_hitting(
    chain: LogitChain,
    start: Sequence[int],
    target,
    trials: int,
    horizon: int = DEFAULT_HORIZON,
    seed: int = 0,
) -> HittingSummary:
    """Hitting time of ``target`` (a predicate on profiles or a collection of
    profiles / flat indices) from ``start`` over independent runs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tables = _Tables(chain)
    test = _target_test(chain, target)
    k0 = profile_index(start, chain.game.radices)
    times = tuple(hitting_time(tables, k0, test, horizon, trial_rng(seed, 0, k)) for k in range(trials))
    done = sorted(t for t in times if t is not None)
    censored = trials - len(done)
    mean = float(np.mean(done)) if done else None
    median = None
    if censored < trials / 2:
        ranked = done + [math.inf] * censored
        median = float(np.median(ranked))
    return HittingSummary(mean, median, censored, trials, horizon, times)
