"""Logit update rule and the exact transition matrix of the logit dynamics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .game import Game, check_budget, dense_budget, profile_index, strides

# cached per-profile CDF tables are used while |S| * sum(m_i) stays below this
CDF_CACHE_ENTRIES = 2**22


def softmax(values, beta: float) -> np.ndarray:
    """``exp(beta * v) / sum(exp(beta * v))`` with the maximum shifted out.

    Entries that underflow are exactly zero; the result is renormalised.
    """
    v = np.asarray(values, dtype=np.float64)
    if beta == 0.0:
        return np.full(v.shape, 1.0 / v.size)
    w = np.exp(beta * (v - v.max()))
    return w / w.sum()


@dataclass(frozen=True)
class LogitChain:
    game: Game
    beta: float

    def __post_init__(self):
        beta = float(self.beta)
        if not (beta >= 0.0 and math.isfinite(beta)):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return self.game.n

    def choice_tensor(self, i: int) -> np.ndarray:
        """``sigma_i(x_i | x)`` evaluated at every profile, as a flat array."""
        cache = self.__dict__.setdefault("_choice", {})
        out = cache.get(i)
        if out is None:
            t = self.game.player_tensor(i)
            if self.beta == 0.0:
                s = np.full(t.shape, 1.0 / t.shape[i])
            else:
                w = np.exp(self.beta * (t - t.max(axis=i, keepdims=True)))
                s = w / w.sum(axis=i, keepdims=True)
            out = s.reshape(-1, order="F")
            out.setflags(write=False)
            cache[i] = out
        return out


def update_distribution(chain: LogitChain, x: Sequence[int], i: int) -> np.ndarray:
    """Distribution of player ``i``'s new strategy when revising at ``x``."""
    game = chain.game
    x = list(x)
    profile_index(x, game.radices)
    vals = []
    for z in range(game.radices[i]):
        x[i] = z
        vals.append(game.utility(i, x))
    return softmax(vals, chain.beta)


def _coo(chain: LogitChain):
    game = chain.game
    size = game.size
    n = game.n
    idx = np.arange(size, dtype=np.int64)
    rows, cols, vals = [], [], []
    diag = np.zeros(size)
    for i, (s, m) in enumerate(zip(strides(game.radices), game.radices)):
        sig = chain.choice_tensor(i)
        diag += sig
        xi = (idx // s) % m
        for a in range(m):
            mask = xi != a
            src = idx[mask]
            dst = src + (a - xi[mask]) * s
            rows.append(src)
            cols.append(dst)
            vals.append(sig[dst] / n)
    rows.append(idx)
    cols.append(idx)
    vals.append(diag / n)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def transition_matrix(chain: LogitChain) -> np.ndarray:
    """Dense row-stochastic ``|S| x |S|`` transition matrix."""
    size = chain.game.size
    check_budget(size, dense_budget(), "dense transition matrix")
    r, c, v = _coo(chain)
    P = np.zeros((size, size))
    np.add.at(P, (r, c), v)
    return P


def transition_sparse(chain: LogitChain) -> sp.csr_matrix:
    """Same matrix in CSR form; allowed up to the general state budget."""
    size = chain.game.size
    check_budget(size)
    r, c, v = _coo(chain)
    return sp.csr_matrix((v, (r, c)), shape=(size, size))


def is_ergodic(P) -> bool:
    """Strongly connected support and a positive diagonal."""
    M = sp.csr_matrix(P)
    n_comp, _ = connected_components(M > 0, directed=True, connection="strong")
    diag = M.diagonal()
    return n_comp == 1 and bool(np.all(diag > 0))


def _cumulative(chain: LogitChain, i: int) -> np.ndarray:
    """Per-profile CDF table ``(|S|, m_i)`` over player ``i``'s strategies."""
    cache = chain.__dict__.setdefault("_cdf", {})
    out = cache.get(i)
    if out is None:
        game = chain.game
        s = int(strides(game.radices)[i])
        m = game.radices[i]
        idx = np.arange(game.size, dtype=np.int64)
        base = idx - ((idx // s) % m) * s
        sig = chain.choice_tensor(i)
        probs = np.stack([sig[base + a * s] for a in range(m)], axis=1)
        out = np.cumsum(probs, axis=1)
        out[:, -1] = 1.0
        cache[i] = out
    return out


def sample_choice(cdf_row: np.ndarray, u: float) -> int:
    """Inverse-CDF draw in strategy-index order."""
    k = int(np.searchsorted(cdf_row, u, side="right"))
    return min(k, cdf_row.size - 1)


def step(chain: LogitChain, x: Sequence[int], rng: np.random.Generator) -> tuple[int, ...]:
    """One revision: a uniform player re-draws from the logit distribution."""
    game = chain.game
    i = int(rng.integers(game.n))
    u = float(rng.random())
    if game.size * sum(game.radices) <= CDF_CACHE_ENTRIES:
        k = profile_index(x, game.radices)
        z = sample_choice(_cumulative(chain, i)[k], u)
    else:
        sig = update_distribution(chain, x, i)
        z = sample_choice(np.cumsum(sig), u)
    y = list(x)
    y[i] = z
    return tuple(y)


def sample_steps(chain: LogitChain, x: Sequence[int], size: int, rng: np.random.Generator) -> np.ndarray:
    """Flat indices of ``size`` independent one-step successors of ``x``."""
    game = chain.game
    k = profile_index(x, game.radices)
    st = strides(game.radices)
    players = rng.integers(game.n, size=size)
    us = rng.random(size)
    out = np.empty(size, dtype=np.int64)
    for i in range(game.n):
        mask = players == i
        cdf = np.cumsum(update_distribution(chain, x, i))
        cdf[-1] = 1.0
        z = np.minimum(np.searchsorted(cdf, us[mask], side="right"), cdf.size - 1)
        out[mask] = k + (z - x[i]) * st[i]
    return out
