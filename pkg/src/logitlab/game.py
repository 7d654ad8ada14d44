"""Finite strategic games, profile indexing and exact potentials.

Profiles are tuples of strategy indices.  The profile space is enumerated in
little-endian mixed radix: player 0 varies fastest, so the flat index of
``x`` is ``sum(x[i] * stride[i])`` with ``stride[0] = 1``.  A dense utility
table of shape ``(n, |S|)`` therefore reshapes to a per-player tensor with
``order="F"``.

Sign convention for potentials: a unilateral deviation that raises a
player's utility lowers the potential by the same amount, so equilibria sit
at potential minima.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    BudgetError,
    GraphError,
    NotPotentialError,
    RangeError,
    ShapeError,
)

DEFAULT_STATE_BUDGET = 2**20
DENSE_BUDGET = 2**13
DEFAULT_TOL = 1e-9

GENERIC = "generic"
POTENTIAL = "potential"
COORDINATION = "coordination"
KINDS = (GENERIC, POTENTIAL, COORDINATION)


def state_budget() -> int:
    """Cap on |S| for exact work; ``LOGITLAB_BUDGET`` overrides the default."""
    raw = os.environ.get("LOGITLAB_BUDGET")
    if raw is None or raw.strip() == "":
        return DEFAULT_STATE_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise BudgetError(f"LOGITLAB_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        raise BudgetError("LOGITLAB_BUDGET must be positive")
    return value


def dense_budget() -> int:
    return min(DENSE_BUDGET, state_budget())


def check_budget(size: int, cap: int | None = None, what: str = "state space") -> None:
    cap = state_budget() if cap is None else cap
    if size > cap:
        raise BudgetError(f"{what} has {size} states, above the cap of {cap}")


# ---------------------------------------------------------------------------
# profile indexing


def space_size(radices: Sequence[int]) -> int:
    return math.prod(int(m) for m in radices)


def strides(radices: Sequence[int]) -> np.ndarray:
    out = np.ones(len(radices), dtype=np.int64)
    for i in range(1, len(radices)):
        out[i] = out[i - 1] * int(radices[i - 1])
    return out


def profile_index(profile: Sequence[int], radices: Sequence[int]) -> int:
    if len(profile) != len(radices):
        raise RangeError(f"profile has {len(profile)} entries, expected {len(radices)}")
    index = 0
    stride = 1
    for i, (x, m) in enumerate(zip(profile, radices)):
        x = int(x)
        if not 0 <= x < m:
            raise RangeError(f"entry {i} = {x} outside [0, {m})")
        index += x * stride
        stride *= int(m)
    return index


def index_profile(index: int, radices: Sequence[int]) -> tuple[int, ...]:
    size = space_size(radices)
    index = int(index)
    if not 0 <= index < size:
        raise RangeError(f"index {index} outside [0, {size})")
    out = []
    for m in radices:
        index, x = divmod(index, int(m))
        out.append(x)
    return tuple(out)


def all_profiles(radices: Sequence[int]) -> np.ndarray:
    """Array of shape ``(|S|, n)``; row ``k`` is ``index_profile(k)``."""
    size = space_size(radices)
    idx = np.arange(size, dtype=np.int64)
    cols = [(idx // s) % m for s, m in zip(strides(radices), radices)]
    if not cols:
        return np.zeros((size, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def hamming_neighbors(index: int, radices: Sequence[int]) -> list[int]:
    """Flat indices of every profile at Hamming distance exactly one."""
    out = []
    st = strides(radices)
    for i, m in enumerate(radices):
        xi = (index // int(st[i])) % int(m)
        for a in range(int(m)):
            if a != xi:
                out.append(int(index + (a - xi) * st[i]))
    return out


def hamming_edges(radices: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Unordered Hamming edges as two index arrays ``(lo, hi)`` with lo < hi."""
    size = space_size(radices)
    idx = np.arange(size, dtype=np.int64)
    lo, hi = [], []
    for s, m in zip(strides(radices), radices):
        xi = (idx // s) % m
        for delta in range(1, int(m)):
            mask = xi + delta < m
            lo.append(idx[mask])
            hi.append(idx[mask] + delta * s)
    if not lo:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(lo), np.concatenate(hi)


def hamming_distance(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(1 for a, b in zip(x, y) if a != b)


# ---------------------------------------------------------------------------
# social graphs


@dataclass(frozen=True)
class SocialGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("graph needs at least one vertex")
        seen = set()
        norm = []
        for e in self.edges:
            if len(e) != 2:
                raise GraphError(f"edge {e!r} is not a pair")
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SocialGraph":
        return cls(int(n), tuple(tuple(e) for e in edges))

    @classmethod
    def ring(cls, n: int) -> "SocialGraph":
        if n < 3:
            raise GraphError("a ring needs at least 3 vertices")
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def clique(cls, n: int) -> "SocialGraph":
        return cls(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def path(cls, n: int) -> "SocialGraph":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def is_ring(self) -> bool:
        if self.n < 3 or len(self.edges) != self.n:
            return False
        if any(d != 2 for d in self.degrees()):
            return False
        # 2-regular and connected means a single cycle
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def is_clique(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1) // 2


# ---------------------------------------------------------------------------
# games


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Game:
    """A finite game in strategic form.

    Utilities come either as a dense ``(n, |S|)`` table or as a callback
    ``utility_fn(i, profile) -> float``.  ``potential`` is an optional flat
    table; ``graph`` and ``payoffs`` ``(a, b, c, d)`` are set for graphical
    coordination games.
    """

    radices: tuple[int, ...]
    utilities: np.ndarray | None = None
    kind: str = GENERIC
    potential: np.ndarray | None = None
    graph: SocialGraph | None = None
    payoffs: tuple[float, float, float, float] | None = None
    utility_fn: Callable[[int, tuple[int, ...]], float] | None = field(
        default=None, compare=False, repr=False
    )

    def __post_init__(self):
        radices = tuple(int(m) for m in self.radices)
        object.__setattr__(self, "radices", radices)
        if len(radices) < 1:
            raise RangeError("a game needs at least one player")
        if any(m < 1 for m in radices):
            raise RangeError(f"every radix must be >= 1, got {radices}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown game kind {self.kind!r}")
        size = space_size(radices)
        check_budget(size)
        if self.utilities is None and self.utility_fn is None:
            raise ShapeError("a game needs a utility table or a utility callback")
        if self.utilities is not None:
            u = _frozen(self.utilities)
            if u.shape != (len(radices), size):
                raise ShapeError(f"utility table has shape {u.shape}, expected {(len(radices), size)}")
            if not np.all(np.isfinite(u)):
                raise ShapeError("utilities must be finite")
            object.__setattr__(self, "utilities", u)
        if self.potential is not None:
            phi = _frozen(self.potential)
            if phi.shape != (size,):
                raise ShapeError(f"potential table has shape {phi.shape}, expected {(size,)}")
            object.__setattr__(self, "potential", phi)
        if self.payoffs is not None:
            object.__setattr__(self, "payoffs", tuple(float(v) for v in self.payoffs))

    @property
    def n(self) -> int:
        return len(self.radices)

    @property
    def size(self) -> int:
        return space_size(self.radices)

    @property
    def max_radix(self) -> int:
        return max(self.radices)

    def utility(self, i: int, profile: Sequence[int]) -> float:
        if self.utilities is not None:
            return float(self.utilities[i, profile_index(profile, self.radices)])
        return float(self.utility_fn(i, tuple(int(v) for v in profile)))

    def utility_table(self) -> np.ndarray:
        """Dense ``(n, |S|)`` utilities, materialising a callback if needed."""
        if self.utilities is not None:
            return self.utilities
        cached = self.__dict__.get("_table")
        if cached is None:
            profiles = all_profiles(self.radices)
            table = np.array(
                [[self.utility_fn(i, tuple(int(v) for v in p)) for p in profiles] for i in range(self.n)],
                dtype=np.float64,
            )
            cached = _frozen(table)
            object.__setattr__(self, "_table", cached)
        return cached

    def player_tensor(self, i: int) -> np.ndarray:
        return self.utility_table()[i].reshape(self.radices, order="F")

    @property
    def deltas(self) -> tuple[float, float] | None:
        if self.payoffs is None:
            return None
        a, b, c, d = self.payoffs
        return a - d, b - c


def games_equal(g: Game, h: Game, tol: float = 1e-12) -> bool:
    """Field-by-field comparison with a tolerance on numeric tables."""
    if g.radices != h.radices or g.kind != h.kind:
        return False
    if not np.allclose(g.utility_table(), h.utility_table(), rtol=0.0, atol=tol):
        return False
    if (g.potential is None) != (h.potential is None):
        return False
    if g.potential is not None and not np.allclose(g.potential, h.potential, rtol=0.0, atol=tol):
        return False
    if g.graph != h.graph:
        return False
    if (g.payoffs is None) != (h.payoffs is None):
        return False
    if g.payoffs is not None and not np.allclose(g.payoffs, h.payoffs, rtol=0.0, atol=tol):
        return False
    return True


# ---------------------------------------------------------------------------
# potentials


@dataclass(frozen=True)
class PotentialCheck:
    ok: bool
    violation: float
    witness: dict | None

    def __bool__(self) -> bool:
        return self.ok


def verify_potential(game: Game, potential, tol: float = DEFAULT_TOL) -> PotentialCheck:
    """Check ``u_i(a,x_-i) - u_i(b,x_-i) == phi(b,x_-i) - phi(a,x_-i)`` everywhere.

    Equivalently ``u_i + phi`` must be constant along every player's axis.
    """
    phi = np.asarray(potential, dtype=np.float64)
    if phi.shape != (game.size,):
        raise ShapeError(f"potential table has shape {phi.shape}, expected {(game.size,)}")
    phi_t = phi.reshape(game.radices, order="F")
    worst = 0.0
    witness = None
    for i in range(game.n):
        w = game.player_tensor(i) + phi_t
        spread = w.max(axis=i) - w.min(axis=i)
        k = int(np.argmax(spread))
        if spread.size and spread.flat[k] > worst:
            worst = float(spread.flat[k])
            others = iter(np.unravel_index(k, spread.shape))
            coords = [0 if j == i else int(next(others)) for j in range(game.n)]
            vals = [w[tuple(coords[:i] + [a] + coords[i + 1 :])] for a in range(game.radices[i])]
            a_hi, a_lo = int(np.argmax(vals)), int(np.argmin(vals))
            x = tuple(coords[:i] + [a_hi] + coords[i + 1 :])
            y = tuple(coords[:i] + [a_lo] + coords[i + 1 :])
            witness = {"player": i, "x": x, "y": y, "violation": worst}
    return PotentialCheck(worst <= tol, worst, witness if worst > tol else None)


def extract_potential(game: Game, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Integrate the potential identity from the all-zeros profile.

    ``phi(0,...,0) = 0``; each profile is reached by fixing player 0's entry,
    then player 1's, and so on.  Raises :class:`NotPotentialError` when the
    resulting table fails :func:`verify_potential`.
    """
    size = game.size
    phi = np.zeros(size, dtype=np.float64)
    table = game.utility_table()
    st = strides(game.radices)
    block = 1
    for i, m in enumerate(game.radices):
        # profiles whose entries beyond player i are all zero occupy [0, block * m)
        base = np.arange(block, dtype=np.int64)
        for a in range(1, m):
            tgt = base + a * int(st[i])
            phi[tgt] = phi[base] + table[i, base] - table[i, tgt]
        block *= m
    check = verify_potential(game, phi, tol)
    if not check.ok:
        w = check.witness
        raise NotPotentialError(
            f"not a potential game: player {w['player']} violates the potential identity "
            f"between {w['x']} and {w['y']} by {w['violation']:.3g}",
            witness=w,
        )
    return phi


def potential_of(game: Game, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The attached potential if present, otherwise an extracted one."""
    if game.potential is not None:
        return game.potential
    cached = game.__dict__.get("_extracted")
    if cached is None:
        cached = _frozen(extract_potential(game, tol))
        object.__setattr__(game, "_extracted", cached)
    return cached


def is_potential_game(game: Game, tol: float = DEFAULT_TOL) -> bool:
    try:
        potential_of(game, tol)
    except NotPotentialError:
        return False
    return True


def dominant_profile(game: Game, tol: float = 0.0) -> tuple[int, ...] | None:
    """A profile of weakly dominant strategies, or None if some player has none.

    Strategy ``s`` dominates when ``u_i(s, x_-i) >= u_i(s', x_-i)`` for every
    ``s'`` and every ``x_-i``; the lowest such index is returned per player.
    """
    out = []
    for i in range(game.n):
        t = game.player_tensor(i)
        best = t.max(axis=i, keepdims=True)
        found = None
        for s in range(game.radices[i]):
            sl = np.take(t, [s], axis=i)
            if np.all(sl >= best - tol):
                found = s
                break
        if found is None:
            return None
        out.append(found)
    return tuple(out)
