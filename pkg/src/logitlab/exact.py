"""Exact convergence quantities for a chain given as a dense matrix.

Mixing times come from explicit matrix powers, never from eigenvalues: rows
``P^t(x, .)`` are advanced one step at a time, and once that gets long the
search switches to repeated squaring plus binary lifting over dyadic powers.
Both paths evaluate the same stopping rule ``max_x TV(P^t(x,.), pi) <= eps``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order
from scipy.special import logsumexp

from .errors import NotReversibleError, NumericalError, ShapeError, TruncationError
from .kernel import is_ergodic

STATIONARY_RESIDUAL = 1e-10
REVERSIBILITY_TOL = 1e-9
DEFAULT_EPS = 0.25
DEFAULT_CAP = 10**12
ITERATE_LIMIT = 20_000


def gibbs(potential, beta: float) -> np.ndarray:
    """``pi(x) = exp(-beta * phi(x)) / Z``, shifted by the minimum for stability."""
    phi = np.asarray(potential, dtype=np.float64)
    if beta == 0.0:
        return np.full(phi.size, 1.0 / phi.size)
    w = np.exp(-beta * (phi - phi.min()))
    return w / w.sum()


def stationary(P) -> np.ndarray:
    """Solve ``pi P = pi`` with one balance equation swapped for ``sum(pi) = 1``."""
    P = np.asarray(P, dtype=np.float64)
    size = P.shape[0]
    if P.shape != (size, size):
        raise ShapeError(f"transition matrix must be square, got {P.shape}")
    if not is_ergodic(P):
        raise NumericalError("chain is not ergodic; stationary distribution is not unique")
    A = P.T - np.eye(size)
    A[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular stationary system: {exc}") from exc
    pi = np.where(pi < 0.0, 0.0, pi)
    pi /= pi.sum()
    tree = _balanced(P)
    if tree is not None and tv_distance(tree, pi) <= STATIONARY_RESIDUAL:
        pi = tree
    resid = float(np.abs(pi @ P - pi).max())
    if resid > STATIONARY_RESIDUAL:
        raise NumericalError(f"stationary residual {resid:.3g} exceeds {STATIONARY_RESIDUAL}")
    return pi


def _balanced(P: np.ndarray) -> np.ndarray | None:
    """Stationary law of a reversible chain built in log space from detailed
    balance along a spanning tree, or ``None`` when the chain is not reversible.

    The linear solve loses every entry below about 1e-16 of the total mass;
    ratios ``P(x,y)/P(y,x)`` keep them to full relative precision.
    """
    off = P.copy()
    np.fill_diagonal(off, 0.0)
    if np.any((off > 0) != (off.T > 0)):
        return None
    rows, cols = np.nonzero(off)
    with np.errstate(divide="ignore"):
        logr = np.log(off[rows, cols]) - np.log(off[cols, rows])
    order, pred = breadth_first_order(sp.csr_matrix(off), 0, directed=False, return_predecessors=True)
    if order.size != P.shape[0]:
        return None
    lp = np.zeros(P.shape[0])
    for v in order[1:]:
        u = pred[v]
        lp[v] = lp[u] + np.log(off[u, v]) - np.log(off[v, u])
    # every edge, not only the tree ones, must balance
    if np.abs(lp[rows] - lp[cols] + logr).max(initial=0.0) > 1e-8:
        return None
    return np.exp(lp - logsumexp(lp))


def tv_distance(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ShapeError(f"distributions have shapes {p.shape} and {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())


def _worst_tv(M: np.ndarray, pi: np.ndarray) -> float:
    return 0.5 * float(np.abs(M - pi).sum(axis=1).max())


@dataclass(frozen=True)
class MixingResult:
    t_mix: int
    eps: float
    times: np.ndarray
    distances: np.ndarray

    def curve(self) -> list[tuple[int, float]]:
        return list(zip(self.times.tolist(), self.distances.tolist()))


def distance_curve(P, pi, steps: int) -> np.ndarray:
    """``d(t) = max_x TV(P^t(x,.), pi)`` for ``t = 0..steps``."""
    P = sp.csr_matrix(P)
    pi = np.asarray(pi, dtype=np.float64)
    M = np.eye(P.shape[0])
    out = [_worst_tv(M, pi)]
    for _ in range(steps):
        M = np.asarray(M @ P)
        out.append(_worst_tv(M, pi))
    return np.array(out)


def exact_mixing_time(
    P,
    pi,
    eps: float = DEFAULT_EPS,
    cap: int = DEFAULT_CAP,
    iterate_limit: int = ITERATE_LIMIT,
) -> MixingResult:
    """Smallest ``t`` with ``max_x TV(P^t(x,.), pi) <= eps``.

    Raises :class:`TruncationError` when no ``t <= cap`` qualifies.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    dense = np.asarray(P.toarray() if sp.issparse(P) else P, dtype=np.float64)
    Psp = sp.csr_matrix(dense)
    pi = np.asarray(pi, dtype=np.float64)
    size = dense.shape[0]
    times = [0]
    dists = [_worst_tv(np.eye(size), pi)]
    M = np.eye(size)
    t = 0
    limit = min(cap, iterate_limit)
    while t < limit:
        M = np.asarray(M @ Psp)
        t += 1
        d = _worst_tv(M, pi)
        times.append(t)
        dists.append(d)
        if d <= eps:
            return MixingResult(t, eps, np.array(times), np.array(dists))
    if t >= cap:
        raise TruncationError(f"d({cap}) = {dists[-1]:.4g} > eps = {eps}", cap, dists[-1])

    # grow dyadic powers until P^t * P^(2^b) is within eps
    low, M_low = t, M
    powers = [dense]
    while True:
        hi_t = low + 2 ** (len(powers) - 1)
        cand = M_low @ powers[-1]
        d = _worst_tv(cand, pi)
        times.append(hi_t)
        dists.append(d)
        if d <= eps:
            break
        if hi_t >= cap:
            raise TruncationError(f"d({hi_t}) = {d:.4g} > eps = {eps}", cap, d)
        low, M_low = hi_t, cand
        powers.append(powers[-1] @ powers[-1])
    # binary lifting: largest low with d(low) > eps
    for b in range(len(powers) - 2, -1, -1):
        cand = M_low @ powers[b]
        t_c = low + 2**b
        d = _worst_tv(cand, pi)
        times.append(t_c)
        dists.append(d)
        if d > eps:
            low, M_low = t_c, cand
    t_mix = low + 1
    if t_mix > cap:
        raise TruncationError(f"mixing time exceeds cap {cap}", cap, None)
    order = np.argsort(times, kind="stable")
    times_a = np.array(times)[order]
    dists_a = np.array(dists)[order]
    keep = np.concatenate(([True], np.diff(times_a) > 0))
    return MixingResult(t_mix, eps, times_a[keep], dists_a[keep])


def mixing_time_from_curve(distances, eps: float) -> int | None:
    """First ``t >= 1`` with ``d(t) <= eps`` on a dense ``t = 0..T`` curve."""
    d = np.asarray(distances)
    hits = np.nonzero(d[1:] <= eps)[0]
    return int(hits[0]) + 1 if hits.size else None


def reversibility_check(P, pi) -> tuple[float, np.ndarray]:
    """Max detailed-balance violation and the edge measure ``Q = diag(pi) P``."""
    P = np.asarray(P, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    Q = pi[:, None] * P
    return float(np.abs(Q - Q.T).max()), Q


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    lambda_star: float
    t_rel: float

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[1]) if self.eigenvalues.size > 1 else 0.0

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])


def spectrum(P, pi, tol: float = REVERSIBILITY_TOL) -> SpectrumReport:
    """Eigenvalues of a reversible chain via its symmetrisation.

    ``A = D P D^{-1}`` with ``D = diag(sqrt(pi))`` is symmetric under detailed
    balance and shares the spectrum of ``P``.
    """
    P = np.asarray(P, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    viol, _ = reversibility_check(P, pi)
    if viol > tol:
        raise NotReversibleError(f"detailed balance violated by {viol:.3g}", viol)
    if np.any(pi <= 0.0):
        raise NumericalError("stationary distribution has underflowed entries")
    root = np.sqrt(pi)
    A = root[:, None] * P / root[None, :]
    A = 0.5 * (A + A.T)
    eig = np.sort(np.linalg.eigvalsh(A))[::-1]
    if abs(eig[0] - 1.0) > 1e-9:
        raise NumericalError(f"leading eigenvalue {eig[0]!r} differs from 1")
    if eig.size == 1:
        return SpectrumReport(eig, 0.0, 1.0)
    lam_star = float(max(abs(eig[1]), abs(eig[-1])))
    return SpectrumReport(eig, lam_star, 1.0 / (1.0 - lam_star))


def relaxation_sandwich(t_rel: float, pi_min: float, eps: float = DEFAULT_EPS) -> tuple[int, int]:
    """Integer window ``[ceil((t_rel-1) ln(1/2eps)), ceil(t_rel ln(1/(eps pi_min)))]``."""
    lo = int(np.ceil((t_rel - 1.0) * np.log(1.0 / (2.0 * eps)) - 1e-9))
    hi = int(np.ceil(t_rel * np.log(1.0 / (eps * pi_min))))
    return max(lo, 0), hi
