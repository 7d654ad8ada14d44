"""Slow, direct reference implementations used to check the library.

Nothing here imports the code under test except plain indexing helpers.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def profiles(radices):
    """All profiles in flat-index order (first coordinate varies fastest)."""
    rev = itertools.product(*[range(m) for m in reversed(radices)])
    return [tuple(reversed(p)) for p in rev]


def flat(profile, radices):
    k, s = 0, 1
    for v, m in zip(profile, radices):
        k += v * s
        s *= m
    return k


def neighbours(k, radices):
    p = profiles(radices)[k]
    out = []
    for i, m in enumerate(radices):
        for a in range(m):
            if a != p[i]:
                q = list(p)
                q[i] = a
                out.append(flat(q, radices))
    return out


def adjacency(radices):
    size = int(np.prod(radices))
    return [neighbours(k, radices) for k in range(size)]


def brute_potential_ok(util, phi, radices, tol=1e-9):
    """Check ``u_i(x) - u_i(y) = phi(y) - phi(x)`` for every unilateral deviation."""
    for p in profiles(radices):
        kx = flat(p, radices)
        for i, m in enumerate(radices):
            for a in range(m):
                q = list(p)
                q[i] = a
                ky = flat(q, radices)
                if abs((util[i][kx] - util[i][ky]) - (phi[ky] - phi[kx])) > tol:
                    return False
    return True


def brute_cutwidth(n, edges):
    best = math.inf
    for order in itertools.permutations(range(n)):
        pos = {v: k for k, v in enumerate(order)}
        width = 0
        for k in range(n - 1):
            width = max(width, sum(1 for u, v in edges if min(pos[u], pos[v]) <= k < max(pos[u], pos[v])))
        best = min(best, width)
    return best if n > 1 else 0


def _peaks_unpruned(phi, adj, src):
    """Minimax peak to every target over all simple paths, no pruning."""
    best = [math.inf] * len(phi)
    seen = [False] * len(phi)

    def dfs(v, peak):
        best[v] = min(best[v], peak)
        seen[v] = True
        for w in adj[v]:
            if not seen[w]:
                dfs(w, max(peak, phi[w]))
        seen[v] = False

    dfs(src, phi[src])
    return best


def _peaks_pruned(phi, adj, src):
    """Same minimax over simple paths; a branch is dropped once its running
    peak cannot improve the best peak already recorded for the next vertex."""
    best = [math.inf] * len(phi)
    seen = [False] * len(phi)

    def dfs(v, peak):
        best[v] = peak
        seen[v] = True
        for w in adj[v]:
            p = max(peak, phi[w])
            if not seen[w] and p < best[w]:
                dfs(w, p)
        seen[v] = False

    dfs(src, phi[src])
    return best


def path_zeta(phi, radices, pruned=True):
    """``max`` over ordered pairs with ``phi(x) >= phi(y)`` of the smallest
    achievable climb ``max_path phi - phi(x)`` over simple Hamming paths."""
    phi = [float(v) for v in phi]
    adj = adjacency(radices)
    search = _peaks_pruned if pruned else _peaks_unpruned
    z = 0.0
    for x in range(len(phi)):
        peaks = search(phi, adj, x)
        for y in range(len(phi)):
            if phi[x] >= phi[y]:
                z = max(z, peaks[y] - phi[x])
    return z


def matrix_power_mixing(P, pi, eps, cap=100000):
    """Smallest ``t`` with ``max_x TV(P^t(x,.), pi) <= eps`` by repeated dense products."""
    P = np.asarray(P)
    M = np.eye(P.shape[0])
    for t in range(1, cap + 1):
        M = M @ P
        if 0.5 * np.abs(M - pi).sum(axis=1).max() <= eps:
            return t
    raise RuntimeError("cap reached")


def tv_curve(P, pi, steps):
    M = np.eye(P.shape[0])
    out = [0.5 * np.abs(M - pi).sum(axis=1).max()]
    for _ in range(steps):
        M = M @ P
        out.append(0.5 * np.abs(M - pi).sum(axis=1).max())
    return np.array(out)


def logit_matrix(util, radices, beta):
    """Transition matrix written directly from the update rule."""
    ps = profiles(radices)
    n = len(radices)
    size = len(ps)
    P = np.zeros((size, size))
    for kx, p in enumerate(ps):
        for i, m in enumerate(radices):
            vals = []
            for a in range(m):
                q = list(p)
                q[i] = a
                vals.append(util[i][flat(q, radices)])
            w = np.exp(beta * (np.array(vals) - max(vals)))
            w /= w.sum()
            for a in range(m):
                q = list(p)
                q[i] = a
                P[kx, flat(q, radices)] += w[a] / n
    return P


def binary_path(order, x, y):
    cur = list(x)
    out = [tuple(cur)]
    for v in order:
        if cur[v] != y[v]:
            cur[v] = y[v]
            out.append(tuple(cur))
    return out


def brute_congestion(Q, pi, order, n):
    """Loop over every chain edge and every pair whose path uses it."""
    radices = (2,) * n
    ps = profiles(radices)
    paths = {}
    for x in ps:
        for y in ps:
            if x != y:
                paths[(x, y)] = binary_path(order, x, y)
    rho = 0.0
    for u in ps:
        for i in range(n):
            v = list(u)
            v[i] = 1 - v[i]
            v = tuple(v)
            load = 0.0
            for (x, y), path in paths.items():
                if any(path[k] == u and path[k + 1] == v for k in range(len(path) - 1)):
                    load += pi[flat(x, radices)] * pi[flat(y, radices)] * (len(path) - 1)
            rho = max(rho, load / Q[flat(u, radices), flat(v, radices)])
    return rho


def mean_hitting_times(P, target):
    """Expected hitting times of the target set from every state."""
    P = np.asarray(P)
    size = P.shape[0]
    target = set(target)
    rest = [k for k in range(size) if k not in target]
    h = np.zeros(size)
    if rest:
        A = np.eye(len(rest)) - P[np.ix_(rest, rest)]
        h[rest] = np.linalg.solve(A, np.ones(len(rest)))
    return h
