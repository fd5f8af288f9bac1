"""Meeting times of two independent walks on the half-weight graph, and average hitting times."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import WeightedGraph, halve

PAIR_CAP = 1_000_000


@dataclass(frozen=True)
class ProductChainSolve:
    graph: WeightedGraph
    expected_meeting: np.ndarray
    max_entry: float
    raw_rate: bool = False


def _jump_rates(g: WeightedGraph, raw_rate: bool) -> np.ndarray:
    """Per-walk crossing rate of each edge of g (already halved by the caller)."""
    w = g.weights()
    # canonical time divides by the total weight of the un-halved graph
    return w if raw_rate else w / (2.0 * g.total_weight)


def exact_meeting_times(g: WeightedGraph, raw_rate: bool = False) -> ProductChainSolve:
    """Expected meeting times for every pair of start vertices.

    Each walk crosses edge e at rate r_e/2 (raw) or (r_e/2)/sum(r) (canonical).
    The walks meet when they are adjacent and either one crosses the edge
    between them.
    """
    n = g.n
    if n * n > PAIR_CAP:
        raise ValueError(f"product chain with {n * n} states exceeds cap {PAIR_CAP}")
    h = halve(g)
    rates = _jump_rates(h, raw_rate)
    inc = g.incident()
    pairs = g.edge_pairs0()
    idx = -np.ones((n, n), dtype=np.int64)
    k = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                idx[i, j] = k
                k += 1
    rows, cols, vals = [], [], []
    diag = np.zeros(k)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            r = idx[i, j]
            for mover, other in ((i, j), (j, i)):
                for e in inc[mover]:
                    a, b = pairs[e]
                    z = b if a == mover else a
                    q = rates[e]
                    diag[r] += q
                    if z == other:
                        continue
                    c = idx[z, other] if mover == i else idx[other, z]
                    rows.append(r)
                    cols.append(c)
                    vals.append(-q)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(k, k)) + sp.diags(diag)
    if k <= 10_000:
        sol = spla.spsolve(A.tocsc(), np.ones(k))
    else:
        sol, info = spla.gmres(A, np.ones(k), rtol=1e-12, maxiter=10_000)
        if info != 0:
            raise RuntimeError("iterative meeting-time solve did not converge")
    M = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                M[i, j] = sol[idx[i, j]]
    if not np.all(np.isfinite(M)):
        raise RuntimeError("singular meeting-time system")
    return ProductChainSolve(g, M, float(M.max()), raw_rate)


@lru_cache(maxsize=64)
def max_meeting_time(g: WeightedGraph) -> float:
    return exact_meeting_times(g).max_entry


def mc_meeting_time(g: WeightedGraph, i: int, j: int, rng: np.random.Generator, replicas: int,
                    raw_rate: bool = False, max_steps: int = 10_000_000) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the meeting time from (i, j), 1-based.

    All replicas advance together; each step draws the next jump among the
    two walks' independent edge clocks.
    """
    if replicas < 1:
        raise ValueError("replicas must be positive")
    if i == j:
        return 0.0, 0.0
    rates = _jump_rates(halve(g), raw_rate)
    inc = g.incident()
    pairs = g.edge_pairs0()
    n = g.n
    deg = max(len(x) for x in inc)
    nbr = np.zeros((n, deg), dtype=np.int64)
    cum = np.ones((n, deg))
    out = np.zeros(n)
    for v in range(n):
        qs = np.array([rates[e] for e in inc[v]])
        out[v] = qs.sum()
        c = np.cumsum(qs) / qs.sum()
        c[-1] = 1.0
        cum[v, : len(c)] = c
        for t, e in enumerate(inc[v]):
            a, b = pairs[e]
            nbr[v, t] = b if a == v else a
    X = np.full(replicas, i - 1)
    Y = np.full(replicas, j - 1)
    T = np.zeros(replicas)
    alive = np.arange(replicas)
    steps = 0
    while alive.size:
        steps += 1
        if steps > max_steps:
            raise RuntimeError("meeting simulation exceeded step budget")
        x, y = X[alive], Y[alive]
        rx, ry = out[x], out[y]
        tot = rx + ry
        T[alive] += rng.exponential(1.0, alive.size) / tot
        move_x = rng.random(alive.size) * tot < rx
        who = np.where(move_x, x, y)
        u = rng.random(alive.size)
        slot = (u[:, None] > cum[who]).sum(axis=1)
        dest = nbr[who, slot]
        other = np.where(move_x, y, x)
        met = dest == other
        X[alive] = np.where(move_x, dest, x)
        Y[alive] = np.where(move_x, y, dest)
        alive = alive[~met]
    return float(T.mean()), float(T.std(ddof=1) / np.sqrt(replicas)) if replicas > 1 else 0.0


def hitting_times(g: WeightedGraph, raw_rate: bool = False) -> np.ndarray:
    """E_i T_j for one walk that crosses each edge at half its ring rate."""
    n = g.n
    rates = _jump_rates(halve(g), raw_rate)
    Q = np.zeros((n, n))
    for (a, b), q in zip(g.edge_pairs0(), rates):
        Q[a, b] += q
        Q[b, a] += q
    Q -= np.diag(Q.sum(axis=1))
    H = np.zeros((n, n))
    for j in range(n):
        keep = [x for x in range(n) if x != j]
        sub = -Q[np.ix_(keep, keep)]
        H[keep, j] = np.linalg.solve(sub, np.ones(n - 1))
    return H


def tau0_upper_proxy(g: WeightedGraph, raw_rate: bool = False) -> float:
    """Average hitting time sum_ij pi_i pi_j E_i T_j under the uniform equilibrium."""
    H = hitting_times(g, raw_rate)
    return float(H.sum() / g.n ** 2)
