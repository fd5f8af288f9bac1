"""Exact and Monte Carlo mixing analysis, the line eigenfunction, and bound constants."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from math import cos, log, pi, sin

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.stats import nbinom, poisson

from .graph import WeightedGraph
from .kernel import SplitParam, betabin_pmf, enumerate_states, stationary_dist
from .meeting import exact_meeting_times
from .simulate import negbin_prob, simulate_bbsp
from .stream import EventStream

MC_STATE_CAP = 10_000


@dataclass
class ExactChain:
    graph: WeightedGraph
    param: SplitParam
    m: int
    states: list[tuple[int, ...]]
    index: dict
    generator: sp.csr_matrix
    stationary: np.ndarray


def build_chain(g: WeightedGraph, param: SplitParam, m: int, raw_rate: bool = False) -> ExactChain:
    """Sparse generator of the splitting process on all states with m particles."""
    states = enumerate_states(g.n, m)
    index = {x: i for i, x in enumerate(states)}
    probs = g.ring_probs * (g.total_weight if raw_rate else 1.0)
    rows, cols, vals = [], [], []
    diag = np.zeros(len(states))
    for r, x in enumerate(states):
        for (a, b), q in zip(g.edge_pairs0(), probs):
            N = x[a] + x[b]
            if N == 0:
                continue
            pmf = betabin_pmf(N, param)
            y = list(x)
            for k in range(N + 1):
                if k == x[a]:
                    continue
                y[a], y[b] = k, N - k
                rate = q * pmf[k]
                rows.append(r)
                cols.append(index[tuple(y)])
                vals.append(rate)
                diag[r] -= rate
    S = len(states)
    Q = sp.csr_matrix((vals, (rows, cols)), shape=(S, S)) + sp.diags(diag)
    Q = Q.tocsr()
    pi_ = stationary_dist(g, param, m, states)
    return ExactChain(g, param, m, states, index, Q, pi_)


def propagate(chain: ExactChain, mu0: np.ndarray, times, tol: float = 1e-10) -> np.ndarray:
    """Laws at each time by uniformization. mu0 may be one law or a stack of rows."""
    mu0 = np.atleast_2d(np.asarray(mu0, dtype=float))
    times = np.asarray(times, dtype=float)
    Q = chain.generator
    lam = float(max(-Q.diagonal().min(), 1e-300))
    P = (sp.identity(Q.shape[0], format="csr") + Q / lam).T.tocsr()
    out = np.zeros((len(times),) + mu0.shape)
    tmax = float(times.max()) if len(times) else 0.0
    kmax = int(poisson.isf(tol, lam * tmax)) + 10 if tmax > 0 else 0
    cur = mu0.T.copy()
    for k in range(kmax + 1):
        w = poisson.pmf(k, lam * times)
        out += w[:, None, None] * cur.T[None]
        if k < kmax:
            cur = P @ cur
    return out[:, 0, :] if out.shape[1] == 1 else out


def tv(mu: np.ndarray, pi_: np.ndarray) -> np.ndarray:
    return np.clip(np.asarray(mu) - pi_, 0, None).sum(axis=-1)


def exact_tv_curve(chain: ExactChain, start, times) -> np.ndarray:
    """TV(t) from a start state (tuple) or initial law (vector)."""
    mu0 = _law(chain, start)
    return tv(propagate(chain, mu0, times), chain.stationary)


def _law(chain: ExactChain, start) -> np.ndarray:
    if isinstance(start, tuple):
        mu0 = np.zeros(len(chain.states))
        mu0[chain.index[start]] = 1.0
        return mu0
    return np.asarray(start, dtype=float)


def worst_tv(chain: ExactChain, t: float) -> float:
    laws = propagate(chain, np.eye(len(chain.states)), [t])
    return float(tv(laws[0], chain.stationary).max())


def exact_mixing_time(chain: ExactChain, eps: float = 0.25, xtol: float = 1e-12) -> float:
    """Smallest t with worst-start TV(t) <= eps."""
    if worst_tv(chain, 0.0) <= eps:
        return 0.0
    hi = 1.0
    while worst_tv(chain, hi) > eps:
        hi *= 2
    return brentq(lambda t: worst_tv(chain, t) - eps, 0.0, hi, xtol=xtol, rtol=1e-15)


def expm_law(chain: ExactChain, mu0: np.ndarray, t: float) -> np.ndarray:
    from scipy.linalg import expm
    return np.asarray(mu0) @ expm(chain.generator.toarray() * t)


def mc_tv_mixing(g: WeightedGraph, param: SplitParam, m: int, start, times, replicas: int,
                 seed: int) -> dict:
    """Empirical-histogram TV against the exact equilibrium.

    The plug-in estimate is biased upward; ``bias_bound`` is the sum over
    states of sqrt(p(1-p)/R)/2 evaluated at the empirical frequencies.
    """
    states = enumerate_states(g.n, m, cap=MC_STATE_CAP)
    if len(states) > MC_STATE_CAP:
        raise ValueError("state space too large for histogram TV; use the exact path")
    index = {x: i for i, x in enumerate(states)}
    pi_ = stationary_dist(g, param, m, states)
    times = sorted(times)
    counts = np.zeros((len(times), len(states)))
    for r in range(replicas):
        traj = simulate_bbsp(g, param, start, EventStream(g, seed, r), max(times), sample_times=times)
        for ti, (_, x) in enumerate(traj.samples):
            counts[ti, index[x]] += 1
    freq = counts / replicas
    est = tv(freq, pi_)
    bias = 0.5 * np.sqrt(freq * (1 - freq) / replicas).sum(axis=1)
    return {"times": times, "tv": est.tolist(), "bias_bound": bias.tolist(), "replicas": replicas,
            "states": len(states)}


def line_eigenfunction(state, n: int, m: int) -> float:
    """Sine-weighted sum of centred partial sums on the line."""
    tot = 0.0
    part = 0
    for k in range(1, n):
        part += state[k - 1]
        tot += sin(pi * k / n) * (part - m * k / n)
    return tot


def line_eigenvalue(n: int) -> float:
    return (cos(pi / n) - 1) / (n - 1)


def line_lower_bound(n: int, m: int, param: SplitParam, eps: float = 0.25, c_eps: float = 0.0) -> dict:
    """Lower bound on the line mixing time, with the eps-dependent constant supplied by the caller."""
    s = param.real
    val = (n ** 3 / pi ** 2) * (log(n) - log(1 + n / m + 1 / s) - c_eps)
    return {"value": val, "positive": val > 0, "n": n, "m": m, "s": str(param), "eps": eps,
            "c_eps": c_eps}


def conditioned_negbin_law(chain: ExactChain) -> np.ndarray:
    """i.i.d. NegBin on the left half of the line, conditioned on holding all m particles."""
    n, m = chain.graph.n, chain.m
    h = n // 2
    p = negbin_prob(chain.param, h, m)
    s = chain.param.real
    w = np.zeros(len(chain.states))
    for i, x in enumerate(chain.states):
        if any(x[h:]):
            continue
        w[i] = np.prod([nbinom.pmf(k, s, p) for k in x[:h]])
    return w / w.sum()


def eigen_decay(chain: ExactChain, mu0: np.ndarray, times) -> tuple[np.ndarray, np.ndarray]:
    """Exact mean of the eigenfunction along the flow, and its predicted exponential decay."""
    n, m = chain.graph.n, chain.m
    f = np.array([line_eigenfunction(x, n, m) for x in chain.states])
    laws = np.atleast_2d(propagate(chain, mu0, times))
    exact = laws @ f
    pred = np.exp(line_eigenvalue(n) * np.asarray(times)) * float(np.asarray(mu0) @ f)
    return exact, pred


@dataclass
class LowerCheck:
    t: float
    tv: float
    bound: float
    ok: bool


def chebyshev_lower_check(chain: ExactChain, t: float, mu0: np.ndarray | None = None) -> LowerCheck:
    """TV against the set-difference bound mu_t(E) - pi(E), E = {f >= E f(X_t) / 2}."""
    n, m = chain.graph.n, chain.m
    if mu0 is None:
        mu0 = conditioned_negbin_law(chain)
    f = np.array([line_eigenfunction(x, n, m) for x in chain.states])
    mu = propagate(chain, mu0, [t])[0]
    mean = float(mu @ f)
    E = f >= 0.5 * mean
    bound = float(mu[E].sum() - chain.stationary[E].sum())
    d = float(tv(mu, chain.stationary))
    return LowerCheck(t, d, bound, d >= bound - 1e-12)


@dataclass
class BoundReport:
    numerator: int
    denominator: int
    even_split_floor: float
    depink_scale: float
    decay_rate: float
    red_loss_rate: float
    upper_constant_symbolic: str
    upper_constant_coefficient: float
    max_meeting: float
    eps: float
    t_upper_modulo_constant: float

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(g: WeightedGraph, param: SplitParam, m: int, eps: float = 0.25) -> BoundReport:
    """Computable constants of the upper bound; the universal constant stays symbolic."""
    a, b = param.denominator, param.numerator
    p = param.even_split_floor
    K = 8 * a / p ** 2
    L = log(12 * a / p ** 2)
    c_s = 1 / (4 * K * L)
    loss = p ** 2 / (4 * a)
    coef = a / p ** 2 * L * log(a + b)
    mm = exact_meeting_times(g).max_entry
    t_up = a / p ** 2 * L * log((a * m + b * g.n) / eps) * mm
    sym = "universal_constant * a * floor^-2 * log(12 a floor^-2) * log(a + b)"
    return BoundReport(b, a, p, K, c_s, loss, sym, coef, mm, eps, t_up)
