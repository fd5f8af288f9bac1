"""Trajectory simulation of the splitting process and the coupled unrestricted line."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma, log

import numpy as np
from scipy.special import betaincinv

from .graph import WeightedGraph, make_line
from .kernel import SplitParam, betabin_sample
from .stream import EventStream, expand_uniform


@dataclass
class Trajectory:
    initial: tuple[int, ...]
    current: tuple[int, ...]
    time: float = 0.0
    events_applied: int = 0
    samples: list[tuple[float, tuple[int, ...]]] = field(default_factory=list)


def _edge0(g: WeightedGraph | None, e) -> tuple[int, int]:
    v, w = e
    if v > w:
        v, w = w, v
    if g is not None:
        g.edge_index(v, w)
    return v - 1, w - 1


def bbsp_step(param: SplitParam, state, e, u: float, g: WeightedGraph | None = None) -> tuple[int, ...]:
    """Redistribute the particles on edge e=(v, w) (1-based) using uniform u."""
    i, j = _edge0(g, e)
    x = list(state)
    N = x[i] + x[j]
    if N:
        k = betabin_sample(N, param, u)
        x[i], x[j] = k, N - k
    return tuple(x)


def simulate_bbsp(g: WeightedGraph, param: SplitParam, state0, stream: EventStream,
                  t_end: float, sample_times=None) -> Trajectory:
    x = list(state0)
    if len(x) != g.n:
        raise ValueError("initial state has wrong length")
    pairs = g.edge_pairs0()
    times = sorted(sample_times or [])
    samples = []
    si = 0
    applied = 0
    for ev in stream.events(t_end):
        while si < len(times) and times[si] < ev.time:
            samples.append((times[si], tuple(x)))
            si += 1
        i, j = pairs[ev.edge]
        N = x[i] + x[j]
        if N:
            k = betabin_sample(N, param, ev.ub)
            x[i] = k
            x[j] = N - k
        applied += 1
    while si < len(times) and times[si] <= t_end:
        samples.append((times[si], tuple(x)))
        si += 1
    return Trajectory(tuple(state0), tuple(x), t_end, applied, samples)


def beta_from_uniform(param: SplitParam, u: float) -> float:
    """Inverse CDF of Beta(s, s)."""
    s = param.real
    return float(betaincinv(s, s, u))


def simulate_unrestricted_line_coupled(n: int, param: SplitParam, low0, high0, stream: EventStream,
                                       t_end: float, check: bool = True,
                                       sample_times=None) -> tuple[Trajectory, Trajectory]:
    """Two copies of the line process on N_0^n sharing ring times and split fractions.

    At each ring a common fraction p ~ Beta(s, s) comes from ub, and every
    particle on the edge of the larger copy gets a uniform expanded from uc. The smaller copy uses the first of those uniforms, so both the
    lower-endpoint counts and the upper-endpoint counts stay ordered.
    """
    low, high = list(low0), list(high0)
    if len(low) != n or len(high) != n:
        raise ValueError("initial states must have length n")
    if any(x > y for x, y in zip(low, high)):
        raise ValueError("initial states are not ordered pointwise")
    if stream.graph.n != n or stream.graph.m_edges != n - 1:
        raise ValueError("stream must be built on the line graph with n vertices")
    pairs = make_line(n).edge_pairs0()
    times = sorted(sample_times or [])
    s_low, s_high = [], []
    si = 0
    applied = 0
    for ev in stream.events(t_end):
        while si < len(times) and times[si] < ev.time:
            s_low.append((times[si], tuple(low)))
            s_high.append((times[si], tuple(high)))
            si += 1
        i, j = pairs[ev.edge]
        nl, nh = low[i] + low[j], high[i] + high[j]
        if nh:
            p = beta_from_uniform(param, ev.ub)
            us = expand_uniform(ev.uc).random(nh)
            hits = us < p
            kl = int(hits[:nl].sum())
            kh = int(hits.sum())
            low[i], low[j] = kl, nl - kl
            high[i], high[j] = kh, nh - kh
            if check and (low[i] > high[i] or low[j] > high[j]):
                raise AssertionError("monotone coupling lost pointwise order")
        applied += 1
    while si < len(times) and times[si] <= t_end:
        s_low.append((times[si], tuple(low)))
        s_high.append((times[si], tuple(high)))
        si += 1
    return (Trajectory(tuple(low0), tuple(low), t_end, applied, s_low),
            Trajectory(tuple(high0), tuple(high), t_end, applied, s_high))


def negbin_prob(param: SplitParam, n_sites: int, m: int) -> float:
    """Success probability giving NegBin(s, p) mean m / n_sites."""
    s = param.real
    return n_sites * s / (m + n_sites * s)


def sample_negbin_iid(param: SplitParam, n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    return rng.negative_binomial(param.real, p, size=n)


def sample_negbin_conditioned(param: SplitParam, n_sites: int, m: int, rng: np.random.Generator,
                              method: str = "auto", max_tries: int = 10_000) -> np.ndarray:
    """i.i.d. NegBin(s, p) on n_sites coordinates conditioned to sum to m.

    The conditioned law does not depend on p; it is Dirichlet-multinomial
    with all parameters s. ``rejection`` resamples until the sum hits m,
    ``polya`` samples the Dirichlet-multinomial form directly, ``auto``
    tries rejection briefly and falls back.
    """
    if method not in ("auto", "rejection", "polya"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "rejection"):
        p = negbin_prob(param, n_sites, m)
        tries = max_tries if method == "rejection" else 200
        for _ in range(tries):
            x = rng.negative_binomial(param.real, p, size=n_sites)
            if int(x.sum()) == m:
                return x
        if method == "rejection":
            raise RuntimeError("rejection sampler did not hit the target sum")
    w = rng.dirichlet(np.full(n_sites, param.real))
    return rng.multinomial(m, w)


def log_negbin_pmf(k: int, param: SplitParam, p: float) -> float:
    s = param.real
    return lgamma(s + k) - lgamma(s) - lgamma(k + 1) + s * log(p) + k * log(1 - p)
