"""Marked splitting process: one distinguished particle riding on top of m-1 others."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graph import WeightedGraph
from .kernel import SplitParam, betabin_pmf_exact, betabin_sample
from .stream import EventStream


@dataclass
class MarkedTrajectory:
    initial: tuple[tuple[int, ...], int]
    current: tuple[int, ...]
    marked: int
    time: float = 0.0
    events_applied: int = 0
    samples: list[tuple[float, tuple[int, ...], int]] = field(default_factory=list)

    def merged(self) -> tuple[int, ...]:
        x = list(self.current)
        x[self.marked - 1] += 1
        return tuple(x)


def lower_endpoint_prob(param: SplitParam, N: int, k_new: int) -> float:
    """Chance the marked particle ends on the lower endpoint.

    N unmarked particles share the edge and k_new of them end on the lower
    endpoint. This is the ratio of the (N+1)-particle kernel with the mark
    added to the N-particle kernel, which simplifies to
    colour(k_new) / (a*N + 2b). It does not depend on where the mark started.
    """
    if not 0 <= k_new <= N:
        raise ValueError("k_new outside 0..N")
    return param.colour(k_new) / (param.denominator * N + 2 * param.numerator)


def lower_endpoint_prob_exact(param: SplitParam, N: int, k_new: int) -> Fraction:
    num = betabin_pmf_exact(N + 1, param)[k_new + 1]
    den = betabin_pmf_exact(N, param)[k_new]
    return Fraction(k_new + 1, N + 1) * num / den


def marked_placement_prob(param: SplitParam, e, state, new_state, marked: int, target: int) -> float:
    """Probability the mark moves from ``marked`` to ``target`` (both endpoints of e, 1-based)."""
    v, w = sorted(e)
    if marked not in (v, w) or target not in (v, w):
        raise ValueError("marked and target must be endpoints of e")
    for i, (x, y) in enumerate(zip(state, new_state)):
        if i + 1 not in (v, w) and x != y:
            raise ValueError("states differ off the edge")
    N = state[v - 1] + state[w - 1]
    if new_state[v - 1] + new_state[w - 1] != N:
        raise ValueError("edge total not conserved")
    p_lower = lower_endpoint_prob(param, N, new_state[v - 1])
    return p_lower if target == v else 1.0 - p_lower


def unmarked_update(param: SplitParam, u: float, e, state) -> tuple[int, ...]:
    """Unmarked update on edge e (1-based pair) driven by u."""
    v, w = sorted(e)
    x = list(state)
    N = x[v - 1] + x[w - 1]
    if N:
        k = betabin_sample(N, param, u)
        x[v - 1], x[w - 1] = k, N - k
    return tuple(x)


def mark_update(param: SplitParam, u: float, u2: float, e, state, marked: int) -> int:
    """New location of the mark: it stays iff u2 is below its staying probability."""
    v, w = sorted(e)
    if marked not in (v, w):
        return marked
    N = state[v - 1] + state[w - 1]
    k = betabin_sample(N, param, u) if N else 0
    p_lower = lower_endpoint_prob(param, N, k)
    stay = p_lower if marked == v else 1.0 - p_lower
    if u2 < stay:
        return marked
    return w if marked == v else v


def _mark_move0(param: SplitParam, N: int, k: int, i: int, j: int, marked0: int, u2: float) -> int:
    p_lower = lower_endpoint_prob(param, N, k)
    if marked0 == i:
        return i if u2 < p_lower else j
    return j if u2 < 1.0 - p_lower else i


def simulate_marked(g: WeightedGraph, param: SplitParam, state0, marked0: int, stream: EventStream,
                  t_end: float, sample_times=None) -> MarkedTrajectory:
    """Apply the unmarked update (driven by ub) and the mark update (driven by uc) at every ring up to t_end."""
    x = list(state0)
    mk = marked0 - 1
    pairs = g.edge_pairs0()
    times = sorted(sample_times or [])
    samples = []
    si = 0
    applied = 0
    for ev in stream.events(t_end):
        while si < len(times) and times[si] < ev.time:
            samples.append((times[si], tuple(x), mk + 1))
            si += 1
        i, j = pairs[ev.edge]
        N = x[i] + x[j]
        k = betabin_sample(N, param, ev.ub) if N else 0
        if mk == i or mk == j:
            mk = _mark_move0(param, N, k, i, j, mk, ev.uc)
        x[i], x[j] = k, N - k
        applied += 1
    while si < len(times) and times[si] <= t_end:
        samples.append((times[si], tuple(x), mk + 1))
        si += 1
    return MarkedTrajectory((tuple(state0), marked0), tuple(x), mk + 1, t_end, applied, samples)


def mark_equilibrium_prob(param: SplitParam, state, v: int) -> float:
    """Conditional equilibrium chance that the mark sits at v given the unmarked state."""
    n = len(state)
    m1 = sum(state)
    return param.colour(state[v - 1]) / (param.denominator * m1 + param.numerator * n)

