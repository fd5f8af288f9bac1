"""Beta-binomial splitting kernel, state enumeration and the equilibrium law."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, exp, lgamma, log

import numpy as np

from .graph import WeightedGraph

STATE_CAP = 2_000_000

_FRACTION_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+)\s*)?$")


class StateSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SplitParam:
    """Rational splitting parameter s = numerator / denominator in lowest terms.

    A vertex holding k black particles carries ``colour(k) = denominator*k + numerator``
    non-black particles in the chameleon picture.
    """

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.numerator <= 0 or self.denominator <= 0:
            raise ValueError("splitting parameter must be a positive fraction")
        f = Fraction(self.numerator, self.denominator)
        object.__setattr__(self, "numerator", f.numerator)
        object.__setattr__(self, "denominator", f.denominator)

    @classmethod
    def parse(cls, text: str | Fraction | int) -> "SplitParam":
        """Accept "b/a" or an integer string. Decimal input is rejected."""
        if isinstance(text, Fraction):
            return cls(text.numerator, text.denominator)
        if isinstance(text, int) and not isinstance(text, bool):
            return cls(text, 1)
        if not isinstance(text, str):
            raise ValueError(f"splitting parameter must be given as 'b/a', got {text!r}")
        mt = _FRACTION_RE.match(text)
        if not mt:
            raise ValueError(f"splitting parameter must be an exact fraction 'b/a', got {text!r}")
        b = int(mt.group(1))
        a = int(mt.group(2)) if mt.group(2) is not None else 1
        return cls(b, a)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def real(self) -> float:
        return self.numerator / self.denominator

    def colour(self, k: int) -> int:
        return self.denominator * k + self.numerator

    def colour_total(self, n: int, m: int) -> int:
        """Non-black particle count on n vertices when m-1 particles are black."""
        return self.denominator * (m - 1) + self.numerator * n

    @property
    def even_split_floor(self) -> float:
        """Lower bound on the mass BetaBin(N, s, s) puts on [N/3, 2N/3] for N >= 2."""
        s = self.real
        if self.value >= 20:
            return (1 - 20 / (s + 1)) / 6
        return exp(2 * s * log(5 / 12) - log_beta(s, s) - log(6))

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def colour(param: SplitParam, k: int) -> int:
    return param.colour(k)


def log_beta(x: float, y: float) -> float:
    return lgamma(x) + lgamma(y) - lgamma(x + y)


@lru_cache(maxsize=4096)
def _pmf_cached(N: int, num: int, den: int) -> np.ndarray:
    s = num / den
    k = np.arange(N + 1)
    lg = np.array([lgamma(x + 1) for x in range(N + 1)])
    log_choose = lg[N] - lg[k] - lg[N - k]
    lb = np.array([log_beta(i + s, N - i + s) for i in range(N + 1)]) - log_beta(s, s)
    p = np.exp(log_choose + lb)
    # symmetrize to remove rounding asymmetry, then renormalize
    p = 0.5 * (p + p[::-1])
    p /= p.sum()
    p.setflags(write=False)
    return p


def betabin_pmf(N: int, param: SplitParam) -> np.ndarray:
    """Probabilities of k = 0..N particles landing on the lower endpoint."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return _pmf_cached(int(N), param.numerator, param.denominator)


def betabin_pmf_exact(N: int, param: SplitParam) -> list[Fraction]:
    """Exact rational pmf from rising factorials; for small N only."""
    s = param.value
    den = Fraction(1)
    for i in range(N):
        den *= 2 * s + i
    out = []
    for k in range(N + 1):
        num = Fraction(1)
        for i in range(k):
            num *= s + i
        for i in range(N - k):
            num *= s + i
        out.append(comb(N, k) * num / den)
    return out


@lru_cache(maxsize=4096)
def outcome_order(N: int) -> tuple[int, ...]:
    """Outcomes ranked by distance from an even split; ties favour fewer on the lower endpoint."""
    return tuple(sorted(range(N + 1), key=lambda k: (abs(2 * k - N), k)))


@lru_cache(maxsize=4096)
def _ranked_cdf(N: int, num: int, den: int) -> tuple[tuple[int, ...], np.ndarray]:
    order = outcome_order(N)
    p = _pmf_cached(N, num, den)
    cum = np.cumsum(p[list(order)])
    cum[-1] = 1.0
    cum.setflags(write=False)
    return order, cum


def betabin_sample(N: int, param: SplitParam, u: float) -> int:
    """Deterministic inverse-CDF draw over the near-even-split ranking."""
    if N == 0:
        return 0
    order, cum = _ranked_cdf(N, param.numerator, param.denominator)
    i = int(np.searchsorted(cum, u, side="left"))
    return order[min(i, N)]


def edge_transition_prob(param: SplitParam, N: int, k_old: int, k_new: int) -> float:
    """One-edge transition probability; depends only on N and the new lower count."""
    if not 0 <= k_new <= N:
        raise ValueError(f"k_new={k_new} outside 0..{N}")
    return float(betabin_pmf(N, param)[k_new])


def count_states(n: int, m: int) -> int:
    return comb(m + n - 1, n - 1)


def enumerate_states(n: int, m: int, cap: int = STATE_CAP) -> list[tuple[int, ...]]:
    """All ways to put m particles on n vertices, first coordinate descending."""
    total = count_states(n, m)
    if total > cap:
        raise StateSpaceTooLarge(f"{total} states exceeds cap {cap}")
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], left: int, slots: int):
        if slots == 1:
            out.append(tuple(prefix + [left]))
            return
        for k in range(left, -1, -1):
            prefix.append(k)
            rec(prefix, left - k, slots - 1)
            prefix.pop()

    rec([], m, n)
    return out


def log_equilibrium_weight(state, param: SplitParam) -> float:
    """Log of the unnormalized equilibrium weight, via the integer product form."""
    a, b = param.denominator, param.numerator
    tot = 0.0
    for k in state:
        for i in range(k):
            tot += log(a * i + b) - log(a * (i + 1))
    return tot


def equilibrium_weight_exact(state, param: SplitParam) -> Fraction:
    """Exact unnormalized weight prod_v prod_{i<k_v} (a i + b) / (a (i+1))."""
    a, b = param.denominator, param.numerator
    w = Fraction(1)
    for k in state:
        for i in range(k):
            w *= Fraction(a * i + b, a * (i + 1))
    return w


def stationary_dist(g: WeightedGraph | int, param: SplitParam, m: int,
                    states: list | None = None) -> np.ndarray:
    n = g if isinstance(g, int) else g.n
    if states is None:
        states = enumerate_states(n, m)
    lw = np.array([log_equilibrium_weight(x, param) for x in states])
    w = np.exp(lw - lw.max())
    return w / w.sum()
