"""Seeded graphical construction: ring times, edges, two uniform lanes and fair coins.

Each replica draws from its own child of the master ``SeedSequence`` and every
lane (clock, ub, uc, coins) is a separate Philox generator, so lanes are
independent and any prefix of the stream is reproducible bit-for-bit.
"""

from __future__ import annotations

from typing import Iterator, NamedTuple

import numpy as np

from .graph import WeightedGraph

_BLOCK = 256


class Event(NamedTuple):
    index: int
    time: float
    edge: int
    ub: float
    uc: float


def replica_seed(seed: int, replica: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=(int(replica),))


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(replica_seed(seed, replica)))


def expand_uniform(u: float) -> np.random.Generator:
    """Counter-based generator keyed by the 53 mantissa bits of ``u``."""
    return np.random.Generator(np.random.Philox(key=int(u * 9007199254740992.0)))


class EventStream:
    """Lazily generated, replayable event sequence for one replica.

    In canonical mode the clock has total rate 1; with ``raw_rate`` it runs at
    the summed edge weight. Edges are picked with probability proportional
    to weight either way.
    """

    def __init__(self, g: WeightedGraph, seed: int, replica: int = 0, raw_rate: bool = False):
        self.graph = g
        self.seed = int(seed)
        self.replica = int(replica)
        self.raw_rate = raw_rate
        self.rate = g.total_weight if raw_rate else 1.0
        clock, ub, uc, coin = replica_seed(seed, replica).spawn(4)
        self._clock = np.random.Generator(np.random.Philox(clock))
        self._ub = np.random.Generator(np.random.Philox(ub))
        self._uc = np.random.Generator(np.random.Philox(uc))
        self._coin = np.random.Generator(np.random.Philox(coin))
        self._cum = np.cumsum(g.ring_probs)
        self._cum[-1] = 1.0
        self._times: list[float] = []
        self._edges: list[int] = []
        self._ubs: list[float] = []
        self._ucs: list[float] = []
        self._coins: list[int] = []
        self._t = 0.0

    def _extend(self):
        gaps = self._clock.exponential(1.0 / self.rate, size=_BLOCK)
        picks = np.searchsorted(self._cum, self._clock.random(_BLOCK), side="right")
        t = self._t
        times = []
        for gap in gaps.tolist():
            t += gap
            times.append(t)
        self._t = t
        self._times.extend(times)
        self._edges.extend(np.minimum(picks, len(self._cum) - 1).tolist())
        self._ubs.extend(self._ub.random(_BLOCK).tolist())
        self._ucs.extend(self._uc.random(_BLOCK).tolist())

    def event(self, i: int) -> Event:
        while i >= len(self._times):
            self._extend()
        return Event(i, self._times[i], self._edges[i], self._ubs[i], self._ucs[i])

    def events(self, t_end: float, start: int = 0) -> Iterator[Event]:
        """Events with ring time <= t_end, in order."""
        i = start
        while True:
            ev = self.event(i)
            if ev.time > t_end:
                return
            yield ev
            i += 1

    def coin(self, i: int) -> int:
        """Fair bit d_i for round boundary i >= 1."""
        while i > len(self._coins):
            self._coins.extend(self._coin.integers(0, 2, size=_BLOCK).tolist())
        return self._coins[i - 1]
