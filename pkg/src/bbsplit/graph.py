"""Finite weighted graphs with 1-based vertices."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GraphError(ValueError):
    """Base class for graph validation problems."""


class GraphParseError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class InvalidWeightError(GraphError):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on vertices 1..n.

    Edges are stored with the smaller endpoint first, in the order given.
    The ring distribution picks edge e with probability r_e / sum(r).
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    ring_probs: np.ndarray = field(init=False, repr=False, compare=False)
    total_weight: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("graph needs at least one vertex")
        canon = []
        seen = set()
        for v, w, r in self.edges:
            v, w, r = int(v), int(w), float(r)
            if not (1 <= v <= self.n and 1 <= w <= self.n):
                raise GraphError(f"edge ({v}, {w}) has an endpoint outside 1..{self.n}")
            if v == w:
                raise GraphError(f"self-loop at vertex {v}")
            if not np.isfinite(r) or r <= 0:
                raise InvalidWeightError(f"edge ({v}, {w}) has non-positive weight {r}")
            if v > w:
                v, w = w, v
            if (v, w) in seen:
                raise GraphError(f"duplicate edge ({v}, {w})")
            seen.add((v, w))
            canon.append((v, w, r))
        object.__setattr__(self, "edges", tuple(canon))
        if not _connected(self.n, canon):
            raise DisconnectedGraphError("graph is not connected")
        weights = np.array([r for _, _, r in canon], dtype=float)
        total = float(weights.sum()) if len(canon) else 0.0
        probs = weights / total if len(canon) else weights
        probs.setflags(write=False)
        object.__setattr__(self, "ring_probs", probs)
        object.__setattr__(self, "total_weight", total)

    @property
    def m_edges(self) -> int:
        return len(self.edges)

    def edge_pairs0(self) -> list[tuple[int, int]]:
        """Edges as 0-based (low, high) pairs."""
        return [(v - 1, w - 1) for v, w, _ in self.edges]

    def weights(self) -> np.ndarray:
        return np.array([r for _, _, r in self.edges], dtype=float)

    def edge_index(self, v: int, w: int) -> int:
        if v > w:
            v, w = w, v
        for i, (x, y, _) in enumerate(self.edges):
            if x == v and y == w:
                return i
        raise KeyError(f"({v}, {w}) is not an edge")

    def incident(self) -> list[list[int]]:
        """Edge indices incident to each 0-based vertex."""
        out: list[list[int]] = [[] for _ in range(self.n)]
        for i, (v, w, _) in enumerate(self.edges):
            out[v - 1].append(i)
            out[w - 1].append(i)
        return out


def _connected(n: int, edges) -> bool:
    if n == 1:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for v, w, _ in edges:
        adj[v - 1].append(w - 1)
        adj[w - 1].append(v - 1)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def make_line(n: int) -> WeightedGraph:
    if n < 2:
        raise GraphError("line needs n >= 2")
    return WeightedGraph(n, tuple((i, i + 1, 1.0) for i in range(1, n)))


def make_cycle(n: int) -> WeightedGraph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    edges = [(i, i + 1, 1.0) for i in range(1, n)] + [(1, n, 1.0)]
    return WeightedGraph(n, tuple(edges))


def make_complete(n: int, weight_per_edge: float | None = None) -> WeightedGraph:
    if n < 2:
        raise GraphError("complete graph needs n >= 2")
    r = 1.0 / (n - 1) if weight_per_edge is None else float(weight_per_edge)
    edges = [(i, j, r) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    return WeightedGraph(n, tuple(edges))


def halve(g: WeightedGraph) -> WeightedGraph:
    return WeightedGraph(g.n, tuple((v, w, r / 2) for v, w, r in g.edges))


def save_graph(g: WeightedGraph) -> str:
    lines = [f"n={g.n}"]
    lines += [f"{v} {w} {r!r}" for v, w, r in g.edges]
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> WeightedGraph:
    """Parse the ``n=N`` header followed by ``v w r`` lines.

    Blank lines and ``#`` comments are ignored.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line)
    if not rows:
        raise GraphParseError("empty graph text")
    head = rows[0].replace(" ", "")
    if not head.startswith("n="):
        raise GraphParseError(f"expected header 'n=N', got {rows[0]!r}")
    try:
        n = int(head[2:])
    except ValueError:
        raise GraphParseError(f"bad vertex count in {rows[0]!r}") from None
    edges = []
    for line in rows[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise GraphParseError(f"expected 'v w r', got {line!r}")
        try:
            v, w, r = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphParseError(f"cannot parse edge line {line!r}") from None
        edges.append((v, w, r))
    return WeightedGraph(n, tuple(edges))


def graph_from_spec(kind: str, n: int | None = None) -> WeightedGraph:
    """Build a graph from a CLI-style spec: line, cycle, complete or file:PATH."""
    if kind.startswith("file:"):
        return load_graph(Path(kind[5:]).read_text())
    if n is None:
        raise GraphError(f"--n is required for graph kind {kind!r}")
    builders = {"line": make_line, "cycle": make_cycle, "complete": make_complete}
    if kind not in builders:
        raise GraphError(f"unknown graph kind {kind!r}")
    return builders[kind](n)
