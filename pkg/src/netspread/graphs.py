"""Graph substrates for propagation experiments.

Provides an immutable undirected simple graph type, four generator families
(binomial/Erdos-Renyi, preferential-attachment power law, exponential-degree
configuration model, 4-regular torus lattice), degree statistics, and a plain
text edge-list format for persistence.

All generators are deterministic for a fixed seed: the same seed produces the
same edge set in any process.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import IO, Iterable

import numpy as np

__all__ = [
    "Graph",
    "DegreeDistribution",
    "EdgeListFormatError",
    "gen_binomial",
    "gen_powerlaw",
    "gen_exponential",
    "gen_lattice4",
    "sample_exponential_degrees",
    "degree_distribution",
    "save_edge_list",
    "load_edge_list",
]


class EdgeListFormatError(ValueError):
    """Raised when an edge-list file violates the on-disk format."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0 .. n-1``.

    Edges are stored once each as ``(u, v)`` with ``u < v``; no self-loops,
    no parallel edges.
    """

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"node count must be a positive integer, got {self.n!r}")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(
                    f"edge ({u}, {v}) violates 0 <= u < v < {self.n}"
                )

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph, normalising each pair to ``(min, max)`` order."""
        normalised = set()
        for u, v in pairs:
            if u == v:
                raise ValueError(f"self-loop ({u}, {v}) is not allowed")
            normalised.add((u, v) if u < v else (v, u))
        return cls(n=n, edges=frozenset(normalised))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as a sorted ``(m, 2)`` integer array (lexicographic order)."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, ...]:
        """Per-node sorted neighbour arrays."""
        neigh: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            neigh[u].append(v)
            neigh[v].append(u)
        return tuple(np.array(sorted(lst), dtype=np.int64) for lst in neigh)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in CSR form: ``(indptr, indices)`` with sorted rows."""
        degrees = np.array([len(a) for a in self.adjacency], dtype=np.int64)
        indptr = np.concatenate(([0], np.cumsum(degrees)))
        if degrees.sum() == 0:
            return indptr, np.empty(0, dtype=np.int64)
        indices = np.concatenate(self.adjacency)
        return indptr, indices

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edges

    def remove_edges(self, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Return a copy with the given edges removed (edges must exist)."""
        doomed = set()
        for u, v in pairs:
            e = (u, v) if u < v else (v, u)
            if e not in self.edges:
                raise ValueError(f"edge {e} not present in graph")
            doomed.add(e)
        return Graph(n=self.n, edges=self.edges - doomed)

    def connected_components(self) -> int:
        """Number of connected components (isolated nodes count)."""
        seen = np.zeros(self.n, dtype=bool)
        count = 0
        for start in range(self.n):
            if seen[start]:
                continue
            count += 1
            seen[start] = True
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        queue.append(int(w))
        return count


@dataclass(frozen=True)
class DegreeDistribution:
    """Empirical degree histogram of a graph."""

    histogram: dict[int, int]
    n: int

    @property
    def mean(self) -> float:
        total = sum(d * c for d, c in self.histogram.items())
        return total / self.n

    @property
    def max_degree(self) -> int:
        return max(self.histogram) if self.histogram else 0


def degree_distribution(g: Graph) -> DegreeDistribution:
    return DegreeDistribution(histogram=dict(Counter(int(d) for d in g.degrees)), n=g.n)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _as_rng(seed_or_rng: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def gen_binomial(n: int, p: float, seed: int | np.random.Generator) -> Graph:
    """Binomial random graph: each of the C(n, 2) pairs is an edge w.p. ``p``."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"edge probability must lie in [0, 1], got {p!r}")
    rng = _as_rng(seed)
    edges: list[tuple[int, int]] = []
    for u in range(n - 1):
        hits = np.flatnonzero(rng.random(n - 1 - u) < p)
        edges.extend((u, u + 1 + int(h)) for h in hits)
    return Graph(n=n, edges=frozenset(edges))


def gen_powerlaw(n: int, m: int, seed: int | np.random.Generator) -> Graph:
    """Preferential-attachment graph with power-law degree tail.

    Starts from a complete graph on ``m + 1`` nodes; each subsequent node
    attaches ``m`` edges to distinct existing nodes chosen with probability
    proportional to their current degree.  Edge count is therefore
    ``C(m+1, 2) + (n - m - 1) * m``.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"attachment count m must be a positive integer, got {m!r}")
    if not isinstance(n, int) or n < m + 1:
        raise ValueError(f"n must be at least m + 1 = {m + 1}, got {n!r}")
    rng = _as_rng(seed)
    edges: list[tuple[int, int]] = [
        (u, v) for u in range(m + 1) for v in range(u + 1, m + 1)
    ]
    # One entry per unit of degree; sampling an entry uniformly realises
    # degree-proportional selection.
    repeated: list[int] = [u for u in range(m + 1) for _ in range(m)]
    for new in range(m + 1, n):
        targets: list[int] = []
        while len(targets) < m:
            cand = repeated[int(rng.integers(0, len(repeated)))]
            if cand not in targets:
                targets.append(cand)
        edges.extend((t, new) for t in targets)
        repeated.extend(targets)
        repeated.extend([new] * m)
    return Graph(n=n, edges=frozenset(edges))


def sample_exponential_degrees(
    n: int, lam: float, seed: int | np.random.Generator
) -> np.ndarray:
    """Target degree sequence ``max(1, round(X))`` with ``X ~ Exp(lam)``."""
    if lam <= 0:
        raise ValueError(f"rate lam must be positive, got {lam!r}")
    rng = _as_rng(seed)
    draws = rng.exponential(scale=1.0 / lam, size=n)
    return np.maximum(1, np.rint(draws)).astype(np.int64)


def gen_exponential(n: int, lam: float, seed: int | np.random.Generator) -> Graph:
    """Configuration-model graph with exponential target degrees.

    Degrees are drawn via :func:`sample_exponential_degrees`; if their sum is
    odd the first entry is incremented by one.  Stubs are shuffled and paired;
    self-loops and duplicate edges are discarded, so realised degrees can fall
    short of targets.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"n must be at least 2, got {n!r}")
    rng = _as_rng(seed)
    degrees = sample_exponential_degrees(n, lam, rng)
    if degrees.sum() % 2 == 1:
        degrees[0] += 1
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    edges: set[tuple[int, int]] = set()
    for u, v in pairs:
        if u == v:
            continue
        edges.add((int(u), int(v)) if u < v else (int(v), int(u)))
    return Graph(n=n, edges=frozenset(edges))


def gen_lattice4(rows: int, cols: int) -> Graph:
    """4-regular torus lattice: node ``(i, j)`` has id ``i * cols + j``.

    Each node is adjacent to its four wrap-around grid neighbours, so the
    graph has exactly ``2 * rows * cols`` edges.  Requires both dimensions
    to be at least 3 so that wrap-around creates no duplicate edges.
    """
    if rows < 3 or cols < 3:
        raise ValueError(
            f"torus dimensions must both be >= 3, got rows={rows!r} cols={cols!r}"
        )
    edges: set[tuple[int, int]] = set()
    for i in range(rows):
        for j in range(cols):
            u = i * cols + j
            right = i * cols + (j + 1) % cols
            down = ((i + 1) % rows) * cols + j
            edges.add((u, right) if u < right else (right, u))
            edges.add((u, down) if u < down else (down, u))
    return Graph(n=rows * cols, edges=frozenset(edges))


# ---------------------------------------------------------------------------
# Edge-list persistence
# ---------------------------------------------------------------------------

def save_edge_list(g: Graph, destination: str | Path | IO[str]) -> None:
    """Write ``g`` as a plain text edge list.

    Format: first non-comment line is the node count; each subsequent line is
    ``"u v"`` with ``0 <= u < v < n``, in lexicographic order.
    """
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)  # type: ignore[union-attr]
    else:
        Path(destination).write_text(text, encoding="utf-8")


def load_edge_list(source: str | Path | IO[str]) -> Graph:
    """Parse an edge list written by :func:`save_edge_list`.

    Lines starting with ``#`` and blank lines are ignored.  Endpoint pairs may
    appear in either order but are normalised; malformed lines, out-of-range
    endpoints, self-loops and duplicate edges raise
    :class:`EdgeListFormatError` naming the offending line number.
    """
    if hasattr(source, "read"):
        text = source.read()  # type: ignore[union-attr]
    else:
        text = Path(source).read_text(encoding="utf-8")
    n: int | None = None
    edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise EdgeListFormatError(
                    f"line {lineno}: expected node count, got {line!r}"
                ) from None
            if n < 1:
                raise EdgeListFormatError(
                    f"line {lineno}: node count must be positive, got {n}"
                )
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListFormatError(
                f"line {lineno}: expected 'u v', got {line!r}"
            )
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(
                f"line {lineno}: non-integer endpoint in {line!r}"
            ) from None
        if u == v:
            raise EdgeListFormatError(f"line {lineno}: self-loop ({u}, {v})")
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListFormatError(
                f"line {lineno}: endpoint out of range for n={n}: ({u}, {v})"
            )
        e = (u, v) if u < v else (v, u)
        if e in edges:
            raise EdgeListFormatError(f"line {lineno}: duplicate edge {e}")
        edges.add(e)
    if n is None:
        raise EdgeListFormatError("file contains no node-count line")
    return Graph(n=n, edges=frozenset(edges))
