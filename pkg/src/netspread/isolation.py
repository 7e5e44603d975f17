"""Edge-isolation strategies that push the survivability score below 1.

Four ways to reduce the dominant adjacency eigenvalue of a network while
keeping nodes in place:

* greedy removal of the edges with the largest dominant-eigenvector product,
* a nearest-neighbour Hamiltonian-cycle search (walk heuristic; may fail),
* pruning a known Hamiltonian cycle down to a plain cycle (lambda_1 = 2),
* rewiring the whole edge set into a 4-regular torus lattice (lambda_1 = 4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, gen_lattice4
from .meanfield import LinkProbs, NodeParams
from .spectral import adjacency_spectral_radius, survivability_score

__all__ = [
    "IsolationReport",
    "CycleSearchResult",
    "greedy_edge_removal",
    "nn_hamiltonian_cycle",
    "prune_to_cycle",
    "rewire_to_lattice",
    "lattice_dimensions",
    "evaluate_strategy",
]


@dataclass
class IsolationReport:
    """Outcome of applying an isolation strategy to a graph."""

    strategy: str
    edges_removed: int
    removed_edges: list[tuple[int, int]]
    edges_added: list[tuple[int, int]]
    lambda1_before: float
    lambda1_after: float
    connectivity_after: int
    score_before: float | None = None
    score_after: float | None = None
    threshold_crossed: bool = False
    lambda1_steps: list[float] = field(default_factory=list)
    surplus_nodes: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "edges_removed": self.edges_removed,
            "removed_edges": [list(e) for e in self.removed_edges],
            "edges_added": [list(e) for e in self.edges_added],
            "lambda1_before": self.lambda1_before,
            "lambda1_after": self.lambda1_after,
            "connectivity_after": self.connectivity_after,
            "score_before": self.score_before,
            "score_after": self.score_after,
            "threshold_crossed": self.threshold_crossed,
            "lambda1_steps": self.lambda1_steps,
            "surplus_nodes": self.surplus_nodes,
        }


@dataclass
class CycleSearchResult:
    """Result of the nearest-neighbour Hamiltonian-cycle heuristic.

    On failure ``cycle`` is ``None`` and ``path`` holds the partial walk,
    with ``reason`` explaining where the heuristic got stuck.
    """

    success: bool
    cycle: list[int] | None
    path: list[int]
    reason: str | None = None


def _maybe_scores(
    before: Graph,
    after: Graph,
    beta_template: float | None,
    params: NodeParams | None,
) -> tuple[float | None, float | None, bool]:
    if beta_template is None or params is None:
        return None, None, False
    s_before = survivability_score(
        before, LinkProbs.homogeneous(before, beta_template), params
    ).score
    s_after = survivability_score(
        after, LinkProbs.homogeneous(after, beta_template), params
    ).score
    return s_before, s_after, (s_before >= 1.0 and s_after < 1.0)


def greedy_edge_removal(
    g: Graph,
    k: int,
    beta_template: float | None = None,
    params: NodeParams | None = None,
) -> tuple[Graph, IsolationReport]:
    """Remove ``k`` edges, each chosen to maximally damp the dominant mode.

    Each iteration recomputes the dominant adjacency eigenvector ``x`` and
    removes the edge ``(u, v)`` with the largest product ``x_u * x_v``
    (ties broken toward the lexicographically smallest pair).  Stops early
    if the graph runs out of edges.
    """
    if k < 0:
        raise ValueError(f"number of edges to remove must be >= 0, got {k!r}")
    current = g
    removed: list[tuple[int, int]] = []
    lambda1_steps: list[float] = []
    for _ in range(k):
        res = adjacency_spectral_radius(current)
        lambda1_steps.append(res.value)
        if current.num_edges == 0:
            break
        x = np.abs(res.vector)
        best_edge: tuple[int, int] | None = None
        best_score = -1.0
        for u, v in sorted(current.edges):
            score = x[u] * x[v]
            if score > best_score:
                best_score = score
                best_edge = (u, v)
        assert best_edge is not None
        current = current.remove_edges([best_edge])
        removed.append(best_edge)
    lambda1_steps.append(adjacency_spectral_radius(current).value)

    score_before, score_after, crossed = _maybe_scores(g, current, beta_template, params)
    report = IsolationReport(
        strategy="greedy",
        edges_removed=len(removed),
        removed_edges=removed,
        edges_added=[],
        lambda1_before=lambda1_steps[0],
        lambda1_after=lambda1_steps[-1],
        connectivity_after=current.connected_components(),
        score_before=score_before,
        score_after=score_after,
        threshold_crossed=crossed,
        lambda1_steps=lambda1_steps,
    )
    return current, report


def nn_hamiltonian_cycle(g: Graph, start: int = 0) -> CycleSearchResult:
    """Greedy Hamiltonian-cycle search over existing edges.

    From the current node, step to the unvisited neighbour of minimum degree
    (ties broken toward the lowest node id).  Succeeds when all ``n`` nodes
    are visited and an edge leads back to the start.
    """
    if not (0 <= start < g.n):
        raise ValueError(f"start node {start!r} out of range for n={g.n}")
    degrees = g.degrees
    visited = np.zeros(g.n, dtype=bool)
    path = [start]
    visited[start] = True
    current = start
    while len(path) < g.n:
        candidates = [int(v) for v in g.adjacency[current] if not visited[v]]
        if not candidates:
            return CycleSearchResult(
                success=False,
                cycle=None,
                path=path,
                reason=(
                    f"stuck at node {current} after visiting {len(path)} of "
                    f"{g.n} nodes: no unvisited neighbour"
                ),
            )
        nxt = min(candidates, key=lambda v: (degrees[v], v))
        path.append(nxt)
        visited[nxt] = True
        current = nxt
    if g.has_edge(current, start):
        return CycleSearchResult(success=True, cycle=path, path=path)
    return CycleSearchResult(
        success=False,
        cycle=None,
        path=path,
        reason=(
            f"visited all {g.n} nodes but final node {current} has no edge "
            f"back to start {start}"
        ),
    )


def prune_to_cycle(
    g: Graph,
    cycle: list[int],
    beta_template: float | None = None,
    params: NodeParams | None = None,
) -> tuple[Graph, IsolationReport]:
    """Keep only the edges of a known Hamiltonian cycle of ``g``.

    The result is 2-regular and connected with dominant eigenvalue exactly 2.
    The cycle must visit every node exactly once, and every consecutive pair
    (including the wrap-around) must be an edge of ``g``.
    """
    if len(cycle) != g.n or len(set(cycle)) != g.n or set(cycle) != set(range(g.n)):
        raise ValueError("cycle must visit every node exactly once")
    cycle_edges: set[tuple[int, int]] = set()
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        if not g.has_edge(a, b):
            raise ValueError(f"cycle step ({a}, {b}) is not an edge of the graph")
        cycle_edges.add((a, b) if a < b else (b, a))
    pruned = Graph(n=g.n, edges=frozenset(cycle_edges))
    removed = sorted(g.edges - cycle_edges)

    lam_before = adjacency_spectral_radius(g).value
    lam_after = adjacency_spectral_radius(pruned).value
    score_before, score_after, crossed = _maybe_scores(g, pruned, beta_template, params)
    report = IsolationReport(
        strategy="cycle",
        edges_removed=len(removed),
        removed_edges=removed,
        edges_added=[],
        lambda1_before=lam_before,
        lambda1_after=lam_after,
        connectivity_after=pruned.connected_components(),
        score_before=score_before,
        score_after=score_after,
        threshold_crossed=crossed,
    )
    return pruned, report


def lattice_dimensions(n: int) -> tuple[int, int] | None:
    """Factorisation ``rows * cols == n`` with both factors >= 3.

    ``rows`` starts at ``floor(sqrt(n))`` and is adjusted downward until it
    divides ``n``; returns ``None`` when no such factorisation exists.
    """
    for rows in range(int(math.isqrt(n)), 2, -1):
        if n % rows == 0 and n // rows >= 3:
            return rows, n // rows
    return None


def rewire_to_lattice(
    g: Graph,
    beta_template: float | None = None,
    params: NodeParams | None = None,
) -> tuple[Graph, IsolationReport]:
    """Replace the entire edge set with a 4-regular torus lattice.

    Node count is preserved.  When ``n`` has no factorisation ``rows * cols``
    with both factors >= 3 (e.g. prime ``n``), the largest ``n' <= n`` that
    has one is used and the surplus nodes are chained pairwise into the torus
    ring structure: consecutive surplus pairs are spliced into distinct
    row-0 edges (edge ``(2t, 2t+1)`` becomes a path through the pair), which
    gives them degree 2.  Surplus nodes are listed in the report.
    """
    if g.n < 9:
        raise ValueError(f"lattice rewiring needs at least 9 nodes, got {g.n}")
    dims = lattice_dimensions(g.n)
    surplus: list[int] = []
    if dims is not None:
        lattice = gen_lattice4(*dims)
        edges = set(lattice.edges)
    else:
        n_prime = g.n - 1
        while n_prime >= 9 and lattice_dimensions(n_prime) is None:
            n_prime -= 1
        if n_prime < 9:
            raise ValueError(f"no usable torus factorisation at or below n={g.n}")
        dims = lattice_dimensions(n_prime)
        assert dims is not None
        surplus = list(range(n_prime, g.n))
        lattice = gen_lattice4(*dims)
        edges = set(lattice.edges)
        cols = dims[1]
        pairs = [surplus[i : i + 2] for i in range(0, len(surplus), 2)]
        if 2 * len(pairs) > cols:
            raise ValueError(
                f"too many surplus nodes ({len(surplus)}) to splice into a "
                f"{dims[0]}x{dims[1]} torus"
            )
        for t, chain in enumerate(pairs):
            a, b = 2 * t, 2 * t + 1
            edges.remove((a, b))
            route = [a, *chain, b]
            for x, y in zip(route, route[1:]):
                edges.add((x, y) if x < y else (y, x))
    rewired = Graph(n=g.n, edges=frozenset(edges))

    lam_before = adjacency_spectral_radius(g).value
    lam_after = adjacency_spectral_radius(rewired).value
    score_before, score_after, crossed = _maybe_scores(g, rewired, beta_template, params)
    report = IsolationReport(
        strategy="lattice",
        edges_removed=len(g.edges - rewired.edges),
        removed_edges=sorted(g.edges - rewired.edges),
        edges_added=sorted(rewired.edges - g.edges),
        lambda1_before=lam_before,
        lambda1_after=lam_after,
        connectivity_after=rewired.connected_components(),
        score_before=score_before,
        score_after=score_after,
        threshold_crossed=crossed,
        surplus_nodes=surplus,
    )
    return rewired, report


def evaluate_strategy(
    g_before: Graph,
    g_after: Graph,
    beta_template: float,
    params: NodeParams,
    strategy: str = "custom",
) -> IsolationReport:
    """Compare two graphs under the same node parameters.

    Link probabilities are re-instantiated homogeneously on each graph's
    surviving edges.  Reports dominant eigenvalues, survivability scores,
    connectivity of the modified graph, and whether the modification crossed
    the extinction threshold from above.
    """
    if g_before.n != g_after.n:
        raise ValueError("graphs must share the same node set")
    lam_before = adjacency_spectral_radius(g_before).value
    lam_after = adjacency_spectral_radius(g_after).value
    score_before, score_after, crossed = _maybe_scores(
        g_before, g_after, beta_template, params
    )
    return IsolationReport(
        strategy=strategy,
        edges_removed=len(g_before.edges - g_after.edges),
        removed_edges=sorted(g_before.edges - g_after.edges),
        edges_added=sorted(g_after.edges - g_before.edges),
        lambda1_before=lam_before,
        lambda1_after=lam_after,
        connectivity_after=g_after.connected_components(),
        score_before=score_before,
        score_after=score_after,
        threshold_crossed=crossed,
    )
