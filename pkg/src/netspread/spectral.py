"""Spectral extinction threshold for the mean-field dynamics.

The linearised propagation dynamics are governed by the system matrix

    S[i][i] = 1 - delta_i
    S[i][j] = r_j * beta_ji * gamma_i / (gamma_i + delta_i)   for in-edges j -> i

whose dominant eigenvalue magnitude ``s = |lambda_1(S)|`` is the
survivability score: ``s < 1`` guarantees the expected carrier count decays
exponentially (fast extinction).  For homogeneous symmetric parameters the
score has the closed form ``(1 - delta) + r * beta * gamma / (gamma + delta)
* lambda_1(adjacency)``.

Eigenvalues are estimated by power iteration with a deterministic start
vector (normalised all-ones).  Extinction decisions always iterate on ``S``
itself: its positive diagonal breaks the ``+/- lambda`` eigenvalue pairs that
stall power iteration on bipartite adjacency structure.  The helper for raw
adjacency spectral radii applies the same cure by iterating on ``A + I`` and
shifting the estimate back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graphs import Graph
from .meanfield import LinkProbs, NodeParams

__all__ = [
    "SystemMatrix",
    "SpectralResult",
    "SurvivabilityResult",
    "ThresholdResult",
    "PowerIterationError",
    "build_system_matrix",
    "power_iteration",
    "largest_eigenvalue_magnitude",
    "adjacency_spectral_radius",
    "survivability_score",
    "homogeneous_threshold",
]

CRITICAL_BAND = 1e-3


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge within the iteration budget."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class SpectralResult:
    """Converged eigenvalue estimate.

    ``value`` is the eigenvalue magnitude, ``vector`` the unit eigenvector
    estimate (oriented so its largest-magnitude entry is positive), and
    ``residual`` the final ``||M v - lambda v||``.
    """

    value: float
    vector: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class SurvivabilityResult:
    """Survivability score with its threshold classification."""

    score: float
    fast_extinction: bool
    critical: bool
    residual: float

    @property
    def status(self) -> str:
        """``"true"``/``"false"``/``"critical"`` for reporting."""
        if self.critical:
            return "critical"
        return "true" if self.fast_extinction else "false"


@dataclass(frozen=True)
class ThresholdResult:
    """Closed-form homogeneous threshold, in both published variants.

    ``value`` is the printed form ``gamma / (delta * (gamma + delta)) *
    lambda1``; ``rate_scaled_value`` additionally multiplies by ``r * beta``.
    Neither is silently corrected; ``fast_extinction`` follows the printed
    form's comparison with 1.
    """

    value: float
    fast_extinction: bool
    rate_scaled_value: float
    rate_scaled_fast_extinction: bool


@dataclass(frozen=True)
class SystemMatrix:
    """Sparse system matrix: dense diagonal plus CSR off-diagonal entries."""

    n: int
    diag: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        contrib = self.data * v[self.indices]
        mask = np.diff(self.indptr) > 0
        if contrib.size:
            out[mask] += np.add.reduceat(contrib, self.indptr[:-1][mask])
        return out

    def to_dense(self) -> np.ndarray:
        dense = np.diag(self.diag.astype(float))
        for i in range(self.n):
            for k in range(self.indptr[i], self.indptr[i + 1]):
                dense[i, self.indices[k]] += self.data[k]
        return dense


def build_system_matrix(g: Graph, links: LinkProbs, params: NodeParams) -> SystemMatrix:
    """Assemble the system matrix for ``g`` under the given parameters.

    Rejects any node with ``delta == 0`` (the off-diagonal weight divides by
    ``gamma + delta`` and the score loses its extinction meaning without
    node failure).
    """
    if params.n != g.n:
        raise ValueError(f"params describe {params.n} nodes, graph has {g.n}")
    if links.graph is not g and links.graph.edges != g.edges:
        raise ValueError("links were built for a different graph")
    zero = np.flatnonzero(params.delta == 0.0)
    if zero.size:
        raise ValueError(
            f"system matrix requires delta > 0 for every node; "
            f"node {int(zero[0])} has delta = 0"
        )
    indptr, indices = g.csr
    # Row i, entry k: in-edge from j = indices[k]; weight r_j * beta_ji * g_i.
    gain = params.gamma / (params.gamma + params.delta)
    row_ids = np.repeat(np.arange(g.n), np.diff(indptr))
    data = params.r[indices] * links.in_values * gain[row_ids]
    return SystemMatrix(
        n=g.n,
        diag=1.0 - params.delta,
        indptr=indptr.copy(),
        indices=indices.copy(),
        data=data,
    )


def power_iteration(
    matvec: Callable[[np.ndarray], np.ndarray],
    n: int,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> SpectralResult:
    """Dominant-eigenpair estimate for the linear map ``matvec`` on R^n.

    Starts from the normalised all-ones vector.  Convergence requires both
    successive Rayleigh estimates to differ by less than ``tol`` and the
    residual ``||M v - lambda v||`` to fall below ``tol``; non-convergence
    raises :class:`PowerIterationError` carrying the last residual.
    """
    if n < 1:
        raise ValueError("matrix dimension must be positive")
    v = np.full(n, 1.0 / math.sqrt(n))
    w = matvec(v)
    lam = float(v @ w)
    residual = float(np.linalg.norm(w - lam * v))
    for it in range(1, max_iter + 1):
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            # v is in the kernel: the dominant eigenvalue along the reachable
            # subspace is 0 (e.g. the zero matrix).
            return SpectralResult(value=0.0, vector=v, iterations=it, residual=0.0)
        v_next = w / norm_w
        w_next = matvec(v_next)
        lam_next = float(v_next @ w_next)
        residual = float(np.linalg.norm(w_next - lam_next * v_next))
        if abs(lam_next - lam) < tol and residual < tol:
            vec = v_next
            peak = np.argmax(np.abs(vec))
            if vec[peak] < 0:
                vec = -vec
            return SpectralResult(
                value=abs(lam_next), vector=vec, iterations=it, residual=residual
            )
        v, w, lam = v_next, w_next, lam_next
    raise PowerIterationError(
        f"power iteration did not converge in {max_iter} iterations "
        f"(last residual {residual:.3e}, tol {tol:.3e})",
        iterations=max_iter,
        residual=residual,
    )


def largest_eigenvalue_magnitude(
    m: "SystemMatrix | np.ndarray",
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> SpectralResult:
    """Power iteration on a system matrix or a dense square array."""
    if isinstance(m, SystemMatrix):
        return power_iteration(m.matvec, m.n, tol=tol, max_iter=max_iter)
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return power_iteration(lambda v: arr @ v, arr.shape[0], tol=tol, max_iter=max_iter)


def adjacency_spectral_radius(
    g: Graph, tol: float = 1e-10, max_iter: int = 100_000
) -> SpectralResult:
    """Spectral radius of the adjacency matrix of ``g``.

    Iterates on ``A + I`` (same eigenvectors, spectrum shifted by +1) so that
    bipartite ``+/- lambda`` pairs cannot stall convergence, then shifts the
    eigenvalue estimate back.  The reported residual is identical for both
    matrices.
    """
    indptr, indices = g.csr
    ones = np.ones(len(indices))
    mask = np.diff(indptr) > 0
    starts = indptr[:-1][mask]

    def matvec(v: np.ndarray) -> np.ndarray:
        out = v.copy()
        contrib = ones * v[indices]
        if contrib.size:
            out[mask] += np.add.reduceat(contrib, starts)
        return out

    res = power_iteration(matvec, g.n, tol=tol, max_iter=max_iter)
    return SpectralResult(
        value=max(res.value - 1.0, 0.0),
        vector=res.vector,
        iterations=res.iterations,
        residual=res.residual,
    )


def survivability_score(
    g: Graph,
    links: LinkProbs,
    params: NodeParams,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    critical_band: float = CRITICAL_BAND,
) -> SurvivabilityResult:
    """Survivability score ``s = |lambda_1(S)|`` with its classification.

    ``fast_extinction`` is ``s < 1``; scores within ``critical_band`` of 1
    are additionally flagged critical (indeterminate in practice).
    """
    sm = build_system_matrix(g, links, params)
    res = largest_eigenvalue_magnitude(sm, tol=tol, max_iter=max_iter)
    score = res.value
    return SurvivabilityResult(
        score=score,
        fast_extinction=score < 1.0,
        critical=abs(score - 1.0) <= critical_band,
        residual=res.residual,
    )


def homogeneous_threshold(
    delta: float, gamma: float, r: float, beta: float, lambda1: float
) -> ThresholdResult:
    """Homogeneous closed-form threshold, published form and scaled variant.

    The printed form is ``gamma / (delta * (gamma + delta)) * lambda1``; the
    variant multiplies in the transmission rates, ``r * beta * gamma /
    (delta * (gamma + delta)) * lambda1``.  Both are reported as-is.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    if gamma < 0 or r < 0 or beta < 0 or lambda1 < 0:
        raise ValueError("gamma, r, beta and lambda1 must be non-negative")
    base = gamma / (delta * (gamma + delta)) * lambda1
    scaled = r * beta * base
    return ThresholdResult(
        value=base,
        fast_extinction=base < 1.0,
        rate_scaled_value=scaled,
        rate_scaled_fast_extinction=scaled < 1.0,
    )
