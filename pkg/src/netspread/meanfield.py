"""Discrete-time mean-field propagation dynamics on a graph.

Each node carries probabilities of being an information carrier (``p``),
a susceptible non-carrier (``q``) and, in the variant with a warning state,
of having refused the information (``w``); the residual ``1 - p - q - w`` is
the probability of being dead/offline.  All nodes update synchronously from
the previous step's snapshot:

    zeta_i(t)  = prod_j (1 - r_j * beta_ji * p_j(t-1))        over in-neighbours j
    p_i(t)     = p_i(t-1) * (1 - delta_i) + q_i(t-1) * (1 - zeta_i(t)) * nu_i
    q_i(t)     = q_i(t-1) * (zeta_i(t) - delta_i)
                 + (1 - p - q - w)(t-1) * gamma_i + chi_i * w_i(t-1)
    w_i(t)     = (1 - zeta_i(t)) * (1 - nu_i) * q_i(t-1)
                 + (1 - chi_i - delta_i) * w_i(t-1)

``zeta_i`` is the probability that node ``i`` receives nothing this step.
The plain carrier/susceptible model is the special case ``nu = 1``, ``w = 0``.

The update rule is not a stochastic matrix when ``delta_i`` exceeds
``zeta_i(t)`` (or when ``chi_i + delta_i > 1`` in the warning variant), so
probabilities can leave ``[0, 1]``.  Steps detect this and fail loudly with a
parameter-regime diagnostic; nothing is clamped.  Callers can opt into a
reporting-only mode that records violations instead of raising.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graphs import Graph
from .trajectory import Trajectory

__all__ = [
    "NodeParams",
    "LinkProbs",
    "MfState",
    "BoundViolation",
    "MeanFieldBoundsError",
    "ParamRegimeError",
    "MeanFieldRun",
    "zeta",
    "sis_step",
    "sirs_step",
    "run",
    "expected_carriers",
    "bound_violations",
]

_BOUND_SLACK = 1e-12


class MeanFieldBoundsError(RuntimeError):
    """A state component left ``[0, 1]`` beyond tolerance during a step."""

    def __init__(self, message: str, violations: list["BoundViolation"]):
        super().__init__(message)
        self.violations = violations


class ParamRegimeError(ValueError):
    """Parameters lie in a regime where the update rule is not a chain."""


@dataclass(frozen=True)
class BoundViolation:
    """One out-of-bounds component, recorded as (step, kind, node, value)."""

    step: int
    kind: str
    node: int
    value: float


def _as_prob_array(name: str, value, n: int) -> np.ndarray:
    arr = np.broadcast_to(np.asarray(value, dtype=float), (n,)).copy()
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} entries must be probabilities in [0, 1]")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class NodeParams:
    """Per-node rates, each an array of length ``n`` with entries in [0, 1].

    ``r``     broadcast probability per step while carrying,
    ``delta`` death/failure probability per step,
    ``gamma`` resurrection probability per step while dead,
    ``nu``    acceptance probability on receipt (1 = always accept),
    ``chi``   warning-decay probability per step.
    """

    r: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    nu: np.ndarray
    chi: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.r)
        for name in ("r", "delta", "gamma", "nu", "chi"):
            object.__setattr__(self, name, _as_prob_array(name, getattr(self, name), n))

    @classmethod
    def homogeneous(
        cls,
        n: int,
        *,
        r: float,
        delta: float,
        gamma: float,
        nu: float = 1.0,
        chi: float = 0.0,
    ) -> "NodeParams":
        ones = np.ones(n)
        return cls(r=r * ones, delta=delta * ones, gamma=gamma * ones,
                   nu=nu * ones, chi=chi * ones)

    @property
    def n(self) -> int:
        return len(self.r)


@dataclass(frozen=True)
class LinkProbs:
    """Per-link transmission probabilities supported on graph edges.

    Symmetric by default; an explicit mapping may assign directed values
    keyed by ordered pairs ``(src, dst)``.
    """

    graph: Graph
    scalar: float | None = None
    table: dict[tuple[int, int], float] | None = None

    def __post_init__(self) -> None:
        if (self.scalar is None) == (self.table is None):
            raise ValueError("provide exactly one of scalar or table")
        if self.scalar is not None and not (0.0 <= self.scalar <= 1.0):
            raise ValueError(f"link probability must lie in [0, 1], got {self.scalar!r}")
        if self.table is not None:
            for (u, v), b in self.table.items():
                if not self.graph.has_edge(u, v):
                    raise ValueError(f"link ({u}, {v}) is not an edge of the graph")
                if not (0.0 <= b <= 1.0):
                    raise ValueError(f"link probability must lie in [0, 1], got {b!r}")

    @classmethod
    def homogeneous(cls, graph: Graph, beta: float) -> "LinkProbs":
        return cls(graph=graph, scalar=float(beta))

    @classmethod
    def from_mapping(
        cls, graph: Graph, mapping: dict[tuple[int, int], float], symmetric: bool = True
    ) -> "LinkProbs":
        table: dict[tuple[int, int], float] = {}
        for (u, v), b in mapping.items():
            table[(u, v)] = float(b)
            if symmetric:
                table.setdefault((v, u), float(b))
        return cls(graph=graph, table=table)

    def value(self, src: int, dst: int) -> float:
        """Transmission probability along the directed link ``src -> dst``."""
        if not self.graph.has_edge(src, dst):
            return 0.0
        if self.scalar is not None:
            return self.scalar
        return self.table.get((src, dst), 0.0)  # type: ignore[union-attr]

    @cached_property
    def in_values(self) -> np.ndarray:
        """Aligned with the graph CSR: entry ``k`` of row ``i`` holds
        ``beta(indices[k] -> i)``."""
        indptr, indices = self.graph.csr
        if self.scalar is not None:
            return np.full(len(indices), self.scalar)
        out = np.zeros(len(indices))
        for i in range(self.graph.n):
            for k in range(indptr[i], indptr[i + 1]):
                out[k] = self.value(int(indices[k]), i)
        return out

    @cached_property
    def out_values(self) -> np.ndarray:
        """Aligned with the graph CSR: entry ``k`` of row ``i`` holds
        ``beta(i -> indices[k])``."""
        indptr, indices = self.graph.csr
        if self.scalar is not None:
            return np.full(len(indices), self.scalar)
        out = np.zeros(len(indices))
        for i in range(self.graph.n):
            for k in range(indptr[i], indptr[i + 1]):
                out[k] = self.value(i, int(indices[k]))
        return out


@dataclass(frozen=True)
class MfState:
    """Per-node probabilities at step ``t``: carrier ``p``, susceptible ``q``,
    warned ``w``; dead probability is the residual ``1 - p - q - w``."""

    p: np.ndarray
    q: np.ndarray
    w: np.ndarray
    t: int = 0

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        w = np.asarray(self.w, dtype=float)
        if not (p.shape == q.shape == w.shape) or p.ndim != 1:
            raise ValueError("p, q, w must be one-dimensional arrays of equal length")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "w", w)

    @classmethod
    def uniform(cls, n: int, p0: float, w0: float = 0.0) -> "MfState":
        if not (0.0 <= p0 <= 1.0 and 0.0 <= w0 <= 1.0 and p0 + w0 <= 1.0):
            raise ValueError(f"invalid initial fractions p0={p0!r} w0={w0!r}")
        return cls(
            p=np.full(n, p0), q=np.full(n, 1.0 - p0 - w0), w=np.full(n, w0), t=0
        )

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def dead(self) -> np.ndarray:
        return 1.0 - self.p - self.q - self.w


def expected_carriers(state: MfState) -> float:
    """Expected number of carriers: the sum of ``p`` over nodes."""
    return float(state.p.sum())


def zeta(state: MfState, links: LinkProbs, params: NodeParams) -> np.ndarray:
    """Probability that each node receives nothing this step.

    ``zeta_i = prod over in-neighbours j of (1 - r_j * beta_ji * p_j)``;
    nodes with no neighbours get exactly 1.
    """
    indptr, indices = links.graph.csr
    factors = 1.0 - params.r[indices] * links.in_values * state.p[indices]
    out = np.ones(links.graph.n)
    row_len = np.diff(indptr)
    mask = row_len > 0
    if factors.size:
        out[mask] = np.multiply.reduceat(factors, indptr[:-1][mask])
    return out


def bound_violations(state: MfState) -> list[BoundViolation]:
    """All components of ``state`` outside ``[-1e-12, 1 + 1e-12]`` plus any
    node whose ``p + q + w`` exceeds ``1 + 1e-12``."""
    found: list[BoundViolation] = []
    for kind, arr in (("p", state.p), ("q", state.q), ("w", state.w)):
        bad = np.flatnonzero((arr < -_BOUND_SLACK) | (arr > 1.0 + _BOUND_SLACK))
        found.extend(
            BoundViolation(step=state.t, kind=kind, node=int(i), value=float(arr[i]))
            for i in bad
        )
    total = state.p + state.q + state.w
    bad = np.flatnonzero(total > 1.0 + _BOUND_SLACK)
    found.extend(
        BoundViolation(step=state.t, kind="p+q+w", node=int(i), value=float(total[i]))
        for i in bad
    )
    return found


def _raise_bounds(violations: list[BoundViolation], zeta_t: np.ndarray,
                  params: NodeParams) -> None:
    worst = max(violations, key=lambda v: max(v.value - 1.0, -v.value))
    diag = ""
    risky = np.flatnonzero(params.delta > zeta_t)
    if risky.size:
        diag = (
            f" Parameter regime note: delta_i exceeds zeta_i(t) for "
            f"{risky.size} node(s) (first: node {int(risky[0])}, "
            f"delta={params.delta[risky[0]]:.6g}, zeta={zeta_t[risky[0]]:.6g}), "
            f"so the susceptible update coefficient is negative."
        )
    raise MeanFieldBoundsError(
        f"mean-field step {worst.step} produced {worst.kind}[{worst.node}]="
        f"{worst.value:.6g}, outside [0, 1] beyond tolerance {_BOUND_SLACK}; "
        f"values are not clamped.{diag}",
        violations,
    )


def sis_step(
    state: MfState, links: LinkProbs, params: NodeParams, *, enforce_bounds: bool = True
) -> MfState:
    """One synchronous carrier/susceptible update (no warning state).

    Requires ``state.w == 0`` everywhere; the warning state must stay empty.
    """
    if np.any(state.w != 0.0):
        raise ValueError("sis_step requires an empty warning state (w == 0)")
    z = zeta(state, links, params)
    new_p = state.p * (1.0 - params.delta) + state.q * (1.0 - z)
    new_q = state.q * (z - params.delta) + (1.0 - state.p - state.q) * params.gamma
    nxt = MfState(p=new_p, q=new_q, w=np.zeros_like(new_p), t=state.t + 1)
    if enforce_bounds:
        bad = bound_violations(nxt)
        if bad:
            _raise_bounds(bad, z, params)
    return nxt


def sirs_step(
    state: MfState, links: LinkProbs, params: NodeParams, *, enforce_bounds: bool = True
) -> MfState:
    """One synchronous update of the variant with a warning state.

    With ``nu = 1`` and an empty warning state this reduces exactly to
    :func:`sis_step`.
    """
    z = zeta(state, links, params)
    dead = 1.0 - state.p - state.q - state.w
    new_p = state.p * (1.0 - params.delta) + state.q * (1.0 - z) * params.nu
    new_q = (
        state.q * (z - params.delta)
        + dead * params.gamma
        + params.chi * state.w
    )
    new_w = (1.0 - z) * (1.0 - params.nu) * state.q + (
        1.0 - params.chi - params.delta
    ) * state.w
    nxt = MfState(p=new_p, q=new_q, w=new_w, t=state.t + 1)
    if enforce_bounds:
        bad = bound_violations(nxt)
        if bad:
            _raise_bounds(bad, z, params)
    return nxt


def validate_warning_params(params: NodeParams) -> None:
    """Reject parameter sets where ``chi + delta > 1``.

    In that regime the warned-state retention coefficient ``1 - chi - delta``
    is negative and the update is not a probability map.
    """
    bad = np.flatnonzero(params.chi + params.delta > 1.0 + 1e-15)
    if bad.size:
        i = int(bad[0])
        raise ParamRegimeError(
            f"chi + delta must not exceed 1; node {i} has chi={params.chi[i]:.6g}, "
            f"delta={params.delta[i]:.6g} (sum {params.chi[i] + params.delta[i]:.6g}). "
            f"The warned-state retention coefficient would be negative. "
            f"Pass allow_negative_coefficients=True to run anyway with "
            f"bounds checking reduced to reporting."
        )


@dataclass
class MeanFieldRun:
    """Result of iterating the mean-field dynamics."""

    trajectory: Trajectory
    final_state: MfState
    converged: bool
    steps: int
    violations: list[BoundViolation] = field(default_factory=list)


def run(
    model: str,
    state0: MfState,
    links: LinkProbs,
    params: NodeParams,
    max_steps: int = 500,
    tol: float = 1e-9,
    allow_negative_coefficients: bool = False,
) -> MeanFieldRun:
    """Iterate ``model`` (``"sis"`` or ``"sirs"``) from ``state0``.

    Stops early once the max-norm change of ``(p, q, w)`` over one step falls
    below ``tol``.  The trajectory records per-step aggregates: mean ``p``,
    mean ``q``, mean ``w``, mean dead fraction, and the expected carrier
    count.  With ``allow_negative_coefficients`` the run records bound
    violations instead of failing; otherwise the first violation aborts the
    run with a diagnostic (and, for ``"sirs"``, parameter sets with
    ``chi + delta > 1`` are rejected before the first step).
    """
    if model not in ("sis", "sirs"):
        raise ValueError(f"unknown mean-field model {model!r}")
    if model == "sirs" and not allow_negative_coefficients:
        validate_warning_params(params)
    step_fn = sis_step if model == "sis" else sirs_step
    enforce = not allow_negative_coefficients

    state = state0
    times = [state.t]
    mean_p = [state.p.mean()]
    mean_q = [state.q.mean()]
    mean_w = [state.w.mean()]
    dead = [state.dead.mean()]
    carriers = [expected_carriers(state)]
    violations: list[BoundViolation] = list(bound_violations(state0)) if not enforce else []
    converged = False
    steps_done = 0
    for _ in range(max_steps):
        nxt = step_fn(state, links, params, enforce_bounds=enforce)
        if not enforce:
            violations.extend(bound_violations(nxt))
        steps_done += 1
        times.append(nxt.t)
        mean_p.append(nxt.p.mean())
        mean_q.append(nxt.q.mean())
        mean_w.append(nxt.w.mean())
        dead.append(nxt.dead.mean())
        carriers.append(expected_carriers(nxt))
        change = max(
            np.max(np.abs(nxt.p - state.p)),
            np.max(np.abs(nxt.q - state.q)),
            np.max(np.abs(nxt.w - state.w)),
        )
        state = nxt
        if change < tol:
            converged = True
            break
    traj = Trajectory(
        times=np.array(times, dtype=np.int64),
        columns={
            "mean_p": np.array(mean_p),
            "mean_q": np.array(mean_q),
            "mean_w": np.array(mean_w),
            "dead": np.array(dead),
            "carriers": np.array(carriers),
        },
    )
    return MeanFieldRun(
        trajectory=traj,
        final_state=state,
        converged=converged,
        steps=steps_done,
        violations=violations,
    )
