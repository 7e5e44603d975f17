"""Continuous-time compartment models in population-fraction form.

Three classic models, each expressed as coupled ODEs over fractions:

* SIR epidemic:   ds/dt = -beta*i*s,              di/dt = beta*i*s - gamma*i
  with r = 1 - s - i recovered.
* SIR endemic:    adds balanced birth/death at rate mu:
  ds/dt = -beta*i*s + mu - mu*s,  di/dt = beta*i*s - (gamma + mu)*i
* SIS:            ds/dt = -beta*i*s + gamma*i,    di/dt = beta*i*s - gamma*i
  (s + i = 1 is conserved).

Integration uses the classic fixed-step fourth-order Runge-Kutta scheme.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trajectory import Trajectory

__all__ = [
    "OdeParams",
    "OdeState",
    "IntegrationInstabilityError",
    "sir_epidemic_rhs",
    "sir_endemic_rhs",
    "sis_rhs",
    "integrate",
    "ODE_MODELS",
]

_BLOWUP_LIMIT = 10.0
_FRACTION_SLACK = 1e-9
_CONSERVATION_TOL = 1e-12


class IntegrationInstabilityError(RuntimeError):
    """Raised when integration leaves the physically meaningful region."""

    def __init__(self, message: str, step: int, t: float):
        super().__init__(message)
        self.step = step
        self.t = t


@dataclass(frozen=True)
class OdeParams:
    """Rates for the compartment models; ``mu`` is only used by SIR endemic."""

    beta: float
    gamma: float
    mu: float = 0.0

    def __post_init__(self) -> None:
        for name in ("beta", "gamma", "mu"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")


@dataclass(frozen=True)
class OdeState:
    """Compartment fractions; ``r`` is meaningful for the SIR variants only."""

    s: float
    i: float
    r: float = 0.0


def sir_epidemic_rhs(state: OdeState, params: OdeParams) -> tuple[float, float]:
    """Time derivatives ``(ds, di)``; recovered evolves as 1 - s - i."""
    infections = params.beta * state.i * state.s
    recoveries = params.gamma * state.i
    return (-infections, infections - recoveries)


def sir_endemic_rhs(state: OdeState, params: OdeParams) -> tuple[float, float]:
    """SIR with balanced birth/death rate ``mu``; newborns are susceptible."""
    infections = params.beta * state.i * state.s
    ds = -infections + params.mu - params.mu * state.s
    di = infections - (params.gamma + params.mu) * state.i
    return (ds, di)


def sis_rhs(state: OdeState, params: OdeParams) -> tuple[float, float]:
    """Recovered individuals return directly to susceptible."""
    infections = params.beta * state.i * state.s
    recoveries = params.gamma * state.i
    return (recoveries - infections, infections - recoveries)


ODE_MODELS = {
    "sir_epidemic": sir_epidemic_rhs,
    "sir_endemic": sir_endemic_rhs,
    "sis": sis_rhs,
}

# Which models carry an explicit recovered compartment (r = 1 - s - i).
_HAS_RECOVERED = {"sir_epidemic": True, "sir_endemic": True, "sis": False}


def _check_state(model: str, s: float, i: float, step: int, t: float, total0: float) -> None:
    r = (1.0 - s - i) if _HAS_RECOVERED[model] else 0.0
    for name, value in (("s", s), ("i", i), ("r", r)):
        if not math.isfinite(value) or abs(value) > _BLOWUP_LIMIT:
            raise IntegrationInstabilityError(
                f"integration blew up: {name}={value!r} at step {step} (t={t:.6g}); "
                f"reduce dt or check parameters",
                step=step,
                t=t,
            )
        if value < -_FRACTION_SLACK or value > 1.0 + _FRACTION_SLACK:
            raise IntegrationInstabilityError(
                f"fraction {name}={value!r} left [0, 1] at step {step} (t={t:.6g})",
                step=step,
                t=t,
            )
    if not _HAS_RECOVERED[model]:
        drift = abs((s + i) - total0)
        if drift > _CONSERVATION_TOL * (1.0 + t):
            raise IntegrationInstabilityError(
                f"conservation violated by {drift:.3e} at step {step} (t={t:.6g})",
                step=step,
                t=t,
            )


def integrate(
    model: str,
    state0: OdeState,
    params: OdeParams,
    dt: float = 0.01,
    t_end: float = 100.0,
) -> Trajectory:
    """Fixed-step RK4 integration of ``model`` from ``state0`` to ``t_end``.

    Returns a trajectory with columns ``s``, ``i``, ``r`` sampled at every
    step (time stamps ``k * dt``).  Raises
    :class:`IntegrationInstabilityError` if any fraction leaves ``[0, 1]``
    (tolerance 1e-9), any value exceeds 10 in magnitude, or (for SIS) the
    ``s + i`` conservation identity drifts beyond 1e-12 per unit time.
    """
    if model not in ODE_MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {sorted(ODE_MODELS)}")
    if dt <= 0 or t_end <= 0:
        raise ValueError(f"dt and t_end must be positive, got dt={dt!r} t_end={t_end!r}")
    rhs = ODE_MODELS[model]
    n_steps = int(round(t_end / dt))
    if n_steps < 1:
        raise ValueError(f"t_end={t_end!r} is shorter than one step of dt={dt!r}")

    s, i = float(state0.s), float(state0.i)
    total0 = s + i
    if not _HAS_RECOVERED[model] and abs(total0 - 1.0) > 1e-9:
        raise ValueError(f"SIS requires s + i = 1, got {total0!r}")

    s_out = np.empty(n_steps + 1)
    i_out = np.empty(n_steps + 1)
    s_out[0], i_out[0] = s, i
    _check_state(model, s, i, step=0, t=0.0, total0=total0)

    sixth = dt / 6.0
    half = dt / 2.0
    for k in range(1, n_steps + 1):
        ks1, ki1 = rhs(OdeState(s, i), params)
        ks2, ki2 = rhs(OdeState(s + half * ks1, i + half * ki1), params)
        ks3, ki3 = rhs(OdeState(s + half * ks2, i + half * ki2), params)
        ks4, ki4 = rhs(OdeState(s + dt * ks3, i + dt * ki3), params)
        s = s + sixth * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4)
        i = i + sixth * (ki1 + 2.0 * ki2 + 2.0 * ki3 + ki4)
        _check_state(model, s, i, step=k, t=k * dt, total0=total0)
        s_out[k] = s
        i_out[k] = i

    times = np.arange(n_steps + 1) * dt
    if _HAS_RECOVERED[model]:
        r_out = 1.0 - s_out - i_out
    else:
        r_out = np.zeros_like(s_out)
    return Trajectory(times=times, columns={"s": s_out, "i": i_out, "r": r_out})
