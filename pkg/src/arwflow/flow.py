"""Time integration of the inverse curvature flow in rescaled variables.

The unknown is w = u * exp(gamma t); the graph evolution u' = vtilde / F
becomes  dw/dt = gamma w + exp(gamma t) vtilde / F,  which stays O(1) for
all time.  Classical RK4 with a parabolic stability bound on dt and
stage-level validity checks (spacelike margin, admissibility cone, positive
curvature speed); invalid steps are rejected and dt is halved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    FlowDegenerate,
    InvalidField,
    InvalidInitialData,
    NotSpacelike,
    OutsideCone,
    PinchingViolation,
    StepFailure,
)
from .geometry import GraphState, build_geometry, check_state

MAX_HALVINGS = 20


@dataclass(frozen=True)
class FlowConfig:
    t_max: float = 30.0
    dt_initial: float = 1e-3
    dt_max: float = 0.05
    safety: float = 0.2
    spacelike_margin: float = 1e-3
    F_min: float = 1e-6
    output_interval: float = 0.25
    stop_osc: Optional[float] = None
    rescaled: bool = True  # integrate w = u e^{gamma t}; False integrates u itself

    def __post_init__(self):
        for name in ("t_max", "dt_initial", "dt_max", "output_interval"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.safety <= 1.0:
            raise ValueError("safety must lie in (0, 1]")
        if self.spacelike_margin <= 0 or self.F_min <= 0:
            raise ValueError("spacelike_margin and F_min must be positive")


@dataclass(frozen=True)
class StepResult:
    accepted: bool
    dt_used: float
    rejection_reason: Optional[str] = None
    rejections: int = 0


@dataclass
class RunSummary:
    stop_reason: str
    t_final: float
    osc_final: float
    steps_accepted: int
    steps_rejected: int
    max_tail_fraction: float
    resolved: bool


def rhs(state, params, grid, functional, config, bundle=None):
    """Right-hand side of the (rescaled) height equation.

    Returns dw/dt; the positivity of u' = vtilde/F (flow toward the
    singularity tau = 0) is enforced.
    """
    if bundle is None:
        bundle = build_geometry(
            state, params, grid, functional,
            margin=config.spacelike_margin, rescaled=config.rescaled,
        )
    if np.any(bundle.F <= config.F_min):
        raise FlowDegenerate(
            f"F fell to {float(np.min(bundle.F)):.3e} <= F_min = {config.F_min}"
        )
    udot = bundle.vtilde / bundle.F
    if np.any(udot <= 0.0):
        raise FlowDegenerate("height velocity lost positivity")
    if not config.rescaled:
        return udot
    gamma = params.gamma
    return gamma * state.w + np.exp(gamma * state.t) * udot


_REJECTION_REASONS = {
    NotSpacelike: "spacelike",
    OutsideCone: "cone",
    FlowDegenerate: "F_nonpositive",
    InvalidField: "nonfinite",
}


def _classify(exc):
    for cls, reason in _REJECTION_REASONS.items():
        if isinstance(exc, cls):
            return reason
    raise exc


def _rk4_increment(state, dt, params, grid, functional, config):
    t, w = state.t, state.w
    k1 = rhs(GraphState(t, w), params, grid, functional, config)
    k2 = rhs(GraphState(t + 0.5 * dt, w + 0.5 * dt * k1), params, grid, functional, config)
    k3 = rhs(GraphState(t + 0.5 * dt, w + 0.5 * dt * k2), params, grid, functional, config)
    k4 = rhs(GraphState(t + dt, w + dt * k3), params, grid, functional, config)
    return (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def stable_dt(bundle, grid, config):
    """Parabolic stability scale of the linearized speed, safety included."""
    n = grid.n
    local = grid.dx**2 * bundle.F**2 / (2.0 * n * bundle.vtilde**2)
    return config.safety * float(np.min(local))


def step(state, config, params, grid, functional, dt_cap=None):
    """One accepted RK4 step; rejects and halves on validity violations."""
    bundle = build_geometry(
        state, params, grid, functional,
        margin=config.spacelike_margin, rescaled=config.rescaled,
    )
    dt = min(config.dt_max, stable_dt(bundle, grid, config))
    if dt_cap is not None:
        dt = min(dt, dt_cap)

    rejections = 0
    reason = None
    while rejections <= MAX_HALVINGS:
        try:
            incr = _rk4_increment(state, dt, params, grid, functional, config)
            w_new = state.w + dt * incr
            new_state = GraphState(state.t + dt, w_new)
            check_state(
                new_state, params, grid,
                margin=config.spacelike_margin, rescaled=config.rescaled,
            )
        except tuple(_REJECTION_REASONS) as exc:
            reason = _classify(exc)
            rejections += 1
            dt *= 0.5
            continue
        return new_state, StepResult(
            accepted=True, dt_used=dt, rejection_reason=reason, rejections=rejections
        )
    raise StepFailure(
        f"step rejected {rejections} times at t={state.t:.4f} "
        f"(last reason: {reason}, dt={dt:.3e})"
    )


def run(u0, config, params, grid, functional, sink=None):
    """Integrate from t=0 until t_max or the oscillation stop threshold.

    ``sink``, when given, is called as sink(state, bundle, dt, step_count)
    every output_interval (and at t=0 and the final time).
    """
    u0 = np.asarray(u0, dtype=float)
    state = GraphState(0.0, u0.copy() if config.rescaled else u0.copy())
    try:
        check_state(state, params, grid, margin=config.spacelike_margin,
                    rescaled=config.rescaled)
        bundle0 = build_geometry(
            state, params, grid, functional,
            margin=config.spacelike_margin, rescaled=config.rescaled,
        )
    except (NotSpacelike, InvalidField, FlowDegenerate, OutsideCone) as exc:
        raise InvalidInitialData(str(exc)) from exc

    # pinching band, fixed from the initial rescaled height (u = w at t = 0)
    band_lo = 1.5 * float(np.min(state.w))
    band_hi = 0.5 * float(np.max(state.w))

    def emit(bundle, dt_now, nsteps):
        if sink is not None:
            sink(state, bundle, dt_now, nsteps)

    accepted = 0
    rejected = 0
    max_tail = grid.spectral_tail_fraction(state.w)
    emit(bundle0, config.dt_initial, 0)
    next_output = config.output_interval

    stop_reason = "t_max"
    dt_now = config.dt_initial
    while state.t < config.t_max - 1e-12:
        dt_cap = min(
            config.dt_initial if accepted == 0 else config.dt_max,
            next_output - state.t,
            config.t_max - state.t,
        )
        state, result = step(state, config, params, grid, functional, dt_cap=dt_cap)
        accepted += 1
        rejected += result.rejections
        dt_now = result.dt_used

        if state.t >= next_output - 1e-9:
            bundle = build_geometry(
                state, params, grid, functional,
                margin=config.spacelike_margin, rescaled=config.rescaled,
            )
            max_tail = max(max_tail, grid.spectral_tail_fraction(state.w))
            emit(bundle, dt_now, accepted)
            next_output += config.output_interval

            w_resc = state.w if config.rescaled else state.w * np.exp(
                params.gamma * state.t
            )
            if float(np.min(w_resc)) < band_lo or float(np.max(w_resc)) > band_hi:
                raise PinchingViolation(
                    f"rescaled height left [{band_lo:.3f}, {band_hi:.3f}] "
                    f"at t={state.t:.3f}"
                )
            if config.stop_osc is not None and (
                float(np.max(w_resc) - np.min(w_resc)) < config.stop_osc
            ):
                stop_reason = "stop_osc"
                break

    w_resc = state.w if config.rescaled else state.w * np.exp(params.gamma * state.t)
    return RunSummary(
        stop_reason=stop_reason,
        t_final=float(state.t),
        osc_final=float(np.max(w_resc) - np.min(w_resc)),
        steps_accepted=accepted,
        steps_rejected=rejected,
        max_tail_fraction=float(max_tail),
        resolved=bool(max_tail < 1e-8),
    )
