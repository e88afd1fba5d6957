"""Eigenvalue ODE of the Ricci flow and pinching-set boundary checks."""

from .ricci_flow_ode import (
    FlowState,
    PinchLine,
    Trajectory,
    blow_up_time,
    boundary_derivative_gap,
    integrate,
    ode_rhs,
    pinching_invariance_experiment,
    scalar_evolution_check,
    self_similar_residual,
)

__all__ = [
    "FlowState",
    "PinchLine",
    "Trajectory",
    "blow_up_time",
    "boundary_derivative_gap",
    "integrate",
    "ode_rhs",
    "pinching_invariance_experiment",
    "scalar_evolution_check",
    "self_similar_residual",
]
