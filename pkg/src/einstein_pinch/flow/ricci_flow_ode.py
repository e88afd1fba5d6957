"""Eigenvalue ODE of the Ricci flow on Einstein curvature operators.

The state is the six eigenvalues (a1, a2, a3, c1, c2, c3) of the self-dual and
anti-self-dual blocks, evolving by

    a1' = a1^2 + 2 a2 a3,  a2' = a2^2 + 2 a1 a3,  a3' = a3^2 + 2 a1 a2

and likewise for c. Integration is a fixed-step classical Runge-Kutta scheme
with a blow-up guard.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from einstein_pinch.constants import ALGEBRAIC_TOL, EIGEN_TOL
from einstein_pinch.curvature.curvature_core import EigenProfile
from einstein_pinch.errors import BlowUpError, DomainError, PreconditionError
from einstein_pinch.pinching.sampling import Lemma22Region

LOGGER = logging.getLogger("einstein-pinch")

BLOW_UP_GUARD = 1e12
BOUNDARY_TOL = 1e-9
CSV_COLUMNS = ("t", "a1", "a2", "a3", "c1", "c2", "c3", "R", "I")


@dataclass(frozen=True)
class FlowState:
    profile: EigenProfile
    t: float = 0.0

    def as_vector(self) -> np.ndarray:
        return self.profile.as_array()


@dataclass(frozen=True)
class PinchLine:
    """The moving half-space a1 + c1 >= (kappa + delta t) R."""

    kappa: float
    delta: float

    @classmethod
    def through(cls, profile: EigenProfile, delta: float) -> PinchLine:
        """The line through ``profile`` at t = 0."""
        return cls(kappa=(profile.a[0] + profile.c[0]) / profile.scalar_curvature, delta=delta)

    def level(self, t: float) -> float:
        return self.kappa + self.delta * t


def _triple_rhs(a: np.ndarray) -> np.ndarray:
    return np.stack(
        [
            a[..., 0] ** 2 + 2.0 * a[..., 1] * a[..., 2],
            a[..., 1] ** 2 + 2.0 * a[..., 0] * a[..., 2],
            a[..., 2] ** 2 + 2.0 * a[..., 0] * a[..., 1],
        ],
        axis=-1,
    )


def rhs_vector(state: np.ndarray) -> np.ndarray:
    """Right-hand side on stacked 6-vectors (a1, a2, a3, c1, c2, c3)."""
    return np.concatenate([_triple_rhs(state[..., :3]), _triple_rhs(state[..., 3:])], axis=-1)


def ode_rhs(p: EigenProfile) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    derivative = rhs_vector(p.as_array())
    return tuple(float(v) for v in derivative[:3]), tuple(float(v) for v in derivative[3:])  # type: ignore[return-value]


def _invariant_rows(states: np.ndarray) -> np.ndarray:
    a = np.sort(states[..., :3], axis=-1)
    c = np.sort(states[..., 3:], axis=-1)
    return (
        (c[..., 1] - c[..., 0]) * c[..., 2]
        + (c[..., 2] - c[..., 0]) * c[..., 1]
        + (a[..., 1] - a[..., 0]) * a[..., 2]
        + (a[..., 2] - a[..., 0]) * a[..., 1]
    )


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    resort_events: list[float] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def scalar_curvature(self) -> np.ndarray:
        return self.states.sum(axis=1)

    @property
    def invariant(self) -> np.ndarray:
        return _invariant_rows(self.states)

    def table(self) -> np.ndarray:
        return np.column_stack([self.times, self.states, self.scalar_curvature, self.invariant])

    def to_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, self.table(), delimiter=",", header=",".join(CSV_COLUMNS), comments="", fmt="%.17g")
        LOGGER.info("Trajectory written to %s (%d rows)", path, len(self.times))
        return path

    def summary(self) -> dict[str, Any]:
        final = self.final
        return {
            "steps": int(len(self.times) - 1),
            "t_final": float(self.times[-1]),
            "final": {"a": final[:3].tolist(), "c": final[3:].tolist()},
            "R_final": float(final.sum()),
            "I_final": float(_invariant_rows(final)),
            "resort_events": len(self.resort_events),
        }


def blow_up_time(p: EigenProfile, t0: float = 0.0) -> float:
    """Blow-up time of the traces, t0 + 1 / max(sum a, sum c); inf when both are <= 0."""
    rate = max(p.trace_a, p.trace_c)
    return math.inf if rate <= 0 else t0 + 1.0 / rate


def _rk4_step(y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs_vector(y)
    k2 = rhs_vector(y + 0.5 * h * k1)
    k3 = rhs_vector(y + 0.5 * h * k2)
    k4 = rhs_vector(y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _unsorted(y: np.ndarray) -> bool:
    return bool(np.any(np.diff(y[:3]) < -ALGEBRAIC_TOL) or np.any(np.diff(y[3:]) < -ALGEBRAIC_TOL))


def integrate(s: FlowState, t_end: float, dt: float, *, guard: float = BLOW_UP_GUARD) -> Trajectory:
    """Fixed-step RK4 from ``s.t`` to ``t_end``; the last step is shortened to land on ``t_end``."""
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if t_end < s.t:
        raise DomainError(f"t_end = {t_end} precedes the initial time {s.t}")
    horizon = blow_up_time(s.profile, s.t)
    if t_end >= horizon:
        raise PreconditionError(
            f"t_end = {t_end} is not before the blow-up time {horizon:.6g}",
            constraint="t_end_before_blow_up",
        )

    n_steps = max(0, math.ceil((t_end - s.t) / dt - 1e-9))
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 6))
    times[0] = s.t
    states[0] = s.as_vector()
    resort_events: list[float] = []
    was_unsorted = False

    for step in range(1, n_steps + 1):
        t_prev = times[step - 1]
        t_next = min(s.t + step * dt, t_end)
        y = _rk4_step(states[step - 1], t_next - t_prev)
        peak = float(np.max(np.abs(y)))
        if not np.isfinite(peak) or peak > guard:
            estimate = t_next + (1.0 / peak if np.isfinite(peak) and peak > 0 else 0.0)
            raise BlowUpError(
                f"eigenvalue magnitude exceeded {guard:.0e} at t = {t_next:.6g}; blow-up near t = {estimate:.6g}",
                t=float(t_next),
                t_blowup=float(estimate),
            )
        times[step] = t_next
        states[step] = y
        now_unsorted = _unsorted(y)
        if now_unsorted and not was_unsorted:
            resort_events.append(float(t_next))
        was_unsorted = now_unsorted

    if resort_events:
        LOGGER.info("Eigenvalue ordering changed %d time(s) along the trajectory", len(resort_events))
    LOGGER.debug("Integrated %d steps to t = %.6g", n_steps, times[-1])
    return Trajectory(times=times, states=states, resort_events=resort_events)


# ------------------------------------------------------------------
# Checks against closed forms
# ------------------------------------------------------------------

def _require_einstein_traces(p: EigenProfile) -> None:
    if abs(p.trace_a - 2.0) > EIGEN_TOL or abs(p.trace_c - 2.0) > EIGEN_TOL:
        raise PreconditionError(
            f"profile traces ({p.trace_a:.12g}, {p.trace_c:.12g}) are not (2, 2)",
            constraint="einstein_traces",
        )


def self_similar_residual(p: EigenProfile, t_end: float = 0.4, dt: float = 1e-4) -> float:
    """Max relative deviation from a_i(t) = a_i(0) / (1 - 2t), c_i(t) = c_i(0) / (1 - 2t)."""
    _require_einstein_traces(p)
    trajectory = integrate(FlowState(p), t_end, dt)
    exact = p.as_array()[None, :] / (1.0 - 2.0 * trajectory.times)[:, None]
    scale = np.maximum(np.max(np.abs(exact), axis=1), 1.0)
    return float(np.max(np.max(np.abs(trajectory.states - exact), axis=1) / scale))


def trace_identity_residual(p: EigenProfile, t_end: float = 0.4, dt: float = 1e-4) -> float:
    """Max relative deviation of sum a and sum c from s(0) / (1 - s(0) t)."""
    trajectory = integrate(FlowState(p), t_end, dt)
    worst = 0.0
    for trace0, columns in ((p.trace_a, slice(0, 3)), (p.trace_c, slice(3, 6))):
        exact = trace0 / (1.0 - trace0 * trajectory.times)
        observed = trajectory.states[:, columns].sum(axis=1)
        worst = max(worst, float(np.max(np.abs(observed - exact) / np.maximum(np.abs(exact), 1.0))))
    return worst


def scalar_evolution_check(p: EigenProfile, t_end: float = 0.4, dt: float = 1e-4) -> float:
    """Max relative deviation of R(t) from the solution of dR/dt = R^2/2, R(t) = 4 / (1 - 2t)."""
    _require_einstein_traces(p)
    trajectory = integrate(FlowState(p), t_end, dt)
    exact = 4.0 / (1.0 - 2.0 * trajectory.times)
    return float(np.max(np.abs(trajectory.scalar_curvature - exact) / exact))


def step_halving_error(p: EigenProfile, t_end: float, dt: float) -> float:
    """Richardson estimate of the final-state error at step ``dt``."""
    coarse = integrate(FlowState(p), t_end, dt).final
    fine = integrate(FlowState(p), t_end, dt / 2.0).final
    return float(np.max(np.abs(coarse - fine)) / 15.0 / max(1.0, float(np.max(np.abs(fine)))))


def convergence_ratio(p: EigenProfile, t_end: float = 0.4, dt: float = 1e-2) -> float:
    """self_similar_residual(dt) / self_similar_residual(dt / 2); about 16 for a fourth-order scheme."""
    return self_similar_residual(p, t_end, dt) / self_similar_residual(p, t_end, dt / 2.0)


# ------------------------------------------------------------------
# Pinching boundary
# ------------------------------------------------------------------

def _min_component_rate(values: np.ndarray, rates: np.ndarray, tol: float) -> np.ndarray:
    """Derivative of min(values) along rows: min of rates over components tied with the minimum."""
    lowest = np.min(values, axis=-1, keepdims=True)
    tied = values - lowest <= tol
    return np.min(np.where(tied, rates, np.inf), axis=-1)


def _boundary_gaps(states: np.ndarray, kappa: np.ndarray, delta: float, t: float) -> np.ndarray:
    rates = rhs_vector(states)
    tol = 1e-12 * np.maximum(1.0, np.max(np.abs(states), axis=-1, keepdims=True))
    d_min = _min_component_rate(states[..., :3], rates[..., :3], tol) + _min_component_rate(
        states[..., 3:], rates[..., 3:], tol
    )
    r = states.sum(axis=-1)
    d_r = rates.sum(axis=-1)
    return d_min - ((kappa + delta * t) * d_r + delta * r)


def boundary_derivative_gap(p: EigenProfile, line: PinchLine, t: float) -> float:
    """d/dt(a1 + c1) - d/dt[(kappa + delta t) R] at a profile on the pinch line.

    For sum a = sum c this equals I(p) - delta R.
    """
    r = p.scalar_curvature
    level = line.level(t)
    offset = p.a[0] + p.c[0] - level * r
    if abs(offset) > BOUNDARY_TOL * max(1.0, abs(r)):
        raise PreconditionError(
            f"profile is off the pinch boundary by {offset:.3e}",
            constraint="on_pinch_boundary",
        )
    gap = _boundary_gaps(p.as_array()[None, :], np.array([line.kappa]), line.delta, t)
    return float(gap[0])


def boundary_identity_residual(p: EigenProfile) -> float:
    """|d/dt(a1 + c1) - [(a1 + c1) R / 2 + I]| for profiles with equal traces."""
    if abs(p.trace_a - p.trace_c) > EIGEN_TOL:
        raise PreconditionError("boundary identity needs equal traces", constraint="equal_traces")
    (da, _, _), (dc, _, _) = ode_rhs(p)
    state = p.as_array()
    expected = (p.a[0] + p.c[0]) * p.scalar_curvature / 2.0 + float(_invariant_rows(state))
    return abs(da + dc - expected)


@dataclass(frozen=True)
class PinchingExperiment:
    eps: float
    samples: int
    delta: float
    min_ratio: float
    min_gap: float
    min_gap_index: int

    @property
    def all_positive(self) -> bool:
        return self.min_gap > 0.0

    def to_json(self) -> dict[str, Any]:
        return {
            "eps": self.eps,
            "samples": self.samples,
            "delta": self.delta,
            "min_I_over_R": self.min_ratio,
            "min_gap": self.min_gap,
            "min_gap_index": self.min_gap_index,
            "all_positive": self.all_positive,
        }


def pinching_invariance_experiment(
    eps: float,
    samples: int,
    seed: int,
    *,
    delta_fraction: float = 0.5,
) -> PinchingExperiment:
    """Place sampled Lemma 2.2 configurations on their own pinch lines and check the boundary gap.

    delta is ``delta_fraction`` times the smallest sampled I / R, so every gap
    I - delta R should be positive.
    """
    if not 0.0 < delta_fraction < 1.0:
        raise DomainError(f"delta_fraction must lie in (0, 1), got {delta_fraction}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    batch = Lemma22Region(eps).sample(rng, samples)
    a = np.sort(np.column_stack([2 * (batch.m - batch.x), 2 * (batch.k13 - batch.y), 2 * (batch.k14 + batch.x + batch.y)]), axis=1)
    c = np.sort(np.column_stack([2 * (batch.m + batch.x), 2 * (batch.k13 + batch.y), 2 * (batch.k14 - batch.x - batch.y)]), axis=1)
    states = np.hstack([a, c])
    r = states.sum(axis=1)
    ratios = _invariant_rows(states) / r
    delta = delta_fraction * float(np.min(ratios))
    kappa = (a[:, 0] + c[:, 0]) / r
    gaps = _boundary_gaps(states, kappa, delta, 0.0)
    worst = int(np.argmin(gaps))
    LOGGER.info(
        "Pinching experiment: %d samples, delta = %.6e, min gap = %.6e",
        samples,
        delta,
        float(gaps[worst]),
    )
    return PinchingExperiment(
        eps=eps,
        samples=samples,
        delta=delta,
        min_ratio=float(np.min(ratios)),
        min_gap=float(gaps[worst]),
        min_gap_index=worst,
    )
