"""Subcommand implementations; each returns a report envelope and an exit code."""
from __future__ import annotations

import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from einstein_pinch.curvature.berger_frame import (
    FrameMethod,
    find_berger_frame,
    profile_to_berger,
    spectrum_degenerate,
    verify_berger_properties,
)
from einstein_pinch.curvature.curvature_core import (
    CurvatureTensor4,
    EigenProfile,
    blocks_to_profile,
    min_max_sectional,
    model_space,
    scalar_curvature,
    tensor_to_blocks,
)
from einstein_pinch.errors import DomainError, EmptyRegionError, PreconditionError
from einstein_pinch.flow.ricci_flow_ode import (
    FlowState,
    blow_up_time,
    boundary_identity_residual,
    integrate,
    pinching_invariance_experiment,
    scalar_evolution_check,
    self_similar_residual,
    step_halving_error,
    trace_identity_residual,
)
from einstein_pinch.pinching.pinch_lab import (
    constants_table,
    corollary13_audit,
    lemma22_case_bounds,
    lemma41_root_residuals,
    proof_constants_audit,
)
from einstein_pinch.pinching.search import (
    SearchConfig,
    empirical_delta,
    lemma22_case3_domination,
    lemma22_search,
    lemma41_domination,
    lemma41_search,
)
from einstein_pinch.utils.config import PinchConfig
from einstein_pinch.utils.reporting.run_reports import Attachment
from einstein_pinch.utils.reporting.schema import ReportEnvelope

LOGGER = logging.getLogger("einstein-pinch")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PRECONDITION = 2
EXIT_COUNTEREXAMPLE = 3

SELF_SIMILAR_TOL = 1e-6


@dataclass
class CommandResult:
    envelope: ReportEnvelope
    exit_code: int = EXIT_OK
    attachments: dict[str, Attachment] = field(default_factory=dict)


def _envelope(
    command: str,
    config: PinchConfig,
    arguments: dict[str, Any],
    payload: dict[str, Any],
    started: float,
) -> ReportEnvelope:
    return ReportEnvelope(
        command=command,
        seed=config.seed,
        config={**config.as_dict(), "arguments": arguments},
        payload=payload,
        wall_time=time.perf_counter() - started,
    )


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


# ------------------------------------------------------------------
# constants
# ------------------------------------------------------------------

def cmd_constants(config: PinchConfig, *, precision: int | None = None) -> CommandResult:
    started = time.perf_counter()
    places = config.precision if precision is None else precision
    table = constants_table(places)
    audit = corollary13_audit(places)
    facts = proof_constants_audit()
    mismatched = [row.name for row in table.rows if row.matches is False]
    if mismatched:
        LOGGER.warning("Printed decimals that do not match their closed forms: %s", ", ".join(mismatched))

    payload = {
        "status": "ok",
        "table": table.to_json(),
        "all_printed_decimals_match": not mismatched,
        "corollary_audit": audit.to_json(),
        "proof_constants": [{"name": f.name, "value": f.value, "holds": f.holds} for f in facts],
        "lemma41_root_residuals": lemma41_root_residuals(),
    }
    envelope = _envelope("constants", config, {"precision": places}, payload, started)
    return CommandResult(envelope)


# ------------------------------------------------------------------
# verify
# ------------------------------------------------------------------

def cmd_verify(
    config: PinchConfig,
    *,
    lemma: str,
    eps: float,
    s: float = 0.0,
    samples: int | None = None,
    refinements: int | None = None,
    ablate_upper_bound: bool = False,
    domination_samples: int = 10_000,
    pinching_samples: int = 100_000,
    extras: bool = True,
) -> CommandResult:
    """Run a falsification search for Lemma 2.2 ("22") or Lemma 4.1 ("41")."""
    started = time.perf_counter()
    search_config = SearchConfig.from_pinch_config(config, samples=samples, refinements=refinements)

    if lemma == "22":
        report = lemma22_search(eps, search_config, ablate_upper_bound=ablate_upper_bound)
    elif lemma == "41":
        report = lemma41_search(s, eps, search_config)
    else:
        raise DomainError(f"unknown lemma {lemma!r}; expected '22' or '41'")

    payload: dict[str, Any] = {
        "status": "counterexample" if report.counterexample else "verified",
        "report": report.to_json(),
        "empirical_delta": empirical_delta(report),
    }

    if extras:
        payload["extras"] = _verify_extras(
            lemma,
            report,
            eps=eps,
            s=s,
            seed=search_config.seed,
            ablate_upper_bound=ablate_upper_bound,
            domination_samples=domination_samples,
            pinching_samples=pinching_samples,
        )

    arguments = {
        "lemma": lemma,
        "eps": eps,
        "s": s if lemma == "41" else None,
        "samples": search_config.samples,
        "refinements": search_config.refinements,
        "ablate_upper_bound": ablate_upper_bound,
        "domination_samples": domination_samples if extras else None,
        "pinching_samples": pinching_samples if extras else None,
    }
    envelope = _envelope("verify", config, arguments, payload, started)
    if report.counterexample:
        LOGGER.warning("Minimum margin %.6e is below -%.0e", report.margin, search_config.strict_slack)
        return CommandResult(envelope, EXIT_COUNTEREXAMPLE)
    LOGGER.info("Minimum margin %.6e: no counterexample found", report.margin)
    return CommandResult(envelope)


def _verify_extras(
    lemma: str,
    report: Any,
    *,
    eps: float,
    s: float,
    seed: int,
    ablate_upper_bound: bool,
    domination_samples: int,
    pinching_samples: int,
) -> dict[str, Any]:
    extras: dict[str, Any] = {}
    try:
        if lemma == "41":
            extras["domination"] = lemma41_domination(s, eps, domination_samples, seed).to_json()
        elif not ablate_upper_bound:
            extras["domination"] = lemma22_case3_domination(eps, domination_samples, seed).to_json()
    except EmptyRegionError as e:
        LOGGER.warning("Domination check skipped: %s", e)
        extras["domination"] = {"skipped": str(e)}

    if lemma == "22":
        try:
            extras["chain_bounds"] = lemma22_case_bounds(
                report.argmin, eps, upper_bound=report.upper_bound
            ).to_json()
        except PreconditionError as e:
            LOGGER.warning("Proof-chain audit skipped: %s", e)
            extras["chain_bounds"] = {"skipped": str(e)}
        if not ablate_upper_bound:
            extras["pinching"] = pinching_invariance_experiment(eps, pinching_samples, seed).to_json()
    return extras


# ------------------------------------------------------------------
# flow
# ------------------------------------------------------------------

def fixture_profile(name: str) -> EigenProfile:
    return blocks_to_profile(tensor_to_blocks(model_space(name)))


def _equal_traces(profile: EigenProfile, target: float | None = None) -> bool:
    if abs(profile.trace_a - profile.trace_c) > 1e-9:
        return False
    return target is None or abs(profile.trace_a - target) <= 1e-9


def cmd_flow(
    config: PinchConfig,
    *,
    fixture: str | None = None,
    a: Sequence[float] | None = None,
    c: Sequence[float] | None = None,
    t_end: float | None = None,
    dt: float | None = None,
    csv_path: Path | None = None,
) -> CommandResult:
    started = time.perf_counter()
    if fixture is not None:
        profile = fixture_profile(fixture)
    elif a is not None and c is not None:
        profile = EigenProfile.from_values(a, c)
    else:
        raise DomainError("flow needs a fixture name or both --a and --c triples")
    t_end = config.flow_t_end if t_end is None else t_end
    dt = config.flow_dt if dt is None else dt

    trajectory = integrate(FlowState(profile), t_end, dt)
    checks: dict[str, Any] = {
        "trace_identity_residual": trace_identity_residual(profile, t_end, dt),
        "step_halving_error": step_halving_error(profile, t_end, dt),
    }
    if _equal_traces(profile, target=2.0):
        residual = self_similar_residual(profile, t_end, dt)
        checks["self_similar_residual"] = residual
        checks["self_similar_ok"] = residual < SELF_SIMILAR_TOL
        checks["scalar_evolution_residual"] = scalar_evolution_check(profile, t_end, dt)
    if _equal_traces(profile):
        checks["boundary_identity_residual"] = boundary_identity_residual(profile)

    if csv_path is not None:
        trajectory.to_csv(csv_path)

    payload = {
        "status": "ok",
        "initial": profile.to_json(),
        "blow_up_time": _finite_or_none(blow_up_time(profile)),
        "trajectory": trajectory.summary(),
        "checks": checks,
    }
    arguments = {
        "fixture": fixture,
        "a": list(profile.a),
        "c": list(profile.c),
        "t_end": t_end,
        "dt": dt,
        "csv": str(csv_path) if csv_path is not None else None,
    }
    envelope = _envelope("flow", config, arguments, payload, started)
    return CommandResult(envelope, attachments={"trajectory.csv": lambda path: trajectory.to_csv(Path(path))})


# ------------------------------------------------------------------
# berger / model
# ------------------------------------------------------------------

def load_tensor(path: Path) -> CurvatureTensor4:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DomainError(f"cannot read tensor file {path}: {e}") from e
    tensor = CurvatureTensor4.from_json(text)
    tensor.validate()
    return tensor


def cmd_berger(
    config: PinchConfig,
    *,
    tensor_path: Path | None = None,
    fixture: str | None = None,
    method: FrameMethod = "eigen",
    starts: int | None = None,
) -> CommandResult:
    started = time.perf_counter()
    if tensor_path is not None:
        tensor = load_tensor(tensor_path)
    elif fixture is not None:
        tensor = model_space(fixture)
    else:
        raise DomainError("berger needs a tensor JSON file or --fixture")

    frame, data = find_berger_frame(
        tensor,
        method=method,
        starts=config.frame_starts if starts is None else starts,
        seed=config.seed,
        threads=config.threads,
    )
    properties = verify_berger_properties(tensor, frame)
    profile = blocks_to_profile(tensor_to_blocks(tensor))
    degenerate = spectrum_degenerate(profile)
    if degenerate:
        LOGGER.info("Repeated eigenvalue in A or C: the Berger frame is not unique")
    if not properties.all_hold:
        LOGGER.warning("Berger frame properties failed: %s", [c.name for c in properties.checks if not c.holds])

    payload = {
        "status": "ok",
        "frame": frame.to_json(),
        "berger_data": data.to_json(),
        "profile": profile.to_json(),
        "properties": properties.to_json(),
        "all_properties_hold": properties.all_hold,
        "degenerate": degenerate,
    }
    arguments = {
        "tensor": str(tensor_path) if tensor_path is not None else None,
        "fixture": fixture,
        "method": method,
    }
    envelope = _envelope("berger", config, arguments, payload, started)
    return CommandResult(envelope)


def cmd_model(config: PinchConfig, *, name: str) -> CommandResult:
    started = time.perf_counter()
    tensor = model_space(name)
    blocks = tensor_to_blocks(tensor)
    profile = blocks_to_profile(blocks)
    k_min, k_max = min_max_sectional(blocks)
    payload = {
        "status": "ok",
        "name": name,
        "tensor": tensor.to_json(),
        "blocks": {"A": blocks.A.tolist(), "B": blocks.B.tolist(), "C": blocks.C.tolist()},
        "profile": profile.to_json(),
        "berger_data": profile_to_berger(profile).to_json(),
        "scalar_curvature": scalar_curvature(tensor),
        "sectional_range": [k_min, k_max],
        "degenerate": spectrum_degenerate(profile),
    }
    envelope = _envelope("model", config, {"name": name}, payload, started)
    return CommandResult(envelope)
