"""Seeded, parallel falsification searches for the pinching lemmas.

Protocol: split the sample budget into batches, each drawing from its own
``SeedSequence`` child; keep the lowest margins of every batch per case;
reduce by ``(margin, global index)``; polish the best starts with a
Nelder-Mead simplex in the unit-cube chart of the region. The outcome does
not depend on the thread count.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from scipy.optimize import minimize

from einstein_pinch.constants import STRICT_SLACK
from einstein_pinch.curvature.berger_frame import BergerData
from einstein_pinch.utils.config import PinchConfig

from .pinch_lab import (
    M1,
    CaseMinimum,
    LemmaReport,
    invariant_from_components,
    is_case1,
    lemma22_bounds,
    lemma22_case3_polynomial,
    lemma22_proof_case,
    lemma41_bounds,
    lemma41_lower_bound,
)
from .sampling import BergerBatch, Lemma22Region, Lemma41Region, SearchRegion, sample_case2

LOGGER = logging.getLogger("einstein-pinch")

CASES = ("case1", "case2")
_OFF_CASE_PENALTY = 1.0


@dataclass(frozen=True)
class SearchConfig:
    samples: int = 1_000_000
    refinements: int = 100
    batch_size: int = 100_000
    seed: int = 0
    threads: int = 1
    strict_slack: float = STRICT_SLACK

    @classmethod
    def from_pinch_config(cls, config: PinchConfig, **overrides: Any) -> SearchConfig:
        base = cls(
            samples=config.search_samples,
            refinements=config.search_refinements,
            batch_size=config.batch_size,
            seed=config.seed,
            threads=config.threads,
            strict_slack=config.strict_slack,
        )
        return replace(base, **{key: value for key, value in overrides.items() if value is not None})


@dataclass(frozen=True)
class _Candidates:
    margins: np.ndarray
    indices: np.ndarray
    points: BergerBatch


def _margins(region: SearchRegion, batch: BergerBatch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(I, bound, case1 mask) for every row of ``batch``."""
    values = invariant_from_components(batch.m, batch.k13, batch.k14, batch.x, batch.y)
    case1 = is_case1(batch.k13, batch.y)
    bounds = lemma22_bounds(region.eps) if region.lemma == "L22" else lemma41_bounds(region.eps)
    return values, np.where(case1, bounds["case1"], bounds["case2"]), case1


def _lowest(margins: np.ndarray, indices: np.ndarray, points: BergerBatch, keep: int) -> _Candidates:
    order = np.lexsort((indices, margins))[:keep]
    return _Candidates(margins[order], indices[order], points.take(order))


def _run_batch(
    region: SearchRegion,
    seed_sequence: np.random.SeedSequence,
    size: int,
    offset: int,
    keep: int,
) -> dict[str, _Candidates]:
    rng = np.random.default_rng(seed_sequence)
    batch = region.sample(rng, size)
    values, bounds, case1 = _margins(region, batch)
    margins = values - bounds
    indices = offset + np.arange(size)
    result = {}
    for name, mask in (("case1", case1), ("case2", ~case1)):
        selected = np.flatnonzero(mask)
        result[name] = _lowest(margins[selected], indices[selected], batch.take(selected), keep)
    LOGGER.debug("Batch at offset %d: %d samples, %d in case1", offset, size, int(np.count_nonzero(case1)))
    return result


def _merge(parts: list[_Candidates], keep: int) -> _Candidates:
    margins = np.concatenate([part.margins for part in parts])
    indices = np.concatenate([part.indices for part in parts])
    points = BergerBatch.concatenate([part.points for part in parts])
    return _lowest(margins, indices, points, keep)


def _case_objective(region: SearchRegion, case_name: str) -> Callable[[np.ndarray], float]:
    bounds = lemma22_bounds(region.eps) if region.lemma == "L22" else lemma41_bounds(region.eps)
    bound = bounds[case_name]

    def objective(t: np.ndarray) -> float:
        d = region.from_unit(t)
        value = float(invariant_from_components(d.m, d.k13, d.k14, d.x, d.y))
        in_case = bool(is_case1(d.k13, d.y)) == (case_name == "case1")
        if in_case:
            return value - bound
        return value - bound + _OFF_CASE_PENALTY + abs(abs(d.y) - d.k13)

    return objective


def _refine(region: SearchRegion, case_name: str, start: BergerData) -> tuple[float, BergerData]:
    objective = _case_objective(region, case_name)
    result = minimize(
        objective,
        region.to_unit(start),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
    )
    refined = region.from_unit(result.x)
    if bool(is_case1(refined.k13, refined.y)) != (case_name == "case1"):
        return math.inf, refined
    return float(result.fun), refined


def run_search(region: SearchRegion, config: SearchConfig) -> LemmaReport:
    """Minimum margin per case over ``config.samples`` points plus simplex refinements."""
    n_batches = max(1, math.ceil(config.samples / config.batch_size))
    children = np.random.SeedSequence(config.seed).spawn(n_batches)
    sizes = [min(config.batch_size, config.samples - i * config.batch_size) for i in range(n_batches)]
    keep = max(config.refinements, 1)
    LOGGER.info(
        "Searching %s region %s: %d samples in %d batches, %d refinements per case",
        region.lemma,
        region.describe(),
        config.samples,
        n_batches,
        config.refinements,
    )

    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        batch_results = list(
            executor.map(
                lambda i: _run_batch(region, children[i], sizes[i], i * config.batch_size, keep),
                range(n_batches),
            )
        )

    case_minima: dict[str, CaseMinimum] = {}
    bounds = lemma22_bounds(region.eps) if region.lemma == "L22" else lemma41_bounds(region.eps)
    refinements_run = 0
    for case_name in CASES:
        merged = _merge([result[case_name] for result in batch_results], keep)
        if merged.margins.size == 0:
            LOGGER.info("No samples fell in %s of the %s region", case_name, region.lemma)
            continue
        starts = [merged.points.row(i) for i in range(min(config.refinements, merged.margins.size))]
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            refined = list(executor.map(lambda start: _refine(region, case_name, start), starts))
        refinements_run += len(refined)

        best_margin = float(merged.margins[0])
        best_point = merged.points.row(0)
        best_index = int(merged.indices[0])
        for position, (margin, point) in enumerate(refined):
            index = int(merged.indices[position])
            if math.isinf(margin):
                continue
            if not region.contains(point):
                LOGGER.warning("Refined point left the %s region; discarded: %s", region.lemma, point.to_json())
                continue
            if (margin, index) < (best_margin, best_index):
                best_margin, best_point, best_index = margin, point, index

        value = float(invariant_from_components(best_point.m, best_point.k13, best_point.k14, best_point.x, best_point.y))
        case_minima[case_name] = CaseMinimum(
            margin=value - bounds[case_name],
            I_value=value,
            bound=bounds[case_name],
            argmin=best_point,
            index=best_index,
        )
        LOGGER.info("%s %s: minimum margin %.6e at %s", region.lemma, case_name, case_minima[case_name].margin, best_point.to_json())

    if not case_minima:
        raise RuntimeError(f"{region.lemma} search produced no samples")

    winner_name = min(case_minima, key=lambda name: (case_minima[name].margin, CASES.index(name)))
    winner = case_minima[winner_name]
    proof_case = lemma22_proof_case(winner.argmin) if region.lemma == "L22" and winner_name == "case2" else None
    report = LemmaReport(
        lemma=region.lemma,
        case_label=winner_name,  # type: ignore[arg-type]
        proof_case=proof_case,
        I_value=winner.I_value,
        bound=winner.bound,
        margin=winner.margin,
        argmin=winner.argmin,
        samples=config.samples,
        refinements=refinements_run,
        eps=region.eps,
        s=getattr(region, "s", None),
        upper_bound=getattr(region, "upper_bound", None),
        case_minima=case_minima,
        strict_slack=config.strict_slack,
    )
    if report.counterexample:
        LOGGER.warning("Counterexample in %s region: margin %.6e at %s", region.lemma, report.margin, report.argmin.to_json())
    return report


def lemma22_search(eps: float, config: SearchConfig, *, ablate_upper_bound: bool = False) -> LemmaReport:
    """Minimum Lemma 2.2 margin; ``ablate_upper_bound`` relaxes K14 <= sqrt(3)/2 to K14 <= 2."""
    region = Lemma22Region(eps, upper_bound=2.0 if ablate_upper_bound else M1)
    return run_search(region, config)


def lemma41_search(s: float, eps: float, config: SearchConfig) -> LemmaReport:
    return run_search(Lemma41Region(s, eps), config)


# ------------------------------------------------------------------
# Lower-bound domination
# ------------------------------------------------------------------

@dataclass(frozen=True)
class DominationReport:
    name: str
    samples: int
    min_slack: float
    argmin: BergerData

    @property
    def holds(self) -> bool:
        return self.min_slack >= -STRICT_SLACK

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "samples": self.samples,
            "min_slack": self.min_slack,
            "holds": self.holds,
            "argmin": self.argmin.to_json(),
        }


def lemma41_domination(s: float, eps: float, samples: int, seed: int) -> DominationReport:
    """min of (3/8) I - lower_bound(m, k13 + s m, s) over second-alternative points."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    batch = sample_case2(Lemma41Region(s, eps), rng, samples)
    scaled = 0.375 * invariant_from_components(batch.m, batch.k13, batch.k14, batch.x, batch.y)
    slack = scaled - lemma41_lower_bound(batch.m, batch.k13 + s * batch.m, s)
    worst = int(np.argmin(slack))
    return DominationReport("(3/8)I >= Lemma 4.1 quadratic", samples, float(slack[worst]), batch.row(worst))


def lemma22_case3_domination(eps: float, samples: int, seed: int) -> DominationReport:
    """min of (3/8) I - P(m, sqrt(3)/2) over proof Case-3 points."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    batch = sample_case2(Lemma22Region(eps), rng, samples, case3_only=True)
    scaled = 0.375 * invariant_from_components(batch.m, batch.k13, batch.k14, batch.x, batch.y)
    slack = scaled - lemma22_case3_polynomial(batch.m, M1)
    worst = int(np.argmin(slack))
    return DominationReport("(3/8)I >= Case-3 polynomial", samples, float(slack[worst]), batch.row(worst))


def empirical_delta(report: LemmaReport) -> float:
    """Smallest sampled I / R over every case; an admissible pinching rate must stay below it.

    Search points are Einstein-normalized, so R = 4 throughout.
    """
    values = [minimum.I_value for minimum in report.case_minima.values()] or [report.I_value]
    return min(values) / 4.0
