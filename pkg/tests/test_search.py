from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from einstein_pinch.errors import EmptyRegionError, PreconditionError
from einstein_pinch.pinching.pinch_lab import M1, is_case1, lemma22_proof_case
from einstein_pinch.pinching.sampling import Lemma22Region, Lemma41Region, sample_case2
from einstein_pinch.pinching.search import (
    SearchConfig,
    empirical_delta,
    lemma22_search,
    lemma41_domination,
    lemma41_search,
)
from einstein_pinch.utils.config import PinchConfig


def test_lemma22_search_finds_no_counterexample(quick_search):
    report = lemma22_search(0.05, quick_search)
    assert not report.counterexample
    assert report.margin >= -quick_search.strict_slack
    assert "case1" in report.case_minima
    assert report.upper_bound == pytest.approx(M1)
    assert report.samples == quick_search.samples
    assert Lemma22Region(0.05).contains(report.argmin)


def test_search_is_independent_of_thread_count(quick_search):
    single = lemma22_search(0.05, quick_search)
    threaded = lemma22_search(0.05, replace(quick_search, threads=2))
    assert single.to_json() == threaded.to_json()


def test_lemma41_search_passes(quick_search):
    report = lemma41_search(0.5, 0.02, quick_search)
    assert not report.counterexample
    assert report.s == 0.5
    assert report.proof_case is None
    assert Lemma41Region(0.5, 0.02).contains(report.argmin)


def test_lemma22_eps_outside_range_is_a_precondition_violation():
    with pytest.raises(PreconditionError) as excinfo:
        Lemma22Region(0.5)
    assert excinfo.value.constraint == "eps_range"


def test_lemma41_preconditions():
    with pytest.raises(PreconditionError) as excinfo:
        Lemma41Region(-1.0, 0.05)
    assert excinfo.value.constraint == "s_nonnegative"
    with pytest.raises(PreconditionError) as excinfo:
        Lemma41Region(0.0, 0.2)
    assert excinfo.value.constraint == "eps_range"


def test_lemma41_empty_region():
    with pytest.raises(EmptyRegionError) as excinfo:
        Lemma41Region(100.0, 0.05)
    assert excinfo.value.constraint == "region_nonempty"


def test_ablation_relaxes_upper_bound(quick_search):
    report = lemma22_search(0.05, quick_search, ablate_upper_bound=True)
    assert report.upper_bound == 2.0
    assert report.to_json()["upper_bound"] == 2.0


def test_empirical_delta_is_positive(quick_search):
    report = lemma22_search(0.05, quick_search)
    delta = empirical_delta(report)
    assert delta > 0
    assert delta == pytest.approx(min(c.I_value for c in report.case_minima.values()) / 4.0)


def test_search_config_from_pinch_config():
    config = PinchConfig(seed=11, threads=3, search_samples=500, search_refinements=2, batch_size=100)
    search = SearchConfig.from_pinch_config(config, samples=None, refinements=9)
    assert search.seed == 11
    assert search.threads == 3
    assert search.samples == 500
    assert search.refinements == 9
    assert search.batch_size == 100


@pytest.mark.parametrize("region", [Lemma22Region(0.05), Lemma41Region(0.0, 0.05), Lemma41Region(1.0, 0.02)])
def test_region_samples_lie_in_region(region, rng):
    batch = region.sample(rng, 1_000)
    assert len(batch) == 1_000
    for i in range(0, 1_000, 37):
        assert region.contains(batch.row(i))


def test_unit_chart_round_trips_inside_region(rng):
    region = Lemma22Region(0.05)
    batch = region.sample(rng, 20)
    for i in range(len(batch)):
        point = batch.row(i)
        again = region.from_unit(region.to_unit(point))
        assert again.as_array() == pytest.approx(point.as_array(), abs=1e-12)


@pytest.mark.parametrize("region", [Lemma22Region(0.05), Lemma41Region(0.5, 0.02)])
def test_second_alternative_samples(region, rng):
    batch = sample_case2(region, rng, 500)
    assert not np.any(is_case1(batch.k13, batch.y))
    for i in range(0, 500, 23):
        assert region.contains(batch.row(i))


def test_case3_samples_fall_in_proof_case3(rng):
    batch = sample_case2(Lemma22Region(0.01), rng, 300, case3_only=True)
    assert {lemma22_proof_case(batch.row(i)) for i in range(len(batch))} == {"c3"}


def test_lemma41_domination_holds():
    report = lemma41_domination(0.5, 0.02, 5_000, 0)
    assert report.holds
    assert report.to_json()["samples"] == 5_000


@pytest.mark.slow
@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1])
def test_lemma22_acceptance(eps):
    report = lemma22_search(eps, SearchConfig(samples=1_000_000, refinements=100, threads=4))
    assert not report.counterexample


@pytest.mark.slow
@pytest.mark.parametrize("s", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("eps", [0.01, 0.05])
def test_lemma41_acceptance(s, eps):
    report = lemma41_search(s, eps, SearchConfig(samples=1_000_000, refinements=100, threads=4))
    assert not report.counterexample
