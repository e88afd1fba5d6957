from __future__ import annotations

import numpy as np
import pytest
from conftest import feasible_berger_data, random_berger_data
from hypothesis import given

from einstein_pinch.curvature.berger_frame import (
    BergerData,
    FrameRotation,
    berger_data_in_frame,
    berger_to_profile,
    berger_to_tensor,
    find_berger_frame,
    mixed_component_residual,
    profile_to_berger,
    rotate_tensor,
    spectrum_degenerate,
    verify_berger_properties,
)
from einstein_pinch.curvature.curvature_core import (
    CurvatureTensor4,
    OperatorBlocks,
    blocks_to_profile,
    blocks_to_tensor,
    model_space,
    tensor_to_blocks,
)
from einstein_pinch.errors import DomainError, InfeasibleDataError, NotEinsteinError

CP2_DATA = (1 / 6, 1 / 6, 2 / 3, 1 / 6, 1 / 6)


def _assert_data_close(actual: BergerData, expected: BergerData, tol: float) -> None:
    np.testing.assert_allclose(actual.as_array(), expected.as_array(), atol=tol)


def test_cp2_berger_data():
    frame, data = find_berger_frame(model_space("CP2"))
    np.testing.assert_allclose(data.as_array(), CP2_DATA, atol=1e-6)
    assert verify_berger_properties(model_space("CP2"), frame).all_hold


def test_constant_curvature_is_degenerate():
    profile = blocks_to_profile(tensor_to_blocks(model_space("S4")))
    assert spectrum_degenerate(profile)
    _, data = find_berger_frame(model_space("S4"))
    np.testing.assert_allclose(data.as_array(), (1 / 3, 1 / 3, 1 / 3, 0.0, 0.0), atol=1e-12)


def test_generic_spectrum_is_not_degenerate(rng):
    profile = berger_to_profile(random_berger_data(rng))
    assert not spectrum_degenerate(profile)


def test_standard_frame_reads_back_the_data(rng):
    data = random_berger_data(rng)
    tensor = berger_to_tensor(data)
    _assert_data_close(berger_data_in_frame(tensor, FrameRotation.identity()), data, 1e-12)
    assert mixed_component_residual(tensor) < 1e-12
    assert verify_berger_properties(tensor, FrameRotation.identity()).all_hold


def test_rotated_tensor_frame_recovery(rng):
    for _ in range(25):
        data = random_berger_data(rng)
        tensor = rotate_tensor(berger_to_tensor(data), FrameRotation.random(rng))
        frame, recovered = find_berger_frame(tensor)
        _assert_data_close(recovered, data, 1e-6)
        report = verify_berger_properties(tensor, frame)
        assert report.all_hold, report.to_json()
        assert max(check.residual for check in report.checks) <= 1e-8


def test_multistart_frame_search(rng):
    data = random_berger_data(rng)
    tensor = rotate_tensor(berger_to_tensor(data), FrameRotation.random(rng))
    frame, recovered = find_berger_frame(tensor, method="multistart", starts=50, seed=3)
    _assert_data_close(recovered, data, 1e-6)
    assert verify_berger_properties(tensor, frame).all_hold


def test_multistart_is_deterministic_across_threads(rng):
    tensor = rotate_tensor(berger_to_tensor(random_berger_data(rng)), FrameRotation.random(rng))
    single, _ = find_berger_frame(tensor, method="multistart", starts=12, seed=5, threads=1)
    pooled, _ = find_berger_frame(tensor, method="multistart", starts=12, seed=5, threads=4)
    np.testing.assert_array_equal(single.Q, pooled.Q)


def test_unknown_frame_method():
    with pytest.raises(DomainError, match="unknown frame method"):
        find_berger_frame(model_space("CP2"), method="gradient")  # type: ignore[arg-type]


def test_non_einstein_tensor_is_rejected():
    blocks = OperatorBlocks(np.diag([0.0, 0.5, 1.5]), 0.1 * np.eye(3), np.diag([0.5, 0.5, 1.0]))
    with pytest.raises(NotEinsteinError) as info:
        find_berger_frame(blocks_to_tensor(blocks))
    assert info.value.b_norm > 0.1


def test_frame_rotation_validation():
    with pytest.raises(DomainError, match="orthonormal"):
        FrameRotation(2.0 * np.eye(4))
    with pytest.raises(DomainError, match="oriented"):
        FrameRotation(np.diag([-1.0, 1.0, 1.0, 1.0]))


def test_infeasible_data_names_the_constraint():
    data = BergerData(m=0.2, k13=0.3, k14=0.5, x=0.5, y=0.0)
    with pytest.raises(InfeasibleDataError) as info:
        data.check_feasible()
    assert info.value.constraint in data.constraint_slacks()
    assert not data.is_feasible()


def test_berger_data_json_keys():
    data = BergerData(*CP2_DATA)
    assert set(data.to_json()) == {"K12", "K13", "K14", "x", "y"}
    assert BergerData.from_json(data.to_json()) == data


def test_malformed_berger_json():
    with pytest.raises(DomainError, match="malformed"):
        BergerData.from_json({"K12": 0.1})


@given(feasible_berger_data())
def test_profile_and_berger_data_are_inverse(data):
    recovered = profile_to_berger(berger_to_profile(data))
    _assert_data_close(recovered, data, 1e-12)


@given(feasible_berger_data())
def test_profile_traces_are_two(data):
    profile = berger_to_profile(data)
    assert profile.trace_a == pytest.approx(2.0)
    assert profile.trace_c == pytest.approx(2.0)


@given(feasible_berger_data())
def test_feasible_data_gives_einstein_tensor(data):
    tensor = berger_to_tensor(data)
    assert isinstance(tensor, CurvatureTensor4)
    tensor.validate()
    np.testing.assert_allclose(np.einsum("ikjk->ij", tensor.comp), np.eye(4), atol=1e-12)


@pytest.mark.slow
def test_frame_recovery_acceptance():
    rng = np.random.default_rng(8)
    for _ in range(200):
        data = random_berger_data(rng)
        tensor = rotate_tensor(berger_to_tensor(data), FrameRotation.random(rng))
        frame, recovered = find_berger_frame(tensor)
        _assert_data_close(recovered, data, 1e-6)
        assert verify_berger_properties(tensor, frame).all_hold
