from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from einstein_pinch.constants import FIXTURE_NAMES
from einstein_pinch.curvature.curvature_core import (
    CurvatureTensor4,
    OperatorBlocks,
    Plane2,
    blocks_to_profile,
    blocks_to_tensor,
    brute_force_extremes,
    complement,
    einstein_defect,
    min_max_sectional,
    model_space,
    plane_to_two_form,
    random_einstein_blocks,
    random_plane,
    random_planes,
    require_einstein,
    ricci_tensor,
    scalar_curvature,
    sectional_curvature,
    sectional_curvature_of_vectors,
    tensor_from_json,
    tensor_to_blocks,
    tensor_to_json,
    two_form_to_plane,
)
from einstein_pinch.errors import DomainError, InvalidTensorError, NotEinsteinError

EXPECTED_PROFILES = {
    "S4": ((2 / 3, 2 / 3, 2 / 3), (2 / 3, 2 / 3, 2 / 3)),
    "RP4": ((2 / 3, 2 / 3, 2 / 3), (2 / 3, 2 / 3, 2 / 3)),
    "CP2": ((0.0, 0.0, 2.0), (2 / 3, 2 / 3, 2 / 3)),
    "S2xS2": ((0.0, 0.0, 2.0), (0.0, 0.0, 2.0)),
}
EXPECTED_RANGES = {"S4": (1 / 3, 1 / 3), "RP4": (1 / 3, 1 / 3), "CP2": (1 / 6, 2 / 3), "S2xS2": (0.0, 1.0)}


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_model_spaces_are_einstein_normalized(name):
    tensor = model_space(name)
    tensor.validate()
    np.testing.assert_allclose(ricci_tensor(tensor), np.eye(4), atol=1e-12)
    assert scalar_curvature(tensor) == pytest.approx(4.0)
    assert einstein_defect(tensor) == pytest.approx((0.0, 0.0), abs=1e-12)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_model_space_profiles(name):
    profile = blocks_to_profile(tensor_to_blocks(model_space(name)))
    a, c = EXPECTED_PROFILES[name]
    np.testing.assert_allclose(profile.a, a, atol=1e-12)
    np.testing.assert_allclose(profile.c, c, atol=1e-12)
    assert profile.scalar_curvature == pytest.approx(4.0)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_min_max_sectional_of_model_spaces(name):
    k_min, k_max = min_max_sectional(tensor_to_blocks(model_space(name)))
    assert (k_min, k_max) == pytest.approx(EXPECTED_RANGES[name], abs=1e-12)


def test_unknown_fixture_is_a_domain_error():
    with pytest.raises(DomainError, match="unknown model space"):
        model_space("T4")


def test_blocks_round_trip_through_tensor(rng):
    for _ in range(10):
        blocks = random_einstein_blocks(rng)
        b = 0.1 * rng.standard_normal((3, 3))
        blocks = OperatorBlocks(blocks.A, b, blocks.C)
        recovered = tensor_to_blocks(blocks_to_tensor(blocks))
        np.testing.assert_allclose(recovered.A, blocks.A, atol=1e-12)
        np.testing.assert_allclose(recovered.B, blocks.B, atol=1e-12)
        np.testing.assert_allclose(recovered.C, blocks.C, atol=1e-12)


def test_blocks_to_tensor_rejects_unequal_traces():
    blocks = OperatorBlocks(np.eye(3), np.zeros((3, 3)), 2.0 * np.eye(3))
    with pytest.raises(InvalidTensorError, match="first Bianchi"):
        blocks_to_tensor(blocks)


def test_asymmetric_components_are_rejected(rng):
    with pytest.raises(InvalidTensorError):
        tensor_to_blocks(CurvatureTensor4(rng.standard_normal((4, 4, 4, 4))))


def test_wrong_shape_is_rejected():
    with pytest.raises(InvalidTensorError, match="4x4x4x4"):
        CurvatureTensor4(np.zeros((3, 3, 3, 3)))


def test_non_symmetric_block_is_rejected():
    a = np.eye(3)
    a[0, 1] = 1.0
    with pytest.raises(DomainError, match="not symmetric"):
        OperatorBlocks(a, np.zeros((3, 3)), np.eye(3))


def test_scaled_fixture_is_not_einstein():
    tensor = CurvatureTensor4(1.1 * model_space("CP2").comp)
    with pytest.raises(NotEinsteinError) as info:
        require_einstein(tensor)
    assert info.value.ricci_defect == pytest.approx(0.1)
    assert info.value.b_norm == pytest.approx(0.0, abs=1e-12)


def test_profile_needs_vanishing_off_diagonal_block():
    blocks = OperatorBlocks(np.eye(3), 0.2 * np.eye(3), np.eye(3))
    with pytest.raises(NotEinsteinError):
        blocks_to_profile(blocks)


def test_block_formula_matches_tensor_contraction(rng):
    blocks = random_einstein_blocks(rng)
    tensor = blocks_to_tensor(blocks)
    for _ in range(20):
        u, v = rng.standard_normal((2, 4))
        plane = Plane2.from_vectors(u, v)
        assert sectional_curvature(blocks, plane) == pytest.approx(
            sectional_curvature_of_vectors(tensor, u, v), abs=1e-12
        )


def test_coordinate_planes_read_tensor_components():
    tensor = model_space("CP2")
    blocks = tensor_to_blocks(tensor)
    basis = np.eye(4)
    for i in range(4):
        for j in range(i + 1, 4):
            plane = Plane2.from_vectors(basis[i], basis[j])
            assert sectional_curvature(blocks, plane) == pytest.approx(tensor.sectional(i, j), abs=1e-12)


def test_non_unit_plane_is_rejected():
    blocks = tensor_to_blocks(model_space("S4"))
    with pytest.raises(DomainError, match="unit vector"):
        sectional_curvature(blocks, Plane2(np.array([1.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])))


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_complementary_planes_share_curvature_on_einstein_tensors(seed):
    rng = np.random.default_rng(seed)
    blocks = random_einstein_blocks(rng)
    plane = random_plane(rng)
    assert sectional_curvature(blocks, plane) == pytest.approx(
        sectional_curvature(blocks, complement(plane)), abs=1e-12
    )


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_sectional_curvature_stays_within_eigenvalue_bounds(seed):
    rng = np.random.default_rng(seed)
    blocks = random_einstein_blocks(rng)
    k_min, k_max = min_max_sectional(blocks)
    value = sectional_curvature(blocks, random_plane(rng))
    assert k_min - 1e-12 <= value <= k_max + 1e-12


def test_two_form_realization_is_decomposable_and_unit(rng):
    plane = random_plane(rng)
    form = plane_to_two_form(plane)
    assert np.allclose(form, -form.T)
    # decomposable: the Pfaffian vanishes
    pfaffian = form[0, 1] * form[2, 3] - form[0, 2] * form[1, 3] + form[0, 3] * form[1, 2]
    assert pfaffian == pytest.approx(0.0, abs=1e-12)
    assert np.sum(np.triu(form, 1) ** 2) == pytest.approx(1.0)
    back = two_form_to_plane(form)
    np.testing.assert_allclose(back.p, plane.p, atol=1e-12)
    np.testing.assert_allclose(back.q, plane.q, atol=1e-12)


def test_complement_is_orthogonal_plane(rng):
    plane = random_plane(rng)
    form = plane_to_two_form(plane)
    other = plane_to_two_form(complement(plane))
    assert np.sum(form * other) == pytest.approx(0.0, abs=1e-12)


def test_tensor_json_round_trip():
    tensor = model_space("S2xS2")
    restored = tensor_from_json(tensor_to_json(tensor))
    np.testing.assert_array_equal(restored.comp, tensor.comp)


def test_tensor_json_requires_comp():
    with pytest.raises(InvalidTensorError, match="'comp'"):
        tensor_from_json('{"components": []}')


def test_brute_force_oracle_agrees_with_eigenvalue_formula(rng):
    for _ in range(5):
        blocks = random_einstein_blocks(rng)
        k_min, k_max = min_max_sectional(blocks)
        low, high = brute_force_extremes(blocks, 20_000, rng)
        assert low == pytest.approx(k_min, abs=1e-3)
        assert high == pytest.approx(k_max, abs=1e-3)
        assert low >= k_min - 1e-9
        assert high <= k_max + 1e-9


@pytest.mark.slow
def test_brute_force_oracle_acceptance(rng):
    for _ in range(100):
        blocks = random_einstein_blocks(rng)
        k_min, k_max = min_max_sectional(blocks)
        low, high = brute_force_extremes(blocks, 100_000, rng)
        assert abs(low - k_min) <= 1e-3
        assert abs(high - k_max) <= 1e-3
        assert low >= k_min - 1e-9
        assert high <= k_max + 1e-9


def test_random_planes_are_unit_and_within_bounds(rng):
    blocks = random_einstein_blocks(rng)
    k_min, k_max = min_max_sectional(blocks)
    planes = random_planes(rng, 64)
    assert len(planes) == 64
    for plane in planes:
        assert np.linalg.norm(plane.p) == pytest.approx(1.0)
        assert np.linalg.norm(plane.q) == pytest.approx(1.0)
        assert k_min - 1e-12 <= sectional_curvature(blocks, plane) <= k_max + 1e-12
