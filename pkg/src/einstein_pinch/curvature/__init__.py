"""Pointwise curvature algebra of four-dimensional Einstein tensors."""

from .berger_frame import (
    BergerData,
    BergerPropertyReport,
    FrameRotation,
    berger_to_profile,
    berger_to_tensor,
    find_berger_frame,
    profile_to_berger,
    rotate_tensor,
    spectrum_degenerate,
    verify_berger_properties,
)
from .curvature_core import (
    CurvatureTensor4,
    EigenProfile,
    OperatorBlocks,
    Plane2,
    blocks_to_profile,
    blocks_to_tensor,
    brute_force_extremes,
    einstein_defect,
    min_max_sectional,
    model_space,
    random_einstein_blocks,
    random_plane,
    sectional_curvature,
    tensor_to_blocks,
)

__all__ = [
    "BergerData",
    "BergerPropertyReport",
    "CurvatureTensor4",
    "EigenProfile",
    "FrameRotation",
    "OperatorBlocks",
    "Plane2",
    "berger_to_profile",
    "berger_to_tensor",
    "blocks_to_profile",
    "blocks_to_tensor",
    "brute_force_extremes",
    "einstein_defect",
    "find_berger_frame",
    "min_max_sectional",
    "model_space",
    "profile_to_berger",
    "random_einstein_blocks",
    "random_plane",
    "rotate_tensor",
    "sectional_curvature",
    "spectrum_degenerate",
    "tensor_to_blocks",
    "verify_berger_properties",
]
