"""Berger normal frames of Einstein curvature tensors.

In a Berger frame the minimal plane is (e1, e2), the maximal plane is
(e1, e4), every mixed component R_ikjk vanishes and the tensor reduces to
five scalars ``(K12, K13, K14, x, y)`` with ``x = -R1234`` and ``y = -R1342``.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares
from scipy.stats import special_ortho_group

from einstein_pinch.constants import FRAME_TOL, ORTHOGONALITY_TOL
from einstein_pinch.errors import DomainError, InfeasibleDataError, NotEinsteinError, SearchFailureError

from .curvature_core import (
    TWO_FORM_BASIS,
    CurvatureTensor4,
    EigenProfile,
    OperatorBlocks,
    blocks_to_profile,
    blocks_to_tensor,
    min_max_sectional,
    require_einstein,
    tensor_to_blocks,
)

LOGGER = logging.getLogger("einstein-pinch")

DEGENERACY_TOL = 1e-8

FrameMethod = Literal["eigen", "multistart"]

# so(4) generators, one per coordinate plane
_ROTATION_GENERATORS = np.array(
    [
        np.eye(4)[:, [i]] @ np.eye(4)[[j], :] - np.eye(4)[:, [j]] @ np.eye(4)[[i], :]
        for i in range(4)
        for j in range(i + 1, 4)
    ]
)


@dataclass(frozen=True, eq=False)
class FrameRotation:
    """Positively oriented orthonormal frame; column ``a`` is the new ``e_a``."""

    Q: np.ndarray

    def __post_init__(self) -> None:
        q = np.array(self.Q, dtype=float)
        if q.shape != (4, 4):
            raise DomainError(f"frame must be 4x4, got shape {q.shape}")
        defect = float(np.max(np.abs(q.T @ q - np.eye(4))))
        if defect > ORTHOGONALITY_TOL:
            raise DomainError(f"frame is not orthonormal (max |Q^T Q - I| = {defect:.3e})")
        if np.linalg.det(q) < 0:
            raise DomainError("frame is not positively oriented (det Q = -1)")
        q.setflags(write=False)
        object.__setattr__(self, "Q", q)

    @classmethod
    def identity(cls) -> FrameRotation:
        return cls(np.eye(4))

    @classmethod
    def random(cls, rng: np.random.Generator) -> FrameRotation:
        """Haar-random element of SO(4)."""
        return cls(special_ortho_group.rvs(4, random_state=rng))

    def to_json(self) -> list[list[float]]:
        return self.Q.tolist()


@dataclass(frozen=True)
class BergerData:
    """The five free scalars of an Einstein tensor in a Berger frame."""

    m: float
    k13: float
    k14: float
    x: float
    y: float

    @property
    def r1234(self) -> float:
        return -self.x

    @property
    def r1342(self) -> float:
        return -self.y

    @property
    def r1423(self) -> float:
        return self.x + self.y

    def constraint_slacks(self) -> dict[str, float]:
        """Slack of every defining constraint; negative means violated."""
        m, k13, k14, x, y = self.m, self.k13, self.k14, self.x, self.y
        return {
            "trace": -abs(m + k13 + k14 - 1.0),
            "order_m_k13": k13 - m,
            "order_k13_k14": k14 - k13,
            "abs_x_minus_y": (k13 - m) - abs(x - y),
            "abs_x_plus_2y": (k14 - k13) - abs(x + 2.0 * y),
            "abs_2x_plus_y": (k14 - m) - abs(2.0 * x + y),
            "a_order_12": (k13 - y) - (m - x),
            "a_order_23": (k14 + x + y) - (k13 - y),
            "c_order_12": (k13 + y) - (m + x),
            "c_order_23": (k14 - x - y) - (k13 + y),
        }

    def check_feasible(self, tol: float = FRAME_TOL) -> None:
        for name, slack in self.constraint_slacks().items():
            if slack < -tol:
                raise InfeasibleDataError(
                    f"Berger data {self.to_json()} violates {name} by {-slack:.3e}",
                    constraint=name,
                )

    def is_feasible(self, tol: float = FRAME_TOL) -> bool:
        return all(slack >= -tol for slack in self.constraint_slacks().values())

    def as_array(self) -> np.ndarray:
        return np.array([self.m, self.k13, self.k14, self.x, self.y])

    def to_json(self) -> dict[str, float]:
        return {"K12": self.m, "K13": self.k13, "K14": self.k14, "x": self.x, "y": self.y}

    @classmethod
    def from_json(cls, payload: dict[str, Any] | str) -> BergerData:
        data = json.loads(payload) if isinstance(payload, str) else payload
        try:
            return cls(
                m=float(data["K12"]),
                k13=float(data["K13"]),
                k14=float(data["K14"]),
                x=float(data["x"]),
                y=float(data["y"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed Berger data: {exc}") from exc


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    holds: bool
    residual: float


@dataclass(frozen=True)
class BergerPropertyReport:
    """Residuals of the four Berger-frame properties for a given frame."""

    min_plane: PropertyCheck
    max_plane: PropertyCheck
    mixed_components: PropertyCheck
    inequalities: PropertyCheck

    @property
    def checks(self) -> tuple[PropertyCheck, ...]:
        return (self.min_plane, self.max_plane, self.mixed_components, self.inequalities)

    @property
    def all_hold(self) -> bool:
        return all(check.holds for check in self.checks)

    def to_json(self) -> list[dict[str, Any]]:
        return [{"name": c.name, "holds": c.holds, "residual": c.residual} for c in self.checks]


# ------------------------------------------------------------------
# Profiles and synthesis
# ------------------------------------------------------------------

def _raw_triples(d: BergerData) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    a = (2.0 * (d.m - d.x), 2.0 * (d.k13 - d.y), 2.0 * (d.k14 + d.x + d.y))
    c = (2.0 * (d.m + d.x), 2.0 * (d.k13 + d.y), 2.0 * (d.k14 - d.x - d.y))
    return a, c


def berger_to_profile(d: BergerData) -> EigenProfile:
    """a = 2(m - x, k13 - y, k14 + x + y), c = 2(m + x, k13 + y, k14 - x - y)."""
    d.check_feasible()
    a, c = _raw_triples(d)
    return EigenProfile.from_values(a, c)


def profile_to_berger(profile: EigenProfile) -> BergerData:
    a, c = profile.a, profile.c
    return BergerData(
        m=(a[0] + c[0]) / 4.0,
        k13=(a[1] + c[1]) / 4.0,
        k14=(a[2] + c[2]) / 4.0,
        x=(c[0] - a[0]) / 4.0,
        y=(c[1] - a[1]) / 4.0,
    )


def berger_to_tensor(d: BergerData) -> CurvatureTensor4:
    """The Einstein tensor whose components in the standard frame are the Berger data ``d``."""
    d.check_feasible()
    a, c = _raw_triples(d)
    return blocks_to_tensor(OperatorBlocks(np.diag(a), np.zeros((3, 3)), np.diag(c)))


# ------------------------------------------------------------------
# Frames
# ------------------------------------------------------------------

def rotate_tensor_comp(comp: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.einsum("ia,jb,kc,ld,ijkl->abcd", q, q, q, q, comp)


def rotate_tensor(t: CurvatureTensor4, frame: FrameRotation) -> CurvatureTensor4:
    return CurvatureTensor4(rotate_tensor_comp(t.comp, frame.Q))


def berger_data_in_frame(t: CurvatureTensor4, frame: FrameRotation) -> BergerData:
    """Read (K12, K13, K14, x, y) off the rotated tensor without checking the frame."""
    r = rotate_tensor(t, frame).comp
    return BergerData(
        m=float(r[0, 1, 0, 1]),
        k13=float(r[0, 2, 0, 2]),
        k14=float(r[0, 3, 0, 3]),
        x=float(-r[0, 1, 2, 3]),
        y=float(-r[0, 2, 3, 1]),
    )


def mixed_component_residual(t: CurvatureTensor4) -> float:
    """max |R_ikjk| over i != j and k outside {i, j}."""
    worst = 0.0
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            for k in range(4):
                if k in (i, j):
                    continue
                worst = max(worst, abs(float(t.comp[i, k, j, k])))
    return worst


def spectrum_degenerate(profile: EigenProfile, tol: float = DEGENERACY_TOL) -> bool:
    """True when A or C has a repeated eigenvalue, so Berger frames are not unique."""
    gaps = np.diff(profile.a).tolist() + np.diff(profile.c).tolist()
    return min(gaps) < tol


def _oriented_eigenvectors(matrix: np.ndarray) -> np.ndarray:
    _, vectors = np.linalg.eigh(matrix)
    if np.linalg.det(vectors) < 0:
        vectors[:, 2] *= -1.0
    return vectors


def _eigen_frame(blocks: OperatorBlocks) -> np.ndarray:
    """Frame whose self-dual and anti-self-dual bases diagonalize A and C in ascending order."""
    u = _oriented_eigenvectors(np.array(blocks.A))
    v = _oriented_eigenvectors(np.array(blocks.C))
    # W_j = e1 ^ e_{j+2} in the target frame
    wedges = [
        0.5
        * (
            np.einsum("a,aij->ij", u[:, col], TWO_FORM_BASIS[:3])
            + np.einsum("a,aij->ij", v[:, col], TWO_FORM_BASIS[3:])
        )
        for col in range(3)
    ]
    # sum_j -W_j^2 = I + 2 e1 e1^T
    gram = -sum(w @ w for w in wedges)
    _, vectors = np.linalg.eigh(gram)
    e1 = vectors[:, -1]
    return np.column_stack([e1] + [-(w @ e1) for w in wedges])


def _operator_diag_residuals(comp: np.ndarray, targets: np.ndarray) -> np.ndarray:
    matrix = 0.25 * np.einsum("ijkl,aij,bkl->ab", comp, TWO_FORM_BASIS, TWO_FORM_BASIS)
    a, c = matrix[:3, :3], matrix[3:, 3:]
    upper = np.triu_indices(3, 1)
    return np.concatenate([np.diag(a) - targets[:3], np.diag(c) - targets[3:], a[upper], c[upper]])


def _frame_residuals(omega: np.ndarray, base: np.ndarray, comp: np.ndarray, targets: np.ndarray) -> np.ndarray:
    q = base @ expm(np.einsum("k,kij->ij", omega, _ROTATION_GENERATORS))
    return _operator_diag_residuals(rotate_tensor_comp(comp, q), targets)


def _multistart_frame(
    t: CurvatureTensor4,
    profile: EigenProfile,
    *,
    starts: int,
    seed: int,
    threads: int,
) -> np.ndarray:
    targets = profile.as_array()
    children = np.random.SeedSequence(seed).spawn(starts)

    def run(index: int) -> tuple[float, int, np.ndarray]:
        base = special_ortho_group.rvs(4, random_state=np.random.default_rng(children[index]))
        result = least_squares(_frame_residuals, np.zeros(6), args=(base, t.comp, targets), xtol=1e-12, ftol=1e-12)
        frame = base @ expm(np.einsum("k,kij->ij", result.x, _ROTATION_GENERATORS))
        return float(np.max(np.abs(result.fun))), index, frame

    with ThreadPoolExecutor(max_workers=threads) as executor:
        outcomes = list(executor.map(run, range(starts)))
    residual, index, frame = min(outcomes, key=lambda item: (item[0], item[1]))
    LOGGER.debug("Multistart frame search: best start %d of %d, residual %.3e", index, starts, residual)
    if residual > FRAME_TOL:
        raise SearchFailureError(
            f"frame search did not converge after {starts} starts (best residual {residual:.3e})",
            best=frame,
            residual=residual,
        )
    return frame


def find_berger_frame(
    t: CurvatureTensor4,
    *,
    method: FrameMethod = "eigen",
    starts: int = 50,
    seed: int = 0,
    threads: int = 1,
) -> tuple[FrameRotation, BergerData]:
    """Locate a Berger frame of an Einstein-normalized tensor.

    ``method="eigen"`` builds the frame from the eigenvectors of A and C;
    ``"multistart"`` runs seeded least-squares descents over SO(4) and is
    also the fallback when the closed form misses tolerance.
    """
    require_einstein(t)
    blocks = tensor_to_blocks(t)
    profile = blocks_to_profile(blocks)
    targets = profile.as_array()

    if method == "eigen":
        q = _eigen_frame(blocks)
        residual = float(np.max(np.abs(_operator_diag_residuals(rotate_tensor_comp(t.comp, q), targets))))
        orthogonality = float(np.max(np.abs(q.T @ q - np.eye(4))))
        if residual > FRAME_TOL or orthogonality > ORTHOGONALITY_TOL or np.linalg.det(q) < 0:
            LOGGER.warning(
                "Closed-form Berger frame missed tolerance (residual %.3e); falling back to multistart search",
                residual,
            )
            q = _multistart_frame(t, profile, starts=starts, seed=seed, threads=threads)
    elif method == "multistart":
        q = _multistart_frame(t, profile, starts=starts, seed=seed, threads=threads)
    else:
        raise DomainError(f"unknown frame method {method!r}; expected 'eigen' or 'multistart'")

    frame = FrameRotation(q)
    data = berger_data_in_frame(t, frame)
    data.check_feasible()
    return frame, data


def verify_berger_properties(
    t: CurvatureTensor4,
    frame: FrameRotation,
    tol: float = FRAME_TOL,
) -> BergerPropertyReport:
    rotated = rotate_tensor(t, frame)
    data = berger_data_in_frame(t, frame)

    try:
        k_min, k_max = min_max_sectional(tensor_to_blocks(t))
        min_residual = abs(data.m - k_min)
        max_residual = abs(data.k14 - k_max)
    except NotEinsteinError:
        LOGGER.warning("Tensor is not Einstein; extremal plane properties cannot be certified")
        min_residual = max_residual = float("inf")

    slacks = data.constraint_slacks()
    inequality_residual = max(
        0.0,
        -slacks["abs_x_minus_y"],
        -slacks["abs_x_plus_2y"],
        -slacks["abs_2x_plus_y"],
    )
    mixed = mixed_component_residual(rotated)

    return BergerPropertyReport(
        min_plane=PropertyCheck("K12 is the minimal sectional curvature", min_residual <= tol, min_residual),
        max_plane=PropertyCheck("K14 is the maximal sectional curvature", max_residual <= tol, max_residual),
        mixed_components=PropertyCheck("R_ikjk = 0 for i != j", mixed <= tol, mixed),
        inequalities=PropertyCheck("|x-y|, |x+2y|, |2x+y| bounds", inequality_residual <= tol, inequality_residual),
    )
