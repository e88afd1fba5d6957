"""Algebraic curvature tensors in dimension four.

Tensors are stored as ``comp[i, j, k, l] = R_{ijkl}`` with the sign convention
``K_{ij} = R_{ijij}``. The curvature operator is written in the unnormalized
2-form basis

    phi_1 = t12 + t34,  phi_2 = t13 + t42,  phi_3 = t14 + t23   (self-dual)
    psi_1 = t12 - t34,  psi_2 = t13 - t42,  psi_3 = t14 - t23   (anti-self-dual)

where ``tij`` is the coframe wedge. Each basis form has squared norm 2, so the
block entries are twice those of the unit-norm convention and the diagonal of
A in a Berger frame reads ``a_1 = 2(K_12 + R_1234)`` directly.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import minimize

from einstein_pinch.constants import ALGEBRAIC_TOL, EIGEN_TOL, FIXTURE_NAMES
from einstein_pinch.errors import DomainError, InvalidTensorError, NotEinsteinError

LOGGER = logging.getLogger("einstein-pinch")

UNIT_TOL = 1e-9


def _wedge(i: int, j: int) -> np.ndarray:
    form = np.zeros((4, 4))
    form[i, j] = 1.0
    form[j, i] = -1.0
    return form


# (6, 4, 4): phi_1..phi_3 then psi_1..psi_3, indices zero-based.
TWO_FORM_BASIS = np.array(
    [
        _wedge(0, 1) + _wedge(2, 3),
        _wedge(0, 2) + _wedge(3, 1),
        _wedge(0, 3) + _wedge(1, 2),
        _wedge(0, 1) - _wedge(2, 3),
        _wedge(0, 2) - _wedge(3, 1),
        _wedge(0, 3) - _wedge(1, 2),
    ]
)
TWO_FORM_BASIS.setflags(write=False)


# ------------------------------------------------------------------
# Domain types
# ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurvatureTensor4:
    """Rank-4 curvature tensor R_{ijkl} at a point of a four-manifold."""

    comp: np.ndarray

    def __post_init__(self) -> None:
        comp = np.array(self.comp, dtype=float)
        if comp.shape != (4, 4, 4, 4):
            raise InvalidTensorError(f"expected a 4x4x4x4 array, got shape {comp.shape}")
        comp.setflags(write=False)
        object.__setattr__(self, "comp", comp)

    def symmetry_residuals(self) -> dict[str, float]:
        """Max absolute violation of each algebraic symmetry family."""
        r = self.comp
        bianchi = r + np.transpose(r, (0, 2, 3, 1)) + np.transpose(r, (0, 3, 1, 2))
        return {
            "antisymmetry": float(
                max(
                    np.max(np.abs(r + np.transpose(r, (1, 0, 2, 3)))),
                    np.max(np.abs(r + np.transpose(r, (0, 1, 3, 2)))),
                )
            ),
            "pair_symmetry": float(np.max(np.abs(r - np.transpose(r, (2, 3, 0, 1))))),
            "bianchi": float(np.max(np.abs(bianchi))),
        }

    def validate(self, tol: float = ALGEBRAIC_TOL) -> None:
        scale = max(1.0, float(np.max(np.abs(self.comp))))
        for name, residual in self.symmetry_residuals().items():
            if residual > tol * scale:
                raise InvalidTensorError(f"{name} violated by {residual:.3e} (tolerance {tol * scale:.1e})")

    def sectional(self, i: int, j: int) -> float:
        """K_{ij} for basis indices (zero-based)."""
        return float(self.comp[i, j, i, j])

    def to_json(self) -> dict[str, Any]:
        return {"comp": self.comp.tolist()}

    @classmethod
    def from_json(cls, payload: dict[str, Any] | str) -> CurvatureTensor4:
        data = json.loads(payload) if isinstance(payload, str) else payload
        if not isinstance(data, dict) or "comp" not in data:
            raise InvalidTensorError("tensor JSON must be an object with a 'comp' array")
        try:
            return cls(np.asarray(data["comp"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise InvalidTensorError(f"malformed tensor components: {exc}") from exc


@dataclass(frozen=True, eq=False)
class OperatorBlocks:
    """Blocks (A, B, C) of the curvature operator over Lambda^2_+ + Lambda^2_-."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self) -> None:
        blocks = {}
        for name in ("A", "B", "C"):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != (3, 3):
                raise DomainError(f"block {name} must be 3x3, got shape {value.shape}")
            blocks[name] = value
        for name in ("A", "C"):
            value = blocks[name]
            scale = max(1.0, float(np.max(np.abs(value))))
            if np.max(np.abs(value - value.T)) > ALGEBRAIC_TOL * scale:
                raise DomainError(f"block {name} is not symmetric")
            blocks[name] = 0.5 * (value + value.T)
        for name, value in blocks.items():
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def b_norm(self) -> float:
        return float(np.linalg.norm(self.B))

    def operator_matrix(self) -> np.ndarray:
        """The full symmetric 6x6 matrix [[A, B], [B^T, C]]."""
        return np.block([[self.A, self.B], [self.B.T, self.C]])

    @classmethod
    def zero(cls) -> OperatorBlocks:
        return cls(np.zeros((3, 3)), np.zeros((3, 3)), np.zeros((3, 3)))


@dataclass(frozen=True)
class EigenProfile:
    """Sorted eigenvalue triples of A and C."""

    a: tuple[float, float, float]
    c: tuple[float, float, float]

    def __post_init__(self) -> None:
        for name in ("a", "c"):
            values = tuple(float(v) for v in getattr(self, name))
            if len(values) != 3:
                raise DomainError(f"profile triple {name} must have three entries")
            if not all(np.isfinite(values)):
                raise DomainError(f"profile triple {name} is not finite: {values}")
            if values[0] > values[1] + ALGEBRAIC_TOL or values[1] > values[2] + ALGEBRAIC_TOL:
                raise DomainError(f"profile triple {name} is not ascending: {values}")
            object.__setattr__(self, name, values)

    @classmethod
    def from_values(cls, a: Any, c: Any) -> EigenProfile:
        """Build a profile from unsorted triples."""
        return cls(tuple(sorted(float(v) for v in a)), tuple(sorted(float(v) for v in c)))

    def as_array(self) -> np.ndarray:
        return np.array(self.a + self.c)

    @property
    def trace_a(self) -> float:
        return float(sum(self.a))

    @property
    def trace_c(self) -> float:
        return float(sum(self.c))

    @property
    def scalar_curvature(self) -> float:
        return self.trace_a + self.trace_c

    def to_json(self) -> dict[str, list[float]]:
        return {"a": list(self.a), "c": list(self.c)}


@dataclass(frozen=True, eq=False)
class Plane2:
    """A tangent 2-plane as a pair of unit vectors in Lambda^2_+ x Lambda^2_-."""

    p: np.ndarray = field()
    q: np.ndarray = field()

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != (3,):
                raise DomainError(f"plane coordinate {name} must be a 3-vector")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def complement(self) -> Plane2:
        """The orthogonal complement plane, (p, q) -> (p, -q)."""
        return Plane2(self.p, -self.q)

    def to_two_form(self) -> np.ndarray:
        """Unit decomposable 2-form as an antisymmetric 4x4 matrix."""
        return 0.5 * (
            np.einsum("a,aij->ij", self.p, TWO_FORM_BASIS[:3])
            + np.einsum("a,aij->ij", self.q, TWO_FORM_BASIS[3:])
        )

    @classmethod
    def from_vectors(cls, u: Any, v: Any) -> Plane2:
        """The plane spanned by two vectors of R^4 (orthonormalized, oriented u then v)."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        u = u / np.linalg.norm(u)
        v = v - (u @ v) * u
        norm = np.linalg.norm(v)
        if norm < UNIT_TOL:
            raise DomainError("vectors do not span a plane")
        v = v / norm
        form = np.outer(u, v) - np.outer(v, u)
        coords = 0.5 * np.einsum("ij,aij->a", form, TWO_FORM_BASIS)
        return cls(coords[:3], coords[3:])


# ------------------------------------------------------------------
# Block decomposition
# ------------------------------------------------------------------

def tensor_to_blocks(t: CurvatureTensor4) -> OperatorBlocks:
    t.validate()
    matrix = 0.25 * np.einsum("ijkl,aij,bkl->ab", t.comp, TWO_FORM_BASIS, TWO_FORM_BASIS)
    return OperatorBlocks(matrix[:3, :3], matrix[:3, 3:], matrix[3:, 3:])


def blocks_to_tensor(b: OperatorBlocks) -> CurvatureTensor4:
    """The algebraic curvature tensor whose operator blocks are ``b``.

    The first Bianchi identity forces trace(A) = trace(C).
    """
    trace_gap = abs(float(np.trace(b.A) - np.trace(b.C)))
    if trace_gap > EIGEN_TOL * max(1.0, float(np.max(np.abs(b.operator_matrix())))):
        raise InvalidTensorError(f"trace(A) - trace(C) = {trace_gap:.3e}; first Bianchi identity fails")
    comp = 0.25 * np.einsum("ab,aij,bkl->ijkl", b.operator_matrix(), TWO_FORM_BASIS, TWO_FORM_BASIS)
    return CurvatureTensor4(comp)


def tensor_to_json(t: CurvatureTensor4) -> dict[str, Any]:
    return t.to_json()


def tensor_from_json(payload: dict[str, Any] | str) -> CurvatureTensor4:
    return CurvatureTensor4.from_json(payload)


def _require_einstein_blocks(b: OperatorBlocks, tol: float = EIGEN_TOL) -> None:
    if b.b_norm > tol:
        raise NotEinsteinError(
            f"off-diagonal block has norm {b.b_norm:.3e} > {tol:.1e}",
            ricci_defect=float("nan"),
            b_norm=b.b_norm,
        )


def blocks_to_profile(b: OperatorBlocks) -> EigenProfile:
    _require_einstein_blocks(b)
    a = np.linalg.eigvalsh(b.A)
    c = np.linalg.eigvalsh(b.C)
    return EigenProfile(tuple(a), tuple(c))


# ------------------------------------------------------------------
# Sectional curvature
# ------------------------------------------------------------------

def _check_unit(name: str, vector: np.ndarray) -> None:
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > UNIT_TOL:
        raise DomainError(f"plane coordinate {name} must be a unit vector, |{name}| = {norm:.12g}")


def sectional_curvature(b: OperatorBlocks, plane: Plane2) -> float:
    """K(pi) = (p^T A p + 2 p^T B q + q^T C q) / 4."""
    _check_unit("p", plane.p)
    _check_unit("q", plane.q)
    p, q = plane.p, plane.q
    return float((p @ b.A @ p + 2.0 * p @ b.B @ q + q @ b.C @ q) / 4.0)


def sectional_curvature_batch(b: OperatorBlocks, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorized K over rows of unit vectors ``p`` (n, 3) and ``q`` (n, 3)."""
    return (
        np.einsum("ni,ij,nj->n", p, b.A, p)
        + 2.0 * np.einsum("ni,ij,nj->n", p, b.B, q)
        + np.einsum("ni,ij,nj->n", q, b.C, q)
    ) / 4.0


def sectional_curvature_of_vectors(t: CurvatureTensor4, u: Any, v: Any) -> float:
    """K of span(u, v) straight from the tensor components."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    numerator = np.einsum("ijkl,i,j,k,l->", t.comp, u, v, u, v)
    area = (u @ u) * (v @ v) - (u @ v) ** 2
    if area < UNIT_TOL:
        raise DomainError("vectors do not span a plane")
    return float(numerator / area)


def min_max_sectional(b: OperatorBlocks) -> tuple[float, float]:
    profile = blocks_to_profile(b)
    return (profile.a[0] + profile.c[0]) / 4.0, (profile.a[2] + profile.c[2]) / 4.0


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    vectors = rng.standard_normal((n, 3))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def random_plane(rng: np.random.Generator) -> Plane2:
    p, q = random_unit_vectors(rng, 2)
    return Plane2(p, q)


def random_planes(rng: np.random.Generator, n: int) -> list[Plane2]:
    p = random_unit_vectors(rng, n)
    q = random_unit_vectors(rng, n)
    return [Plane2(p[i], q[i]) for i in range(n)]


def complement(plane: Plane2) -> Plane2:
    return plane.complement()


def plane_to_two_form(plane: Plane2) -> np.ndarray:
    return plane.to_two_form()


def two_form_to_plane(form: np.ndarray) -> Plane2:
    """Coordinates (p, q) of a unit decomposable 2-form given as a 4x4 matrix."""
    form = np.asarray(form, dtype=float)
    if form.shape != (4, 4) or np.max(np.abs(form + form.T)) > ALGEBRAIC_TOL:
        raise DomainError("2-form must be an antisymmetric 4x4 matrix")
    coords = 0.5 * np.einsum("ij,aij->a", form, TWO_FORM_BASIS)
    plane = Plane2(coords[:3], coords[3:])
    _check_unit("p", plane.p)
    _check_unit("q", plane.q)
    return plane


def brute_force_extremes(
    b: OperatorBlocks,
    samples: int,
    rng: np.random.Generator,
    *,
    polish: int = 4,
) -> tuple[float, float]:
    """Min and max of K over sampled planes, polished from the best samples.

    Uses only pointwise evaluations of K, never the eigen-decomposition, so it
    serves as an independent oracle for ``min_max_sectional``.
    """
    p = random_unit_vectors(rng, samples)
    q = random_unit_vectors(rng, samples)
    values = sectional_curvature_batch(b, p, q)

    def curvature_at(z: np.ndarray, sign: float) -> float:
        pz, qz = z[:3], z[3:]
        pz = pz / np.linalg.norm(pz)
        qz = qz / np.linalg.norm(qz)
        return sign * float((pz @ b.A @ pz + 2.0 * pz @ b.B @ qz + qz @ b.C @ qz) / 4.0)

    extremes = []
    for sign, order in ((1.0, np.argsort(values)), (-1.0, np.argsort(-values))):
        best = sign * float(values[order[0]])
        for index in order[:polish]:
            start = np.concatenate([p[index], q[index]])
            result = minimize(curvature_at, start, args=(sign,), method="L-BFGS-B")
            best = min(best, float(result.fun))
        extremes.append(sign * best)
    return extremes[0], extremes[1]


# ------------------------------------------------------------------
# Einstein condition
# ------------------------------------------------------------------

def ricci_tensor(t: CurvatureTensor4) -> np.ndarray:
    """Ric_{ij} = sum_k R_{ikjk}."""
    return np.einsum("ikjk->ij", t.comp)


def scalar_curvature(t: CurvatureTensor4) -> float:
    return float(np.trace(ricci_tensor(t)))


def einstein_defect(t: CurvatureTensor4) -> tuple[float, float]:
    """(max |Ric_ij - delta_ij|, Frobenius norm of B)."""
    ricci_defect = float(np.max(np.abs(ricci_tensor(t) - np.eye(4))))
    matrix = 0.25 * np.einsum("ijkl,aij,bkl->ab", t.comp, TWO_FORM_BASIS, TWO_FORM_BASIS)
    return ricci_defect, float(np.linalg.norm(matrix[:3, 3:]))


def require_einstein(t: CurvatureTensor4, tol: float = EIGEN_TOL) -> None:
    ricci_defect, b_norm = einstein_defect(t)
    if ricci_defect > tol or b_norm > tol:
        raise NotEinsteinError(
            f"tensor is not Einstein-normalized: max|Ric - 1| = {ricci_defect:.3e}, |B| = {b_norm:.3e}",
            ricci_defect=ricci_defect,
            b_norm=b_norm,
        )


# ------------------------------------------------------------------
# Fixtures
# ------------------------------------------------------------------

def _constant_curvature(k: float, projector: np.ndarray) -> np.ndarray:
    return k * (
        np.einsum("ik,jl->ijkl", projector, projector) - np.einsum("il,jk->ijkl", projector, projector)
    )


# Complex structure with J e1 = e4 and J e2 = e3, so the Kahler form is -phi_3.
_CP2_COMPLEX_STRUCTURE = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
)


def _fubini_study(holomorphic: float) -> np.ndarray:
    omega = _CP2_COMPLEX_STRUCTURE
    g = np.eye(4)
    return (holomorphic / 4.0) * (
        np.einsum("ik,jl->ijkl", g, g)
        - np.einsum("il,jk->ijkl", g, g)
        + np.einsum("ik,jl->ijkl", omega, omega)
        - np.einsum("il,jk->ijkl", omega, omega)
        + 2.0 * np.einsum("ij,kl->ijkl", omega, omega)
    )


def model_space(name: str) -> CurvatureTensor4:
    """Einstein-normalized (Ric = 1) curvature tensor of a model space."""
    if name in ("S4", "RP4"):
        return CurvatureTensor4(_constant_curvature(1.0 / 3.0, np.eye(4)))
    if name == "CP2":
        return CurvatureTensor4(_fubini_study(2.0 / 3.0))
    if name == "S2xS2":
        # unit spheres on span(e1, e4) and span(e2, e3)
        first = np.diag([1.0, 0.0, 0.0, 1.0])
        second = np.diag([0.0, 1.0, 1.0, 0.0])
        return CurvatureTensor4(_constant_curvature(1.0, first) + _constant_curvature(1.0, second))
    raise DomainError(f"unknown model space {name!r}; expected one of {', '.join(FIXTURE_NAMES)}")


def random_einstein_blocks(rng: np.random.Generator, *, scale: float = 0.5) -> OperatorBlocks:
    """Symmetric A, C with i.i.d. normal entries shifted to trace 2; B = 0."""
    blocks = []
    for _ in range(2):
        raw = scale * rng.standard_normal((3, 3))
        sym = 0.5 * (raw + raw.T)
        blocks.append(sym + (2.0 - np.trace(sym)) / 3.0 * np.eye(3))
    return OperatorBlocks(blocks[0], np.zeros((3, 3)), blocks[1])
