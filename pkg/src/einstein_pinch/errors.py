"""Exception hierarchy shared by the library and the CLI."""
from __future__ import annotations

from typing import Any


class PinchError(Exception):
    """Base class for every error raised by einstein-pinch."""


class InvalidTensorError(PinchError, ValueError):
    """A curvature tensor violates an algebraic symmetry beyond tolerance."""


class NotEinsteinError(PinchError, ValueError):
    def __init__(self, message: str, *, ricci_defect: float, b_norm: float) -> None:
        super().__init__(message)
        self.ricci_defect = ricci_defect
        self.b_norm = b_norm


class DomainError(PinchError, ValueError):
    """An argument lies outside the domain of an operation."""


class PreconditionError(PinchError, ValueError):
    def __init__(self, message: str, *, constraint: str) -> None:
        super().__init__(message)
        self.constraint = constraint


class InfeasibleDataError(PreconditionError):
    """BergerData outside the feasibility polytope."""


class EmptyRegionError(PreconditionError):
    """A search region has no feasible point."""


class SearchFailureError(PinchError):
    def __init__(self, message: str, *, best: Any, residual: float) -> None:
        super().__init__(message)
        self.best = best
        self.residual = residual


class BlowUpError(PinchError):
    def __init__(self, message: str, *, t: float, t_blowup: float) -> None:
        super().__init__(message)
        self.t = t
        self.t_blowup = t_blowup
