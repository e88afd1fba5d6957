"""Pinching constants, the invariant I and the margin functions of the two pinching lemmas.

The quantities follow the Berger-frame notation ``m = K12``, ``k13``, ``k14``,
``x = -R1234``, ``y = -R1342``. Every function taking components works
elementwise on numpy arrays as well as on floats, so the searches evaluate
margins batch by batch with the same code the reports use.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Literal

import numpy as np
from mpmath import mp

from einstein_pinch.constants import ALGEBRAIC_TOL, STRICT_SLACK
from einstein_pinch.curvature.berger_frame import BergerData, berger_to_profile
from einstein_pinch.curvature.curvature_core import EigenProfile
from einstein_pinch.errors import DomainError, PreconditionError

LOGGER = logging.getLogger("einstein-pinch")

MP_DIGITS = 50

SQRT2 = float(np.sqrt(2.0))
M1 = float(np.sqrt(3.0) / 2.0)
EPS0 = (2.0 - SQRT2) / 6.0
ROOT_OFFSET = float(np.sqrt(4.0 + 2.0 * SQRT2) / 4.0)
K_S_INTERCEPT = (1.0 + SQRT2) / 3.0 - ROOT_OFFSET

LemmaName = Literal["L22", "L41"]
CaseLabel = Literal["case1", "case2"]
ProofCase = Literal["c1", "c2", "c3"]

# Decimals quoted for each constant, compared against the closed forms.
PRINTED_DECIMALS = {
    "M1": "0.866025",
    "M2": "0.750912",
    "eps0": "0.097631",
    "K_0": "0.151456",
    "yang_a": "0.102843",
    "yang_b": "0.642857",
}
COROLLARY_DECIMAL = "0.400543"


# ------------------------------------------------------------------
# High-precision constants
# ------------------------------------------------------------------

@dataclass(frozen=True)
class PinchConstants:
    M1: float
    M2: float
    eps0: float
    yang_a: float
    yang_b: float
    costa: float


def _mp_constants() -> dict[str, Any]:
    """Closed forms at MP_DIGITS digits; callers must hold ``mp.workdps``."""
    sqrt2 = mp.sqrt(2)
    root = mp.sqrt(4 + 2 * sqrt2) / 4
    eps0 = (2 - sqrt2) / 6
    intercept = (1 + sqrt2) / 3 - root
    return {
        "M1": mp.sqrt(3) / 2,
        "M2": eps0 + root,
        "eps0": eps0,
        "K_0": intercept,
        "K_1/2": intercept + eps0 / 2,
        "K_1": intercept + eps0,
        "yang_a": (mp.sqrt(1249) - 23) / 120,
        "yang_b": mp.mpf(9) / 14,
        "costa": mp.mpf(2) / 3,
        "root": root,
        "sqrt2": sqrt2,
    }


@lru_cache(maxsize=1)
def pinch_constants() -> PinchConstants:
    with mp.workdps(MP_DIGITS):
        values = _mp_constants()
        return PinchConstants(
            M1=float(values["M1"]),
            M2=float(values["M2"]),
            eps0=float(values["eps0"]),
            yang_a=float(values["yang_a"]),
            yang_b=float(values["yang_b"]),
            costa=float(values["costa"]),
        )


def format_fixed(value: Any, places: int) -> str:
    """Round-half-even fixed-point rendering of an mpf (or float) value."""
    with mp.workdps(MP_DIGITS):
        scaled = int(mp.nint(mp.mpf(value) * mp.mpf(10) ** places))
    return _fixed_from_scaled(scaled, places)


def truncate_fixed(value: Any, places: int) -> str:
    with mp.workdps(MP_DIGITS):
        number = mp.mpf(value)
        scaled = int(mp.floor(abs(number) * mp.mpf(10) ** places))
    return _fixed_from_scaled(-scaled if number < 0 else scaled, places)


def _fixed_from_scaled(scaled: int, places: int) -> str:
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    if places == 0:
        return f"{sign}{digits}"
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


@dataclass(frozen=True)
class ConstantRow:
    name: str
    closed_form: str
    value: str
    printed: str | None
    abs_error: float | None
    matches_rounded: bool | None
    matches_truncated: bool | None

    @property
    def matches(self) -> bool | None:
        if self.printed is None:
            return None
        return bool(self.matches_rounded or self.matches_truncated)


@dataclass(frozen=True)
class ConstantsTable:
    constants: PinchConstants
    rows: list[ConstantRow]
    precision: int

    def to_json(self) -> dict[str, Any]:
        return {
            "precision": self.precision,
            "constants": asdict(self.constants),
            "rows": [{**asdict(row), "matches": row.matches} for row in self.rows],
        }


_CLOSED_FORMS = {
    "M1": "sqrt(3)/2",
    "M2": "(2-sqrt(2))/6 + sqrt(4+2sqrt(2))/4",
    "eps0": "(2-sqrt(2))/6",
    "K_0": "(1+sqrt(2))/3 - sqrt(4+2sqrt(2))/4",
    "K_1/2": "K_0 + eps0/2",
    "K_1": "K_0 + eps0",
    "yang_a": "(sqrt(1249)-23)/120",
    "yang_b": "9/14",
    "costa": "2/3",
}


def constants_table(precision: int = 6) -> ConstantsTable:
    """Closed-form constants next to every quoted decimal."""
    if precision < 0:
        raise DomainError(f"precision must be non-negative, got {precision}")
    rows: list[ConstantRow] = []
    with mp.workdps(MP_DIGITS):
        values = _mp_constants()
        for name, closed_form in _CLOSED_FORMS.items():
            value = values[name]
            printed = PRINTED_DECIMALS.get(name)
            if printed is None:
                rows.append(ConstantRow(name, closed_form, format_fixed(value, precision), None, None, None, None))
                continue
            places = len(printed.split(".")[1])
            rows.append(
                ConstantRow(
                    name=name,
                    closed_form=closed_form,
                    value=format_fixed(value, precision),
                    printed=printed,
                    abs_error=float(abs(value - mp.mpf(printed))),
                    matches_rounded=format_fixed(value, places) == printed,
                    matches_truncated=truncate_fixed(value, places) == printed,
                )
            )
    return ConstantsTable(constants=pinch_constants(), rows=rows, precision=precision)


def k_s(s: float) -> float:
    """K_s = (1+sqrt2)/3 - sqrt(4+2sqrt2)/4 + (2-sqrt2)/6 * s."""
    if s < 0:
        raise DomainError(f"s must be non-negative, got {s}")
    return K_S_INTERCEPT + EPS0 * s


@dataclass(frozen=True)
class Corollary13Audit:
    two_k_half: float
    displayed_closed_form: float
    corrected_closed_form: float
    printed: str
    differences: dict[str, float]
    precision: int

    def to_json(self) -> dict[str, Any]:
        return {
            "two_k_half": format_fixed(self.two_k_half, self.precision),
            "displayed_closed_form": format_fixed(self.displayed_closed_form, self.precision),
            "corrected_closed_form": format_fixed(self.corrected_closed_form, self.precision),
            "printed": self.printed,
            "differences": {key: float(value) for key, value in self.differences.items()},
        }


def corollary13_audit(precision: int = 6) -> Corollary13Audit:
    """Compare 2 K_{1/2}, the displayed closed form and the printed decimal."""
    with mp.workdps(MP_DIGITS):
        values = _mp_constants()
        two_k_half = 2 * values["K_1/2"]
        displayed = (2 + values["sqrt2"]) / 2 - values["root"]
        corrected = (2 + values["sqrt2"]) / 2 - 2 * values["root"]
        printed = mp.mpf(COROLLARY_DECIMAL)
        differences = {
            "two_k_half_minus_printed": float(two_k_half - printed),
            "displayed_minus_printed": float(displayed - printed),
            "displayed_minus_two_k_half": float(displayed - two_k_half),
            "corrected_minus_two_k_half": float(corrected - two_k_half),
        }
        return Corollary13Audit(
            two_k_half=float(two_k_half),
            displayed_closed_form=float(displayed),
            corrected_closed_form=float(corrected),
            printed=COROLLARY_DECIMAL,
            differences=differences,
            precision=precision,
        )


@dataclass(frozen=True)
class AuditFact:
    name: str
    value: float
    holds: bool


def proof_constants_audit() -> list[AuditFact]:
    """Numeric facts about the constants that the pinching arguments consume."""
    facts: list[AuditFact] = []
    with mp.workdps(MP_DIGITS):
        values = _mp_constants()
        eps0, root, sqrt2 = values["eps0"], values["root"], values["sqrt2"]
        offset = values["K_0"] - eps0
        facts.append(AuditFact("K_s - (1+s)eps0 = sqrt2/2 - sqrt(4+2sqrt2)/4 > 0", float(offset), bool(offset > 0)))
        facts.append(
            AuditFact(
                "K_s - (1+s)eps0 closed form residual",
                float(offset - (sqrt2 / 2 - root)),
                bool(abs(offset - (sqrt2 / 2 - root)) < mp.mpf(10) ** (-40)),
            )
        )
        monotone = 16 * values["K_0"] - 1 - 4 * eps0
        facts.append(AuditFact("16 K_0 - 1 - 4 eps0 > 1", float(monotone), bool(monotone > 1)))
        facts.append(AuditFact("1/3 - 3 eps0 > 0", float(mp.mpf(1) / 3 - 3 * eps0), bool(mp.mpf(1) / 3 > 3 * eps0)))
        facts.append(AuditFact("1 - sqrt3/2 > 0", float(1 - values["M1"]), bool(values["M1"] < 1)))
        upper_root_gap = (1 + sqrt2) / 3 + root - 1
        facts.append(AuditFact("z_+(s) - (1 + s eps0) > 0", float(upper_root_gap), bool(upper_root_gap > 0)))
        facts.append(AuditFact("M1 - M2 > 0", float(values["M1"] - values["M2"]), bool(values["M2"] < values["M1"])))
        identity = 1 - values["K_1"] - values["M2"]
        facts.append(AuditFact("1 - K_1 - M2 = 0", float(identity), bool(abs(identity) < mp.mpf(10) ** (-40))))
        z_minus_alt = 1 - 2 * eps0 - mp.sqrt(3 * (1 - 2 * eps0) * (1 - 3 * eps0)) / 2
        root_identity = z_minus_alt - ((1 + sqrt2) / 3 - root)
        facts.append(
            AuditFact(
                "z_-(s) = 1 - 2eps0 + s eps0 - sqrt(3(1-2eps0)(1-3eps0))/2",
                float(root_identity),
                bool(abs(root_identity) < mp.mpf(10) ** (-40)),
            )
        )
    return facts


# ------------------------------------------------------------------
# Invariant I
# ------------------------------------------------------------------

def invariant_I(p: EigenProfile) -> float:
    """I = (c2-c1)c3 + (c3-c1)c2 + (a2-a1)a3 + (a3-a1)a2."""
    a, c = p.a, p.c
    return float((c[1] - c[0]) * c[2] + (c[2] - c[0]) * c[1] + (a[1] - a[0]) * a[2] + (a[2] - a[0]) * a[1])


def invariant_from_arrays(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Row-wise I for sorted triples stacked as (n, 3) arrays."""
    return (
        (c[:, 1] - c[:, 0]) * c[:, 2]
        + (c[:, 2] - c[:, 0]) * c[:, 1]
        + (a[:, 1] - a[:, 0]) * a[:, 2]
        + (a[:, 2] - a[:, 0]) * a[:, 1]
    )


def invariant_from_components(m: Any, k13: Any, k14: Any, x: Any, y: Any) -> Any:
    """I / 8 = (K13-K12)K14 + (K14-K12)K13 + x^2 - 2y(x+y), valid on feasible data."""
    return 8.0 * ((k13 - m) * k14 + (k14 - m) * k13 + x * x - 2.0 * y * (x + y))


def second_eigenvalues(k13: Any, y: Any) -> tuple[Any, Any]:
    """(a2, c2) = (2(k13 - y), 2(k13 + y))."""
    return 2.0 * (k13 - y), 2.0 * (k13 + y)


def is_case1(k13: Any, y: Any) -> Any:
    """a2 >= 0 and c2 >= 0."""
    a2, c2 = second_eigenvalues(k13, y)
    return (a2 >= 0.0) & (c2 >= 0.0)


# ------------------------------------------------------------------
# Lemma reports
# ------------------------------------------------------------------

@dataclass(frozen=True)
class CaseMinimum:
    margin: float
    I_value: float
    bound: float
    argmin: BergerData
    index: int

    def to_json(self) -> dict[str, Any]:
        return {
            "margin": self.margin,
            "I_value": self.I_value,
            "bound": self.bound,
            "argmin": self.argmin.to_json(),
            "index": self.index,
        }


@dataclass(frozen=True)
class LemmaReport:
    """Margin evaluation or search outcome; ``margin = I_value - bound`` at ``argmin``."""

    lemma: LemmaName
    case_label: CaseLabel
    I_value: float
    bound: float
    margin: float
    argmin: BergerData
    samples: int
    eps: float
    proof_case: ProofCase | None = None
    s: float | None = None
    refinements: int = 0
    upper_bound: float | None = None
    case_minima: dict[str, CaseMinimum] = field(default_factory=dict)
    strict_slack: float = STRICT_SLACK

    @property
    def counterexample(self) -> bool:
        return self.margin < -self.strict_slack

    def to_json(self) -> dict[str, Any]:
        return {
            "lemma": self.lemma,
            "case_label": self.case_label,
            "proof_case": self.proof_case,
            "I_value": self.I_value,
            "bound": self.bound,
            "margin": self.margin,
            "argmin": self.argmin.to_json(),
            "samples": self.samples,
            "refinements": self.refinements,
            "eps": self.eps,
            "s": self.s,
            "upper_bound": self.upper_bound,
            "counterexample": self.counterexample,
            "case_minima": {name: minimum.to_json() for name, minimum in sorted(self.case_minima.items())},
        }


def _require(condition: bool, constraint: str, message: str) -> None:
    if not condition:
        raise PreconditionError(message, constraint=constraint)


def lemma22_bounds(eps: float) -> dict[str, float]:
    return {"case1": 16.0 * eps / 3.0, "case2": eps / 4.0}


def lemma41_bounds(eps: float) -> dict[str, float]:
    return {"case1": 8.0 * eps / 3.0, "case2": eps}


def lemma22_proof_case(d: BergerData) -> ProofCase:
    """Proof split of the second alternative: c1, then c2 (x <= 0) or c3 (x > 0).

    When c2 < 0 <= a2 the orientation is reversed first, sending (x, y) to (-x, -y).
    """
    gap_low = d.k13 - d.m
    gap_high = d.k14 - d.k13
    if gap_high <= 3.5 * gap_low:
        return "c1"
    _, c2 = second_eigenvalues(d.k13, d.y)
    x = -d.x if c2 < 0 else d.x
    return "c2" if x <= 0 else "c3"


def check_lemma22_hypotheses(d: BergerData, eps: float, upper_bound: float = M1) -> None:
    d.check_feasible()
    _require(eps > 0, "eps_positive", f"eps must be positive, got {eps}")
    _require(
        d.k14 <= upper_bound + ALGEBRAIC_TOL,
        "k14_upper_bound",
        f"K14 = {d.k14:.12g} exceeds the upper bound {upper_bound:.12g}",
    )
    _require(d.m <= -eps + ALGEBRAIC_TOL, "m_upper_bound", f"K12 = {d.m:.12g} is not <= -eps = {-eps:.12g}")


def lemma22_margin(d: BergerData, eps: float, *, upper_bound: float = M1) -> LemmaReport:
    """Margin of I over (16/3)eps when a2, c2 >= 0 and over eps/4 otherwise."""
    check_lemma22_hypotheses(d, eps, upper_bound)
    value = float(invariant_I(berger_to_profile(d)))
    case_label: CaseLabel = "case1" if is_case1(d.k13, d.y) else "case2"
    bound = lemma22_bounds(eps)[case_label]
    return LemmaReport(
        lemma="L22",
        case_label=case_label,
        proof_case=lemma22_proof_case(d) if case_label == "case2" else None,
        I_value=value,
        bound=bound,
        margin=value - bound,
        argmin=d,
        samples=1,
        eps=eps,
        upper_bound=upper_bound,
    )


def check_lemma41_hypotheses(d: BergerData, s: float, eps: float) -> None:
    d.check_feasible()
    _require(s >= 0, "s_nonnegative", f"s must be non-negative, got {s}")
    _require(eps > 0, "eps_positive", f"eps must be positive, got {eps}")
    _require(d.m >= -ALGEBRAIC_TOL, "m_nonnegative", f"K12 = {d.m:.12g} is negative")
    _require(
        d.m <= EPS0 - eps + ALGEBRAIC_TOL,
        "m_upper_bound",
        f"K12 = {d.m:.12g} exceeds eps0 - eps = {EPS0 - eps:.12g}",
    )
    _require(
        d.k13 + s * d.m >= k_s(s) - ALGEBRAIC_TOL,
        "k13_plus_s_m_lower_bound",
        f"K13 + s K12 = {d.k13 + s * d.m:.12g} is below K_s = {k_s(s):.12g}",
    )


def lemma41_margin(d: BergerData, s: float, eps: float) -> LemmaReport:
    """Margin of I over (8/3)eps when a2, c2 >= 0 and over eps otherwise."""
    check_lemma41_hypotheses(d, s, eps)
    value = float(invariant_I(berger_to_profile(d)))
    case_label: CaseLabel = "case1" if is_case1(d.k13, d.y) else "case2"
    bound = lemma41_bounds(eps)[case_label]
    return LemmaReport(
        lemma="L41",
        case_label=case_label,
        I_value=value,
        bound=bound,
        margin=value - bound,
        argmin=d,
        samples=1,
        eps=eps,
        s=s,
    )


# ------------------------------------------------------------------
# Proof-chain bounds
# ------------------------------------------------------------------

def lemma22_case3_polynomial(m: Any, upper: Any = M1) -> Any:
    """P(m, M) = -4M^2 + 3 + (-m)(15 - 8M) + 14m^2."""
    return -4.0 * upper**2 + 3.0 + (-m) * (15.0 - 8.0 * upper) + 14.0 * m**2


@dataclass(frozen=True)
class BoundStep:
    label: str
    lhs: float
    rhs: float
    holds: bool

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class CaseBoundReport:
    case_label: CaseLabel
    proof_case: ProofCase | None
    I_value: float
    steps: list[BoundStep]

    @property
    def all_hold(self) -> bool:
        return all(step.holds for step in self.steps)

    def to_json(self) -> dict[str, Any]:
        return {
            "case_label": self.case_label,
            "proof_case": self.proof_case,
            "I_value": self.I_value,
            "all_hold": self.all_hold,
            "steps": [step.to_json() for step in self.steps],
        }


def _step(label: str, lhs: float, rhs: float, slack: float) -> BoundStep:
    return BoundStep(label=label, lhs=float(lhs), rhs=float(rhs), holds=bool(lhs >= rhs - slack))


def lemma22_case_bounds(
    d: BergerData,
    eps: float,
    *,
    upper_bound: float = M1,
    slack: float = STRICT_SLACK,
) -> CaseBoundReport:
    """Evaluate every intermediate bound of the active proof case at ``d``."""
    report = lemma22_margin(d, eps, upper_bound=upper_bound)
    value = report.I_value
    m, k13, k14 = d.m, d.k13, d.k14
    gap_low, gap_high = k13 - m, k14 - k13
    steps: list[BoundStep] = []

    if report.case_label == "case1":
        part_one = 8.0 / 3.0 * gap_low
        steps.append(_step("I >= (8/3)(K13 - K12)", value, part_one, slack))
        steps.append(_step("(8/3)(K13 - K12) >= (16/3) eps", part_one, report.bound, slack))
    elif report.proof_case == "c1":
        chained = 8.0 * (gap_low * (k14 + k13) + gap_high * k13 - 0.5 * gap_high**2)
        final = 2.0 * gap_low * (9.0 * k13 - k14)
        steps.append(
            _step("I >= 8[(K13-K12)(K14+K13) + (K14-K13)K13 - (K14-K13)^2/2]", value, chained, slack)
        )
        steps.append(_step("... >= 2(K13-K12)(9K13-K14)", chained, final, slack))
        steps.append(_step("2(K13-K12)(9K13-K14) >= eps/4", final, report.bound, slack))
    elif report.proof_case == "c2":
        chained = 8.0 * (gap_low * k14 + (k14 - m) * k13 - 2.0 * gap_low**2)
        final = 16.0 * (-m) * k14
        steps.append(_step("I >= 8[(K13-K12)K14 + (K14-K12)K13 - 2(K13-K12)^2]", value, chained, slack))
        steps.append(_step("... >= 16(-K12)K14", chained, final, slack))
        steps.append(_step("16(-K12)K14 >= eps/4", final, report.bound, slack))
    else:
        polynomial = float(lemma22_case3_polynomial(m, upper_bound))
        steps.append(_step("(3/8)I >= -4M^2 + 3 + (-m)(15-8M) + 14m^2", 0.375 * value, polynomial, slack))
        steps.append(_step("P(m, M) >= 7 eps", polynomial, 7.0 * eps, slack))
        steps.append(_step("(8/3) 7 eps >= eps/4", 8.0 / 3.0 * 7.0 * eps, report.bound, slack))

    return CaseBoundReport(
        case_label=report.case_label,
        proof_case=report.proof_case,
        I_value=value,
        steps=steps,
    )


def lemma41_lower_bound(m: Any, z: Any, s: Any) -> Any:
    """-4z^2 + 8(1 + sm - 2m)z + [-1 + (1-8s)m + 2(1 + 8s - 2s^2)m^2]."""
    return (
        -4.0 * z**2
        + 8.0 * (1.0 + s * m - 2.0 * m) * z
        + (-1.0 + (1.0 - 8.0 * s) * m + 2.0 * (1.0 + 8.0 * s - 2.0 * s**2) * m**2)
    )


def lemma41_dm_lower_bound(m: Any, z: Any, s: Any) -> Any:
    """Partial derivative of ``lemma41_lower_bound`` in m at fixed z."""
    return 8.0 * z * (s - 2.0) + 1.0 - 8.0 * s + 4.0 * m * (1.0 + 8.0 * s - 2.0 * s**2)


def lemma41_roots(s: float) -> tuple[float, float]:
    """Roots z_- < z_+ of the Lemma 4.1 quadratic at m = eps0."""
    if s < 0:
        raise DomainError(f"s must be non-negative, got {s}")
    centre = (1.0 + SQRT2) / 3.0 + EPS0 * s
    return centre - ROOT_OFFSET, centre + ROOT_OFFSET


def lemma41_root_residuals(values: tuple[float, ...] = (0.0, 0.5, 1.0)) -> dict[str, float]:
    return {f"{s:g}": float(lemma41_lower_bound(EPS0, lemma41_roots(s)[0], s)) for s in values}
