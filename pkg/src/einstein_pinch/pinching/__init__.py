"""Pinching constants, lemma margins and their falsification searches."""

from einstein_pinch.curvature.berger_frame import berger_to_profile

from .pinch_lab import (
    EPS0,
    M1,
    LemmaReport,
    PinchConstants,
    constants_table,
    corollary13_audit,
    invariant_I,
    k_s,
    lemma22_case_bounds,
    lemma22_margin,
    lemma41_dm_lower_bound,
    lemma41_lower_bound,
    lemma41_margin,
    lemma41_roots,
    proof_constants_audit,
)
from .search import SearchConfig, lemma22_search, lemma41_search

__all__ = [
    "EPS0",
    "M1",
    "LemmaReport",
    "PinchConstants",
    "SearchConfig",
    "berger_to_profile",
    "constants_table",
    "corollary13_audit",
    "invariant_I",
    "k_s",
    "lemma22_case_bounds",
    "lemma22_margin",
    "lemma22_search",
    "lemma41_dm_lower_bound",
    "lemma41_lower_bound",
    "lemma41_margin",
    "lemma41_roots",
    "lemma41_search",
    "proof_constants_audit",
]
