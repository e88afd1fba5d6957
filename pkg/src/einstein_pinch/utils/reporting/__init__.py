"""Reporting utilities for einstein-pinch."""
from .run_reports import generate_reports
from .schema import REPORT_SCHEMA, ReportEnvelope, validate_report
from .text_reports import generate_text_report

__all__ = ["REPORT_SCHEMA", "ReportEnvelope", "generate_reports", "generate_text_report", "validate_report"]
