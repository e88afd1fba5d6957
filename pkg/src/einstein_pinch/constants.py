"""Shared package constants."""

DEFAULT_OUTPUT_FOLDER = "output"
DEFAULT_RUNS_FOLDER = "runs"
PACKAGE_FOLDER = "einstein_pinch"
DEFAULT_RUN_OUTPUT_DIR = f"{DEFAULT_OUTPUT_FOLDER}/{PACKAGE_FOLDER}/{DEFAULT_RUNS_FOLDER}"

REPORT_SCHEMA_VERSION = "1"

# Tolerances
ALGEBRAIC_TOL = 1e-12
EIGEN_TOL = 1e-9
FRAME_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-10
STRICT_SLACK = 1e-9

FIXTURE_NAMES = ("S4", "RP4", "CP2", "S2xS2")
