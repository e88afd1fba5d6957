#!/usr/bin/env python
"""Command-line front end for einstein-pinch.

Reports go to stdout (text by default, JSON with --json); logs go to stderr.
Exit codes: 0 success, 1 internal error, 2 precondition or invalid input,
3 counterexample found.
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from einstein_pinch import __version__
from einstein_pinch.constants import FIXTURE_NAMES
from einstein_pinch.errors import (
    BlowUpError,
    DomainError,
    InvalidTensorError,
    NotEinsteinError,
    PreconditionError,
)
from einstein_pinch.utils.config import PinchConfig
from einstein_pinch.utils.logging.logger import configure_logging
from einstein_pinch.utils.reporting.run_reports import generate_reports
from einstein_pinch.utils.reporting.schema import dumps, validate_report
from einstein_pinch.utils.reporting.text_reports import generate_text_report

from .commands import (
    EXIT_INTERNAL,
    EXIT_PRECONDITION,
    CommandResult,
    cmd_berger,
    cmd_constants,
    cmd_flow,
    cmd_model,
    cmd_verify,
)

LOGGER = logging.getLogger("einstein-pinch")

_INPUT_ERRORS = (PreconditionError, DomainError, InvalidTensorError, NotEinsteinError, BlowUpError)


# ------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------

def _common_flags() -> argparse.ArgumentParser:
    """Global flags, accepted before or after the subcommand."""
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="Print the schema-versioned JSON report instead of text")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="Root seed for every random stream")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="Worker threads for search batches and frame starts")
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS,
                        help="Decimal places for constant tables")
    common.add_argument("--config", type=str, default=argparse.SUPPRESS,
                        help="Path to a YAML config file")
    common.add_argument("--output-dir", type=str, default=argparse.SUPPRESS,
                        help="Also write report.json/report.txt into a timestamped run folder here")
    common.add_argument("--show-config", action="store_true", default=argparse.SUPPRESS,
                        help="Log the effective configuration")
    common.add_argument("--debug", action="store_true", default=argparse.SUPPRESS,
                        help="Enable debug logging")
    return common


def _triple(text: str) -> list[float]:
    parts = [part for part in text.replace(",", " ").split() if part]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        return [float(part) for part in parts]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="einstein_pinch",
        description="Verify the curvature algebra and pinching estimates of four-dimensional Einstein manifolds",
        parents=[common],
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    constants = subparsers.add_parser("constants", parents=[common],
                                      help="Closed-form constants and decimal audits")
    constants.set_defaults(handler=_run_constants)

    verify = subparsers.add_parser("verify", parents=[common],
                                   help="Falsification search for a pinching lemma")
    verify.add_argument("lemma", choices=["22", "41"], help="Lemma 2.2 or Lemma 4.1")
    verify.add_argument("--eps", type=float, required=True, help="Pinching parameter epsilon")
    verify.add_argument("--s", type=float, default=0.0, help="Lemma 4.1 slope parameter (default: 0)")
    verify.add_argument("--samples", type=int, default=None, help="Sample budget (default: from config)")
    verify.add_argument("--refinements", type=int, default=None,
                        help="Nelder-Mead refinements per case (default: from config)")
    verify.add_argument("--ablate-upper-bound", action="store_true",
                        help="Relax K14 <= sqrt(3)/2 to K14 <= 2 (Lemma 2.2 only)")
    verify.add_argument("--domination-samples", type=int, default=10_000,
                        help="Samples for the lower-bound domination check")
    verify.add_argument("--pinching-samples", type=int, default=100_000,
                        help="Samples for the boundary invariance experiment (Lemma 2.2)")
    verify.add_argument("--no-extras", action="store_true",
                        help="Skip domination, proof-chain and invariance extras")
    verify.set_defaults(handler=_run_verify)

    flow = subparsers.add_parser("flow", parents=[common], help="Integrate the eigenvalue ODE")
    flow.add_argument("fixture", nargs="?", choices=FIXTURE_NAMES, default=None,
                      help="Model space supplying the initial eigenvalues")
    flow.add_argument("--a", type=_triple, default=None, help="Self-dual eigenvalues a1,a2,a3")
    flow.add_argument("--c", type=_triple, default=None, help="Anti-self-dual eigenvalues c1,c2,c3")
    flow.add_argument("--t-end", type=float, default=None, help="Final time (default: from config)")
    flow.add_argument("--dt", type=float, default=None, help="Step size (default: from config)")
    flow.add_argument("--csv", type=Path, default=None, help="Write the trajectory CSV here")
    flow.set_defaults(handler=_run_flow)

    berger = subparsers.add_parser("berger", parents=[common], help="Find a Berger frame")
    source = berger.add_mutually_exclusive_group(required=True)
    source.add_argument("tensor", nargs="?", type=Path, default=None, help='Tensor JSON file {"comp": [...]}')
    source.add_argument("--fixture", choices=FIXTURE_NAMES, default=None, help="Use a model space")
    berger.add_argument("--method", choices=["eigen", "multistart"], default="eigen",
                        help="Closed-form eigenvector frame or multistart SO(4) search")
    berger.add_argument("--starts", type=int, default=None,
                        help="Multistart restarts (default: from config)")
    berger.set_defaults(handler=_run_berger)

    model = subparsers.add_parser("model", parents=[common], help="Print a model-space tensor")
    model.add_argument("name", choices=FIXTURE_NAMES)
    model.set_defaults(handler=_run_model)

    return parser


# ------------------------------------------------------------------
# Handlers
# ------------------------------------------------------------------

def _run_constants(args: argparse.Namespace, config: PinchConfig) -> CommandResult:
    return cmd_constants(config)


def _run_verify(args: argparse.Namespace, config: PinchConfig) -> CommandResult:
    return cmd_verify(
        config,
        lemma=args.lemma,
        eps=args.eps,
        s=args.s,
        samples=args.samples,
        refinements=args.refinements,
        ablate_upper_bound=args.ablate_upper_bound,
        domination_samples=args.domination_samples,
        pinching_samples=args.pinching_samples,
        extras=not args.no_extras,
    )


def _run_flow(args: argparse.Namespace, config: PinchConfig) -> CommandResult:
    return cmd_flow(
        config,
        fixture=args.fixture,
        a=args.a,
        c=args.c,
        t_end=args.t_end,
        dt=args.dt,
        csv_path=args.csv,
    )


def _run_berger(args: argparse.Namespace, config: PinchConfig) -> CommandResult:
    return cmd_berger(config, tensor_path=args.tensor, fixture=args.fixture, method=args.method, starts=args.starts)


def _run_model(args: argparse.Namespace, config: PinchConfig) -> CommandResult:
    return cmd_model(config, name=args.name)


def _apply_overrides(config: PinchConfig, args: argparse.Namespace) -> PinchConfig:
    """CLI flags win over env vars, YAML and defaults."""
    for flag, field_name in (
        ("seed", "seed"),
        ("threads", "threads"),
        ("precision", "precision"),
        ("output_dir", "output_dir"),
        ("show_config", "show_config"),
    ):
        if hasattr(args, flag):
            value = getattr(args, flag)
            setattr(config, field_name, Path(value) if field_name == "output_dir" else value)
    if config.threads < 1:
        LOGGER.warning("threads=%d is not positive; using 1", config.threads)
        config.threads = 1
    if not 0 <= config.seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {config.seed}")
    return config


def _emit_error(args: argparse.Namespace, error: Exception, code: int) -> None:
    if not getattr(args, "json", False):
        return
    document = {"error": type(error).__name__, "message": str(error), "exit_code": code}
    for attribute in ("constraint", "ricci_defect", "b_norm", "t", "t_blowup"):
        if hasattr(error, attribute):
            document[attribute] = getattr(error, attribute)
    print(dumps(document))


# ------------------------------------------------------------------
# CLI entry point
# ------------------------------------------------------------------

def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logger = configure_logging(debug=getattr(args, "debug", False))

    try:
        config = PinchConfig.from_yaml(Path(args.config) if hasattr(args, "config") else None)
        config = _apply_overrides(config, args)
        if config.show_config:
            config.log_config(logger)
        result = args.handler(args, config)
    except NotEinsteinError as e:
        logger.error("%s (ricci_defect=%.3e, b_norm=%.3e)", e, e.ricci_defect, e.b_norm)
        _emit_error(args, e, EXIT_PRECONDITION)
        return EXIT_PRECONDITION
    except BlowUpError as e:
        logger.error("%s (estimated blow-up time %.6g)", e, e.t_blowup)
        _emit_error(args, e, EXIT_PRECONDITION)
        return EXIT_PRECONDITION
    except _INPUT_ERRORS as e:
        constraint = getattr(e, "constraint", None)
        if constraint:
            logger.error("%s [constraint: %s]", e, constraint)
        else:
            logger.error("%s", e)
        _emit_error(args, e, EXIT_PRECONDITION)
        return EXIT_PRECONDITION
    except Exception as e:  # noqa: BLE001
        logger.error("Internal error: %s", e)
        logger.debug("Traceback:", exc_info=True)
        _emit_error(args, e, EXIT_INTERNAL)
        return EXIT_INTERNAL

    document = result.envelope.to_dict()
    if not validate_report(document, logger):
        return EXIT_INTERNAL

    if getattr(args, "json", False):
        print(result.envelope.to_json())
    else:
        print(generate_text_report(result.envelope), end="")

    if hasattr(args, "output_dir"):
        run_dir = generate_reports(
            result.envelope,
            output_dir=str(config.output_dir),
            attachments=result.attachments,
            logger=logger,
        )
        logger.info("Run artifacts: %s", run_dir)

    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
