from __future__ import annotations

import logging
import os
import shutil
from collections.abc import Callable
from datetime import datetime

from einstein_pinch.constants import DEFAULT_RUN_OUTPUT_DIR

from .schema import ReportEnvelope
from .text_reports import generate_text_report

LOGGER = logging.getLogger("einstein-pinch")

Attachment = Callable[[str], object]


def _update_latest_folder(output_dir: str, run_dir: str, logger: logging.Logger) -> None:
    """Update the /latest/ folder to contain copies of the latest run output."""
    latest_dir = os.path.join(output_dir, "latest")

    if os.path.exists(latest_dir):
        shutil.rmtree(latest_dir)

    shutil.copytree(run_dir, latest_dir)
    logger.info("Latest output copied to: %s", latest_dir)


def generate_reports(
    envelope: ReportEnvelope,
    *,
    output_dir: str = DEFAULT_RUN_OUTPUT_DIR,
    attachments: dict[str, Attachment] | None = None,
    logger: logging.Logger = LOGGER,
) -> str:
    """Write report.json, report.txt and any attachments into a timestamped run folder.

    ``attachments`` maps a file name to a writer called with the target path.
    Returns the run folder.
    """
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    run_dir = os.path.join(output_dir, f"{timestamp}_{envelope.command}")
    os.makedirs(run_dir, exist_ok=True)
    logger.info("Run output directory: %s", run_dir)

    json_file = os.path.join(run_dir, "report.json")
    with open(json_file, "w", encoding="utf-8") as f:
        f.write(envelope.to_json())
        f.write("\n")
    logger.info("JSON report written to: %s", json_file)

    text_file = os.path.join(run_dir, "report.txt")
    with open(text_file, "w", encoding="utf-8") as f:
        f.write(generate_text_report(envelope))
    logger.info("Text report written to: %s", text_file)

    for name, writer in (attachments or {}).items():
        target = os.path.join(run_dir, name)
        writer(target)
        logger.info("Attachment saved to: %s", target)

    _update_latest_folder(output_dir, run_dir, logger)
    return run_dir
