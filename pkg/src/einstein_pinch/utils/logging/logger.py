from __future__ import annotations

import logging
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
_QUIET_LOGGERS = ("scipy", "jsonschema")


def configure_logging(*, debug: bool = False, logger_name: Optional[str] = None) -> logging.Logger:
    """Log to stderr; stdout is reserved for reports.

    Python warnings (numpy overflow, scipy OptimizeWarning) are routed through
    logging and only surface with --debug.
    """
    level = logging.DEBUG if debug else logging.INFO
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    logging.captureWarnings(True)
    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
    logging.getLogger("py.warnings").setLevel(logging.DEBUG if debug else logging.ERROR)
    return logging.getLogger(logger_name or "einstein-pinch")
