"""Fixed-width human-readable rendering of report envelopes."""
from __future__ import annotations

from datetime import datetime
from typing import Any

from .schema import ReportEnvelope

_WIDTH = 80
_TITLES = {
    "constants": "CONSTANT AUDIT",
    "verify": "PINCHING LEMMA VERIFICATION",
    "flow": "RICCI FLOW EIGENVALUE ODE",
    "berger": "BERGER FRAME",
    "model": "MODEL SPACE",
}


def _format_scalar(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _flatten(value: Any, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list)) and item and not _is_flat_list(item):
                lines.append(f"{pad}{key}:")
                _flatten(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key:<28} {_render_leaf(item)}")
    elif isinstance(value, list):
        for position, item in enumerate(value):
            if isinstance(item, (dict, list)) and not _is_flat_list(item):
                lines.append(f"{pad}[{position}]")
                _flatten(item, indent + 1, lines)
            else:
                lines.append(f"{pad}[{position}] {_render_leaf(item)}")


def _is_flat_list(value: Any) -> bool:
    return isinstance(value, list) and all(not isinstance(item, (dict, list)) for item in value)


def _render_leaf(value: Any) -> str:
    if isinstance(value, list):
        return "[" + ", ".join(_format_scalar(item) for item in value) + "]"
    if isinstance(value, dict):
        return "{}"
    return _format_scalar(value)


def generate_text_report(envelope: ReportEnvelope) -> str:
    lines: list[str] = []

    lines.append("=" * _WIDTH)
    lines.append(f"EINSTEIN-PINCH {_TITLES.get(envelope.command, envelope.command.upper())}")
    lines.append("=" * _WIDTH)
    lines.append("")
    lines.append(f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    lines.append(f"Command:   {envelope.command}")
    lines.append(f"Seed:      {envelope.seed}")
    lines.append(f"Wall time: {envelope.wall_time:.3f} s")
    status = envelope.payload.get("status")
    if status is not None:
        lines.append(f"Status:    {str(status).upper()}")
    lines.append("")

    lines.append("-" * _WIDTH)
    lines.append("RESULTS")
    lines.append("-" * _WIDTH)
    lines.append("")
    _flatten(envelope.payload, 1, lines)
    lines.append("")

    lines.append("-" * _WIDTH)
    lines.append("CONFIGURATION")
    lines.append("-" * _WIDTH)
    lines.append("")
    _flatten(envelope.config, 1, lines)
    lines.append("")
    lines.append("=" * _WIDTH)
    return "\n".join(lines) + "\n"
