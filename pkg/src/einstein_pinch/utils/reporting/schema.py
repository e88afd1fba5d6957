"""Versioned report envelope and its JSON schema."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any

from einstein_pinch.constants import REPORT_SCHEMA_VERSION

LOGGER = logging.getLogger("einstein-pinch")

COMMANDS = ("constants", "verify", "flow", "berger", "model")

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "einstein-pinch report",
    "type": "object",
    "required": ["schema", "command", "seed", "config", "payload", "wall_time"],
    "properties": {
        "schema": {"const": REPORT_SCHEMA_VERSION},
        "command": {"enum": list(COMMANDS)},
        "seed": {"type": "integer", "minimum": 0},
        "config": {"type": "object"},
        "payload": {"type": "object"},
        "wall_time": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

_LIGHTWEIGHT_TYPES: dict[str, tuple[type, ...]] = {
    "schema": (str,),
    "command": (str,),
    "seed": (int,),
    "config": (dict,),
    "payload": (dict,),
    "wall_time": (int, float),
}


def dumps(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=2)


@dataclass
class ReportEnvelope:
    """One CLI result: command, seed, config echo, payload and elapsed time."""

    command: str
    seed: int
    config: dict[str, Any]
    payload: dict[str, Any]
    wall_time: float = 0.0
    schema: str = field(default=REPORT_SCHEMA_VERSION)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def payload_json(self) -> str:
        """Payload alone; identical inputs give identical text."""
        return dumps(self.payload)

    @classmethod
    def from_json(cls, text: str) -> ReportEnvelope:
        data = json.loads(text)
        return cls(
            command=data["command"],
            seed=data["seed"],
            config=data["config"],
            payload=data["payload"],
            wall_time=data["wall_time"],
            schema=data["schema"],
        )


def _validate_lightweight(document: Any, logger: logging.Logger) -> bool:
    """Required keys and top-level types when jsonschema is unavailable."""
    if not isinstance(document, dict):
        logger.error("Report must be a JSON object.")
        return False
    errors: list[str] = []
    for key in REPORT_SCHEMA["required"]:
        if key not in document:
            errors.append(f"Missing required field: {key}")
            continue
        expected = _LIGHTWEIGHT_TYPES[key]
        value = document[key]
        if isinstance(value, bool) or not isinstance(value, expected):
            errors.append(f"{key}: expected {expected[0].__name__}")
    for key in document:
        if key not in REPORT_SCHEMA["properties"]:
            errors.append(f"Unexpected field not in schema: {key}")
    if document.get("schema") != REPORT_SCHEMA_VERSION:
        errors.append(f"schema: expected {REPORT_SCHEMA_VERSION!r}")
    if document.get("command") not in COMMANDS:
        errors.append(f"command: unknown {document.get('command')!r}")
    for error in errors:
        logger.error("Report failed validation: %s", error)
    return not errors


def validate_report(document: dict[str, Any], logger: logging.Logger = LOGGER) -> bool:
    """Validate a report document with jsonschema if available."""
    try:
        from jsonschema import validate
        from jsonschema.exceptions import ValidationError
    except ImportError:
        logger.warning("jsonschema is not installed; using lightweight report validation.")
        return _validate_lightweight(document, logger)

    try:
        validate(instance=document, schema=REPORT_SCHEMA)
        logger.debug("Report passed JSON Schema validation.")
        return True
    except ValidationError as e:
        logger.error("Report failed schema validation: %s", e.message)
        return False
