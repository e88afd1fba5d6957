"""Typed readers for EINSTEIN_PINCH_* environment variables; malformed values fall back to the default."""
from __future__ import annotations

import os
from pathlib import Path

ENV_PREFIX = "EINSTEIN_PINCH_"


def env_name(field_name: str) -> str:
    return f"{ENV_PREFIX}{field_name.upper()}"


def env_bool(name: str, default: bool = False) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return int(value.replace("_", ""))
    except ValueError:
        return default


def env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return float(value)
    except ValueError:
        return default


def env_path(name: str, default: str) -> Path:
    return Path(os.getenv(name, default)).expanduser()
