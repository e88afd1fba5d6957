from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, get_type_hints

from einstein_pinch.constants import DEFAULT_RUN_OUTPUT_DIR, STRICT_SLACK
from einstein_pinch.errors import DomainError

from .env import env_bool, env_float, env_int, env_path
from .yaml import find_config_file, has_env_override, load_yaml_config, yaml_coerce_value

LOGGER = logging.getLogger("einstein-pinch")


@dataclass
class PinchConfig:
    """Application configuration with env var overrides."""

    # Randomness and parallelism
    seed: int = field(default_factory=lambda: env_int("EINSTEIN_PINCH_SEED", 0))
    threads: int = field(default_factory=lambda: env_int("EINSTEIN_PINCH_THREADS", 1))

    # Falsification searches
    search_samples: int = field(default_factory=lambda: env_int("EINSTEIN_PINCH_SEARCH_SAMPLES", 1_000_000))
    search_refinements: int = field(default_factory=lambda: env_int("EINSTEIN_PINCH_SEARCH_REFINEMENTS", 100))
    batch_size: int = field(default_factory=lambda: env_int("EINSTEIN_PINCH_BATCH_SIZE", 100_000))
    strict_slack: float = field(default_factory=lambda: env_float("EINSTEIN_PINCH_STRICT_SLACK", STRICT_SLACK))

    # Berger frame search
    frame_starts: int = field(default_factory=lambda: env_int("EINSTEIN_PINCH_FRAME_STARTS", 50))

    # Flow integration
    flow_t_end: float = field(default_factory=lambda: env_float("EINSTEIN_PINCH_FLOW_T_END", 0.4))
    flow_dt: float = field(default_factory=lambda: env_float("EINSTEIN_PINCH_FLOW_DT", 1e-4))

    # Reporting/output
    precision: int = field(default_factory=lambda: env_int("EINSTEIN_PINCH_PRECISION", 6))
    output_dir: Path = field(default_factory=lambda: env_path("EINSTEIN_PINCH_OUTPUT_DIR", DEFAULT_RUN_OUTPUT_DIR))
    show_config: bool = field(default_factory=lambda: env_bool("EINSTEIN_PINCH_SHOW_CONFIG", False))

    @classmethod
    def from_yaml(cls, path: Path | None = None) -> PinchConfig:
        """Construct config with precedence: env vars > YAML > code defaults."""
        resolved_path = Path(path).expanduser() if path is not None else find_config_file()
        if resolved_path is None:
            LOGGER.debug("No config file found. Using code defaults and environment overrides only.")
        yaml_config = load_yaml_config(resolved_path)
        field_types = get_type_hints(cls)

        kwargs: dict[str, Any] = {}
        for dataclass_field in fields(cls):
            field_name = dataclass_field.name
            if has_env_override(field_name):
                continue
            if field_name not in yaml_config:
                continue

            annotation = field_types.get(field_name, dataclass_field.type)
            try:
                kwargs[field_name] = yaml_coerce_value(field_name, yaml_config[field_name], annotation)
            except (TypeError, ValueError) as exc:
                LOGGER.warning(
                    "Ignoring YAML value for '%s' in %s: %s",
                    field_name,
                    resolved_path,
                    exc,
                )

        config = cls(**kwargs)
        config._loaded_config_path = resolved_path
        LOGGER.debug("Loaded config from: %s", resolved_path or "(defaults only)")
        return config

    def __post_init__(self) -> None:
        if self.threads < 1:
            LOGGER.warning("threads=%d is not positive; using 1", self.threads)
            self.threads = 1
        if self.batch_size < 1:
            LOGGER.warning("batch_size=%d is not positive; using 100000", self.batch_size)
            self.batch_size = 100_000
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def as_dict(self) -> dict[str, Any]:
        """Plain JSON-ready mapping of every option."""
        return {
            config_field.name: (
                str(getattr(self, config_field.name))
                if isinstance(getattr(self, config_field.name), Path)
                else getattr(self, config_field.name)
            )
            for config_field in fields(self)
        }

    def log_config(self, logger: logging.Logger | None = None) -> None:
        """Log all configuration options in a nicely formatted table."""
        logger = logger or LOGGER
        loaded_path = getattr(self, "_loaded_config_path", None)
        names = [config_field.name for config_field in fields(self)]

        max_name = max(len(name) for name in names)
        header = f"{'Option':<{max_name}}  Value"
        separator = "-" * len(header)
        logger.info("Configuration:")
        logger.info("Loaded config from: %s", loaded_path or "(defaults only)")
        logger.info(separator)
        logger.info(header)
        logger.info(separator)
        for field_name in names:
            logger.info("%-*s  %s", max_name, field_name, getattr(self, field_name))
        logger.info(separator)
