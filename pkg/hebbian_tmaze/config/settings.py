from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

DEFAULT_OUTPUT_DIR = Path(".data") / "runs"
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigError(ValueError):
    """Raised when runtime settings from the environment are invalid."""


@dataclass(frozen=True)
class RuntimeSettings:
    workers: int = 1
    log_level: str = "INFO"
    output_dir: Path = DEFAULT_OUTPUT_DIR

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None) -> RuntimeSettings:
        env_map = os.environ if env is None else env
        raw_workers = env_map.get("TMAZE_WORKERS", "1")
        try:
            workers = int(raw_workers)
        except ValueError as exc:
            raise ConfigError(f"TMAZE_WORKERS must be an integer, got {raw_workers!r}.") from exc
        if workers < 1:
            raise ConfigError("TMAZE_WORKERS must be at least 1.")

        log_level = env_map.get("TMAZE_LOG_LEVEL", "INFO").strip().upper()
        if log_level not in _LOG_LEVELS:
            raise ConfigError(f"TMAZE_LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}, got {log_level!r}.")

        output_dir = Path(env_map.get("TMAZE_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR).expanduser()
        return cls(workers=workers, log_level=log_level, output_dir=output_dir)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


__all__ = ["ConfigError", "DEFAULT_OUTPUT_DIR", "RuntimeSettings", "configure_logging"]
