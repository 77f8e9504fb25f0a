"""Lab-wide configuration management."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from infrastructure.adapters.yaml_configuration_adapter import YamlConfigurationAdapter
from infrastructure.logging.log_config import LogFormat, LogLevel
from infrastructure.parallel.trial_executor import THREADS_ENVIRONMENT_VARIABLE, resolve_threads

ENVIRONMENTS = ("development", "production", "testing")


@dataclass
class LabConfig:
    """Settings shared by every command: workers, the fallback master seed and logging."""

    environment: str = field(default_factory=lambda: os.getenv("MBL_ENV", "development"))
    threads: Optional[int] = None
    seed: int = 0
    log_level: LogLevel = LogLevel.INFO
    log_format: Optional[LogFormat] = None
    logs_dir: Path = field(default_factory=lambda: Path("logs"))

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None) -> "LabConfig":
        """Create configuration from ``MBL_*`` environment variables."""
        env = os.environ if env is None else env
        config = cls(environment=env.get("MBL_ENV", "development"))

        raw_threads = env.get(THREADS_ENVIRONMENT_VARIABLE)
        if raw_threads:
            config.threads = resolve_threads(env={THREADS_ENVIRONMENT_VARIABLE: raw_threads})
        if env.get("MBL_SEED"):
            config.seed = int(env["MBL_SEED"])
        if env.get("MBL_LOG_LEVEL"):
            config.log_level = LogLevel(env["MBL_LOG_LEVEL"].upper())
        return config

    @classmethod
    def from_file(cls, config_path: Path) -> "LabConfig":
        """Load configuration from YAML file."""
        return cls.from_dict(YamlConfigurationAdapter().load(config_path))

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "LabConfig":
        """Create configuration from dictionary; unknown keys are ignored."""
        config = cls()
        for key, value in config_dict.items():
            if key == "log_level":
                config.log_level = LogLevel(str(value).upper())
            elif key == "log_format":
                config.log_format = None if value is None else LogFormat(value)
            elif key == "logs_dir":
                config.logs_dir = Path(value)
            elif hasattr(config, key):
                setattr(config, key, value)
        return config

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return {
            "environment": self.environment,
            "threads": self.threads,
            "seed": self.seed,
            "log_level": self.log_level.value,
            "log_format": self.log_format.value if self.log_format else None,
            "logs_dir": str(self.logs_dir),
        }

    def save_to_file(self, config_path: Path) -> None:
        """Save configuration to YAML file."""
        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, "w") as f:
            yaml.safe_dump(self.to_dict(), f, default_flow_style=False, indent=2)

    def validate(self) -> list[str]:
        """Validate configuration and return list of errors."""
        errors = []

        if self.environment not in ENVIRONMENTS:
            errors.append(f"Environment must be one of {', '.join(ENVIRONMENTS)}")

        if self.threads is not None and self.threads < 1:
            errors.append("Threads must be at least 1")

        if self.seed < 0 or self.seed >= 2**64:
            errors.append("Seed must be an unsigned 64-bit integer")

        return errors

    def resolved_threads(self) -> int:
        return resolve_threads(self.threads)

    def is_testing(self) -> bool:
        return self.environment.lower() == "testing"
