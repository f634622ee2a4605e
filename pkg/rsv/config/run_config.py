from enum import Enum
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from rsv.utils.env import get_threads


class RunConfigError(ValueError):
    pass


class OutputFormat(str, Enum):
    TABLE = "table"
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """Settings of one CLI invocation; a YAML file may supply any of them."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Optional[str] = None
    model: Optional[Path] = None
    samples: Optional[Path] = None
    delta: float = Field(default=0.2, ge=0.0, le=1.0)
    beta: float = Field(default=0.05, gt=0.0, lt=1.0)
    p: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    n_runs: int = Field(default=100_000, ge=1)
    seed: int = Field(default=0, ge=0)
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.TABLE
    exact_model: bool = False
    threads: int = Field(default_factory=get_threads, ge=1)
    trials: int = Field(default=100, ge=1)
    intervals: bool = False
    chain_out: Optional[Path] = None
    cache: bool = True

    @field_validator("threads", mode="before")
    @classmethod
    def default_threads(cls, value):
        return get_threads() if value is None else value

    @staticmethod
    def load(config_path: Path) -> "RunConfig":
        """Load a run configuration from a YAML file."""
        try:
            with open(config_path, "r", encoding="utf-8") as file:
                document = yaml.safe_load(file) or {}
        except yaml.YAMLError as e:
            raise RunConfigError(f"Error in YAML file: {e}") from e
        except FileNotFoundError as e:
            raise RunConfigError(f"The file {config_path} doesn't exist") from e
        if not isinstance(document, dict):
            raise RunConfigError(f"{config_path} must hold a mapping of settings")
        return RunConfig.build(document)

    @staticmethod
    def build(settings: dict[str, Any]) -> "RunConfig":
        try:
            return RunConfig.model_validate(settings)
        except ValidationError as e:
            raise RunConfigError(f"Configuration validation error: {e}") from e

    @staticmethod
    def resolve(config_path: Optional[Path], **flags: Any) -> "RunConfig":
        """File settings overridden by every flag that was actually given."""
        settings = {}
        if config_path is not None:
            settings = RunConfig.load(config_path).model_dump(exclude_unset=True)
        settings.update({k: v for k, v in flags.items() if v is not None})
        return RunConfig.build(settings)
