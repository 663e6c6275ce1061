import logging
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Literal

import dotenv
import yaml
from pydantic import Field, field_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    YamlConfigSettingsSource,
)

dotenv.load_dotenv()

logger = logging.getLogger(__name__)


class FlowgamesSettings(BaseSettings):
    """Flowgames settings with Pydantic validation."""

    model_config = SettingsConfigDict(
        env_prefix="FLOWGAMES_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        yaml_file="flowgames.yml",
    )

    # Logging configuration
    log_level: str = Field(default="INFO", description="Logging level")

    # Reproducibility
    seed: int = Field(
        default=0, description="Fallback seed for every randomized command"
    )

    # Solver limits
    max_rounds: int = Field(
        default=200, ge=1, description="Round limit for best-response dynamics"
    )
    enumeration_budget: int = Field(
        default=5000,
        ge=1,
        description="Maximum number of LP solves for equilibrium enumeration",
    )

    # Model readings
    bbc_penalty_edges: Literal["source", "all"] = Field(
        default="source",
        description="Which nodes own a disconnection edge to the destination",
    )
    eps_l: str = Field(
        default="1/64", description="Default comparator threshold for LESS gadgets"
    )

    # Reports
    report_indent: int = Field(
        default=2, ge=0, description="JSON indentation of written reports"
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is a valid logging level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {v}. Must be one of {valid_levels}")
        return v.upper()

    @field_validator("eps_l")
    @classmethod
    def validate_eps_l(cls, v: str) -> str:
        """Validate that eps_l is a rational in (0, 1/2]."""
        try:
            value = Fraction(v)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid eps_l: {v}") from e
        if not 0 < value <= Fraction(1, 2):
            raise ValueError(f"eps_l must lie in (0, 1/2], got {v}")
        return v

    @property
    def eps_l_value(self) -> Fraction:
        return Fraction(self.eps_l)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            YamlConfigSettingsSource(settings_cls),
        )


FIXTURES_PATH = Path(__file__).parent / "config" / "fixtures.yml"


def load_fixtures(path: Path = FIXTURES_PATH) -> dict[str, Any]:
    """
    Load the bundled example instances from the YAML file.

    Returns:
        dict: The fixture documents keyed by fixture name.
    """
    try:
        with open(path, "r", encoding="utf-8") as file:
            fixtures = yaml.safe_load(file)
        logger.debug("Fixtures loaded from %s", path)
        return fixtures or {}
    except Exception as e:
        logger.error("Error loading fixtures from %s: %s", path, e)
        return {}


class SettingsManager:
    """Manages settings and provides lazy access to the bundled fixtures."""

    def __init__(self):
        self._settings = FlowgamesSettings()
        logging.getLogger("flowgames").setLevel(self._settings.log_level)

    @property
    def settings(self) -> FlowgamesSettings:
        """Get the current settings instance."""
        return self._settings

    @cached_property
    def fixtures(self) -> dict[str, Any]:
        """Get the bundled fixtures, loading them on first access."""
        return load_fixtures()

    def resolve_seed(self, seed: int | None) -> int:
        """Return the explicit seed if given, else the configured fallback."""
        return self._settings.seed if seed is None else seed


# Initialize the settings manager
settings_manager = SettingsManager()
settings = settings_manager.settings
