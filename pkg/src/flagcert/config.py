"""Configuration: defaults, optional config file, environment overrides."""

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, Field, field_validator

from flagcert.errors import ArgumentError

# Config directory and file locations
CONFIG_DIR = Path.home() / ".config" / "flagcert"
CONFIG_PATH = CONFIG_DIR / "config.json"

DEFAULT_DENOMINATORS = [625, 2500, 12500, 62500]
DEFAULT_STORAGE_DIR = Path(tempfile.gettempdir()) / f"flagcert-{os.getuid()}"


class Settings(BaseModel):
    """Resolved settings used by the CLI and the rounding bridge."""

    denominators: list[int] = Field(
        default_factory=lambda: list(DEFAULT_DENOMINATORS),
        description="Rounding ladder of common denominators",
    )
    diagonal_boost: str = Field(default="0", description="Rational mu added as mu*I before re-check")
    max_denominator: int | None = Field(
        default=1_000_000,
        ge=1,
        description="Cap for continued-fraction rounding after the ladder; null skips that stage",
    )
    approx_digits: int = Field(default=6, ge=1, le=30, description="Digits for --approx output")
    storage_dir: Path = Field(default=DEFAULT_STORAGE_DIR, description="Where saved reports go")

    @field_validator("denominators")
    @classmethod
    def _positive(cls, value: list[int]) -> list[int]:
        if not value or any(d <= 0 for d in value):
            raise ValueError("denominators must be a nonempty list of positive integers")
        return value

    @field_validator("diagonal_boost")
    @classmethod
    def _nonnegative_rational(cls, value: str) -> str:
        try:
            mu = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"diagonal_boost {value!r} is not a rational")
        if mu < 0:
            raise ValueError("diagonal_boost must be >= 0")
        return value


def _load_config_from_file() -> dict:
    """Load configuration from config file; unreadable files count as empty."""
    if CONFIG_PATH.exists():
        try:
            with open(CONFIG_PATH) as f:
                data = json.load(f)
            return data if isinstance(data, dict) else {}
        except (json.JSONDecodeError, OSError):
            pass
    return {}


def parse_denominators(text: str) -> list[int]:
    """Parse a comma-separated denominator ladder like ``"625,2500"``."""
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ArgumentError(f"Invalid denominator list: {text!r}")
    if not values or any(v <= 0 for v in values):
        raise ArgumentError(f"Invalid denominator list: {text!r} (need positive integers)")
    return values


def _env_overrides() -> dict:
    overrides: dict = {}
    if value := os.environ.get("FLAGCERT_DENOMINATORS"):
        overrides["denominators"] = parse_denominators(value)
    if value := os.environ.get("FLAGCERT_DIAGONAL_BOOST"):
        overrides["diagonal_boost"] = value
    if value := os.environ.get("FLAGCERT_MAX_DENOMINATOR"):
        try:
            overrides["max_denominator"] = int(value)
        except ValueError:
            raise ArgumentError(f"FLAGCERT_MAX_DENOMINATOR must be an integer, got {value!r}")
    if value := os.environ.get("FLAGCERT_APPROX_DIGITS"):
        try:
            overrides["approx_digits"] = int(value)
        except ValueError:
            raise ArgumentError(f"FLAGCERT_APPROX_DIGITS must be an integer, got {value!r}")
    if value := os.environ.get("FLAGCERT_STORAGE_DIR"):
        overrides["storage_dir"] = Path(value)
    return overrides


def load_settings(**cli_overrides) -> Settings:
    """Resolve settings: defaults < config file < environment < explicit options.

    Args:
        **cli_overrides: Values given explicitly on the command line; ``None``
            values are ignored.

    Returns:
        Validated Settings.

    Raises:
        ArgumentError: If an environment value or option is malformed.
    """
    merged: dict = {}
    file_config = _load_config_from_file()
    for key in Settings.model_fields:
        if key in file_config:
            merged[key] = file_config[key]
    merged.update(_env_overrides())
    merged.update({k: v for k, v in cli_overrides.items() if v is not None})
    try:
        return Settings(**merged)
    except ValueError as e:
        raise ArgumentError(f"Invalid settings: {e}")
