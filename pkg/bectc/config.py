import logging
import os
from typing import Any, Dict, List, Optional

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from bectc.exceptions import ConfigError
from bectc.models import TrapShape

logger = logging.getLogger(__name__)

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="BEC_", env_file=".env", extra="ignore")

    # Sweep parallelism; None or <= 0 means all cores
    NUM_WORKERS: Optional[int] = None

    LOG_LEVEL: str = "INFO"

    # Validity criterion k_B Tc > threshold * hbar * omega_max
    VALIDITY_THRESHOLD: float = 20.0

    # CSV number formatting
    SIGNIFICANT_DIGITS: int = 12

    @property
    def workers(self) -> int:
        if self.NUM_WORKERS is None or self.NUM_WORKERS <= 0:
            return os.cpu_count() or 1
        return self.NUM_WORKERS


settings = Settings()


class OutputOptions(BaseModel):
    format: str = Field(default="csv", pattern="^(csv|json)$")
    out: Optional[str] = None
    overlay: Optional[str] = None


class Fig1Options(OutputOptions):
    n_min: float = Field(default=1e4, ge=1e2)
    n_max: float = 1e7
    points: int = Field(default=25, ge=2)
    unsafe: bool = False


class Fig2Options(OutputOptions):
    n: List[float] = Field(default=[1e4, 1e5], min_length=1)
    t_points: int = Field(default=60, ge=10)

    @field_validator("n", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        if isinstance(value, (int, float)):
            return [value]
        return value

    @field_validator("n")
    @classmethod
    def _check_atoms(cls, value: List[float]) -> List[float]:
        if any(n < 1e2 for n in value):
            raise ValueError("every N must be at least 1e2")
        return value


class AnisoscanOptions(OutputOptions):
    shape: TrapShape = TrapShape.DISK
    n: float = Field(default=1e5, gt=0.0)
    s_max_scan: Optional[float] = Field(default=None, gt=1.0)
    points: int = Field(default=12, ge=2)
    threshold: float = Field(default_factory=lambda: settings.VALIDITY_THRESHOLD, gt=0.0)

    @field_validator("shape")
    @classmethod
    def _anisotropic_only(cls, value: TrapShape) -> TrapShape:
        if value == TrapShape.ISOTROPIC:
            raise ValueError("anisoscan needs a disk or cigar trap")
        return value


class ValidityOptions(OutputOptions):
    format: str = Field(default="text", pattern="^(text|json)$")
    shape: TrapShape = TrapShape.ISOTROPIC
    s: float = Field(default=1.0, ge=1.0)
    n: float = Field(default=1e4, gt=0.0)
    threshold: float = Field(default_factory=lambda: settings.VALIDITY_THRESHOLD, gt=0.0)


class SolveOptions(OutputOptions):
    format: str = Field(default="text", pattern="^(text|json)$")
    shape: TrapShape = TrapShape.ISOTROPIC
    s: float = Field(default=1.0, ge=1.0)
    n: float = Field(default=1e4, gt=0.0)
    t: float = Field(..., gt=0.0)


def load_config_file(path: str) -> Dict[str, str]:
    """Read a key = value config file; keys normalised to option names"""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = dotenv_values(path)
    except Exception as e:
        raise ConfigError(f"cannot parse config file {path}: {str(e)}")

    values = {}
    for key, value in raw.items():
        if value is None:
            continue
        values[key.strip().lower().replace("-", "_")] = value.strip()
    logger.debug(f"Loaded {len(values)} option(s) from {path}")
    return values


def merge_options(model: type, file_values: Dict[str, Any], flags: Dict[str, Any]) -> BaseModel:
    """Build an options model with precedence flags > config file > defaults"""
    fields = model.model_fields
    merged = {}
    for key, value in file_values.items():
        if key in fields:
            merged[key] = value
        else:
            logger.debug(f"Ignoring config key '{key}' for {model.__name__}")
    merged.update({k: v for k, v in flags.items() if v is not None and k in fields})
    return model(**merged)
