"""
Audit Configuration
Documented defaults for every threshold, with optional JSON overrides
"""

import json
import logging
from dataclasses import dataclass, replace, asdict
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import ConfigError, first_validation_message

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AuditSettings:
    """Thresholds and constants used across the checks"""
    overfit_threshold: float = 0.1
    leak_threshold: float = 0.99
    leak_margin: float = 0.05
    imbalance_threshold: float = 0.1
    probability_tolerance: float = 1e-6
    quantile_bins: int = 16
    cross_entropy_floor: float = 1e-12
    max_listed_rows: int = 100
    monitoring_grace_days: int = 30
    certificate_validity_years: int = 3
    recertification_path: str = 'reduced'  # reduced, full

    def to_dict(self):
        return asdict(self)


class SettingsOverride(BaseModel):
    """Shape of the --config override document"""
    model_config = ConfigDict(extra='forbid')

    overfit_threshold: Optional[float] = Field(default=None, ge=0)
    leak_threshold: Optional[float] = Field(default=None, ge=0, le=1)
    leak_margin: Optional[float] = Field(default=None, ge=0, le=1)
    imbalance_threshold: Optional[float] = Field(default=None, gt=0, lt=1)
    probability_tolerance: Optional[float] = Field(default=None, ge=0)
    quantile_bins: Optional[int] = Field(default=None, ge=2)
    cross_entropy_floor: Optional[float] = Field(default=None, gt=0, lt=1)
    max_listed_rows: Optional[int] = Field(default=None, ge=1)
    monitoring_grace_days: Optional[int] = Field(default=None, ge=0)
    certificate_validity_years: Optional[int] = Field(default=None, ge=1)
    recertification_path: Optional[Literal['reduced', 'full']] = None


DEFAULT_SETTINGS = AuditSettings()


def load_settings(path: Optional[Path] = None) -> AuditSettings:
    """Merge an optional JSON override file over the defaults"""
    if path is None:
        return DEFAULT_SETTINGS

    try:
        raw = json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read settings file {path}: {e}")

    try:
        override = SettingsOverride.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"invalid settings file {path}: {first_validation_message(e)}")

    changes = override.model_dump(exclude_none=True)
    logger.info(f"Loaded {len(changes)} setting override(s) from {path}")
    return replace(DEFAULT_SETTINGS, **changes)
