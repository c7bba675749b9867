import logging
import os
from dataclasses import dataclass, field

from dotenv import load_dotenv

from .errors import ConfigError

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_SEED = 2024
DEFAULT_SCAN_WORKERS = 4


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{raw}'") from None


@dataclass
class Config:
    """Configuration settings for homoconn runs"""

    # Sampling settings
    SEED: int = field(default_factory=lambda: _env_int("HOMOCONN_SEED", DEFAULT_SEED))
    TRIALS: int = 100  # Samples per randomized battery

    # Numerical thresholds
    TOLERANCE: float = 1e-8  # Einstein residual, membership and span checks
    RANK_RCOND: float = 1e-9  # Relative singular-value cutoff of the solver
    PIVOT_TOL: float = 1e-9  # Row-echelon pivot cutoff

    # Execution
    SCAN_WORKERS: int = field(
        default_factory=lambda: _env_int("HOMOCONN_SCAN_WORKERS", DEFAULT_SCAN_WORKERS)
    )
    LOG_LEVEL: str = field(
        default_factory=lambda: os.getenv("HOMOCONN_LOG_LEVEL", "WARNING")
    )


def load_config() -> Config:
    """Config from the environment; malformed integers fall back to the defaults."""
    try:
        return Config()
    except ConfigError as e:
        logger.warning("%s; using defaults", e)
        return Config(SEED=DEFAULT_SEED, SCAN_WORKERS=DEFAULT_SCAN_WORKERS)


config = load_config()
