# config.py
import logging
import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load .env file so TORSIONKIT_* variables are available
load_dotenv()

DEFAULT_TRIALS = 25
DEFAULT_SEED = 0
DEFAULT_ORACLE_MAX_DIM = 12
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class Settings:
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    log_level: str = "WARNING"
    oracle_max_dim: int = DEFAULT_ORACLE_MAX_DIM


def _int_from_env(name: str, default: int, minimum: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer, using default {default}.")
        return default
    if value < minimum:
        logger.warning(f"{name}={value} is below {minimum}, using default {default}.")
        return default
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Reads the TORSIONKIT_* environment once and caches the result."""
    level = os.getenv("TORSIONKIT_LOG_LEVEL", "WARNING").upper()
    if level not in logging.getLevelNamesMapping():
        logger.warning(f"Unknown TORSIONKIT_LOG_LEVEL {level!r}, falling back to WARNING.")
        level = "WARNING"
    return Settings(
        trials=_int_from_env("TORSIONKIT_TRIALS", DEFAULT_TRIALS, 1),
        seed=_int_from_env("TORSIONKIT_SEED", DEFAULT_SEED, 0),
        log_level=level,
        oracle_max_dim=_int_from_env("TORSIONKIT_ORACLE_MAX_DIM", DEFAULT_ORACLE_MAX_DIM, 1),
    )


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(level=level or get_settings().log_level, format=LOG_FORMAT)
