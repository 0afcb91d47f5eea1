# ==============================================================================
# CONFIGURATION
# ==============================================================================
# Values come from the environment, optionally seeded from a .env file in the
# working directory. Each value is read once and cached; reset_config() drops
# the cache (used by tests after monkeypatching the environment).
#
#   HYPSTRETCH_TOL          base comparison tolerance (default 1e-9)
#   HYPSTRETCH_LOG_LEVEL    logging level name (default WARNING)
#   HYPSTRETCH_SAMPLES      point pairs for sampled Lipschitz checks (default 2000)
#   HYPSTRETCH_MAX_UNROLL   deck-translation cap for the pentagon cover (default 64)
#   HYPSTRETCH_SEED         seed for every random sampler (default 12345)
# ==============================================================================

import logging
import os
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_SAMPLES = 2000
DEFAULT_MAX_UNROLL = 64
DEFAULT_SEED = 12345

_ENV_LOADED = False
_TOLERANCE: Optional[float] = None
_SAMPLES: Optional[int] = None
_MAX_UNROLL: Optional[int] = None
_SEED: Optional[int] = None


def _ensure_env():
    global _ENV_LOADED
    if not _ENV_LOADED:
        load_dotenv()
        _ENV_LOADED = True


def _read_number(name: str, default, cast):
    _ensure_env()
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = cast(raw.strip())
    except ValueError:
        logger.warning(f"Ignoring malformed {name}={raw!r}, using {default}")
        return default
    if value <= 0:
        logger.warning(f"Ignoring non-positive {name}={raw!r}, using {default}")
        return default
    return value


def get_tolerance() -> float:
    """Base absolute tolerance for point and residual comparisons."""
    global _TOLERANCE
    if _TOLERANCE is None:
        _TOLERANCE = _read_number("HYPSTRETCH_TOL", DEFAULT_TOLERANCE, float)
    return _TOLERANCE


def get_sample_count() -> int:
    global _SAMPLES
    if _SAMPLES is None:
        _SAMPLES = _read_number("HYPSTRETCH_SAMPLES", DEFAULT_SAMPLES, int)
    return _SAMPLES


def get_max_unroll() -> int:
    global _MAX_UNROLL
    if _MAX_UNROLL is None:
        _MAX_UNROLL = _read_number("HYPSTRETCH_MAX_UNROLL", DEFAULT_MAX_UNROLL, int)
    return _MAX_UNROLL


def get_seed() -> int:
    global _SEED
    if _SEED is None:
        _SEED = _read_number("HYPSTRETCH_SEED", DEFAULT_SEED, int)
    return _SEED


def get_log_level() -> str:
    _ensure_env()
    return (os.environ.get("HYPSTRETCH_LOG_LEVEL") or "WARNING").strip().upper()


def reset_config():
    """Forgets cached values so the next getter call re-reads the environment."""
    global _TOLERANCE, _SAMPLES, _MAX_UNROLL, _SEED
    _TOLERANCE = None
    _SAMPLES = None
    _MAX_UNROLL = None
    _SEED = None
