# ==============================================================================
# LOGGING SETUP
# ==============================================================================

import logging
from typing import Optional

from hypstretch.utils.config import get_log_level

_CONFIGURED = False

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None):
    """Configures the root logger once; later calls only adjust the level."""
    global _CONFIGURED
    name = (level or get_log_level()).upper()
    numeric = getattr(logging, name, logging.WARNING)
    if not _CONFIGURED:
        logging.basicConfig(level=numeric, format=LOG_FORMAT)
        _CONFIGURED = True
    logging.getLogger().setLevel(numeric)
