"""Settings read from the environment (and a .env file) at import time."""
import os
from dotenv import load_dotenv
import logging
logger = logging.getLogger(__name__)
load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

# Field used when a problem file declares none and no --field flag is given
DEFAULT_FIELD = os.getenv("VALFIELD_DEFAULT_FIELD", '{"kind": "p-adic", "p": 2}')

# Oracle sampling
DEFAULT_SEED = int(os.getenv("VALFIELD_SEED", "0"))
SAMPLE_VAL_MIN = int(os.getenv("VALFIELD_SAMPLE_VAL_MIN", "-5"))
SAMPLE_VAL_MAX = int(os.getenv("VALFIELD_SAMPLE_VAL_MAX", "5"))
SAMPLE_UNITS = os.getenv("VALFIELD_SAMPLE_UNITS", "1,-1,2,3,-3,5,7")
LAURENT_UNITS = os.getenv("VALFIELD_LAURENT_UNITS", "1,-1,1 + t,2 - t,1 + t^2")
ORACLE_RANDOM_POINTS = int(os.getenv("VALFIELD_ORACLE_RANDOM_POINTS", "64"))
MINOR_ORACLE_MAX = int(os.getenv("VALFIELD_MINOR_ORACLE_MAX", "4"))
UNBOUNDED_TARGET = int(os.getenv("VALFIELD_UNBOUNDED_TARGET", "-10"))

# Validate sampling configuration
if SAMPLE_VAL_MIN > SAMPLE_VAL_MAX:
    raise ValueError("VALFIELD_SAMPLE_VAL_MIN must not exceed VALFIELD_SAMPLE_VAL_MAX")
if MINOR_ORACLE_MAX < 1:
    raise ValueError("VALFIELD_MINOR_ORACLE_MAX must be at least 1")
if ORACLE_RANDOM_POINTS < 0:
    raise ValueError("VALFIELD_ORACLE_RANDOM_POINTS must be nonnegative")


def parse_unit_pool(text: str) -> list:
    """Split a comma-separated unit pool setting into its entries"""
    return [item.strip() for item in text.split(",") if item.strip()]
