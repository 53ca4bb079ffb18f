import os
import time
import logging

import numpy as np
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

DEFAULT_SAMPLES = 500_000
DEFAULT_LIST_LIMIT = 1000

VALID_MODES = ("inverse-ts", "peanuts")
VALID_OUTPUTS = ("json", "csv")
VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# --------------- Run defaults


def get_default_samples() -> int:
    """Get the sample budget from environment or default."""
    return int(os.getenv("SHADOWCOUNT_SAMPLES", str(DEFAULT_SAMPLES)))


def get_default_mode() -> str:
    """Get the estimator mode from environment or default."""
    return os.getenv("SHADOWCOUNT_MODE", "inverse-ts").lower()


def get_default_output() -> str:
    """Get the report format from environment or default."""
    return os.getenv("SHADOWCOUNT_OUTPUT", "json").lower()


def get_default_list_limit() -> int:
    """Get the maximum number of listed instances from environment or default."""
    return int(os.getenv("SHADOWCOUNT_LIST_LIMIT", str(DEFAULT_LIST_LIMIT)))


def get_default_threads() -> int:
    """Get the number of sampling batches run concurrently."""
    return int(os.getenv("SHADOWCOUNT_THREADS", "1"))


def get_log_level() -> str:
    """Get the log level from environment or default."""
    return os.getenv("SHADOWCOUNT_LOG_LEVEL", "INFO").upper()


def tracing_enabled() -> bool:
    """Whether OpenTelemetry spans should be recorded."""
    return os.getenv("SHADOWCOUNT_TRACING", "").lower() in ("1", "true", "yes", "on")


# --------------- Random streams


def generate_seed() -> int:
    """Derive a fresh 63-bit seed from the clock."""
    seed = time.time_ns() & ((1 << 63) - 1)
    logger.info(f"No seed supplied, using time-derived seed {seed}")
    return seed


def make_stream(seed: int, batch_index: int = 0) -> np.random.Generator:
    """
    Create the random stream for one sampling batch.

    Streams use the counter-based Philox generator keyed by (seed, batch_index),
    so a fixed seed and batch count always reproduce the same draws.
    """
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")
    sequence = np.random.SeedSequence([seed, batch_index])
    return np.random.Generator(np.random.Philox(sequence))


# --------------- Configuration Validation


def validate_environment() -> None:
    """Validate the SHADOWCOUNT_* variables that are set."""
    problems = []

    for var in ("SHADOWCOUNT_SAMPLES", "SHADOWCOUNT_LIST_LIMIT", "SHADOWCOUNT_THREADS"):
        value = os.getenv(var)
        if value is None:
            continue
        try:
            if int(value) < 1:
                problems.append(f"{var} must be >= 1")
        except ValueError:
            problems.append(f"{var} is not an integer")

    if os.getenv("SHADOWCOUNT_MODE") and get_default_mode() not in VALID_MODES:
        problems.append(f"SHADOWCOUNT_MODE must be one of {', '.join(VALID_MODES)}")
    if os.getenv("SHADOWCOUNT_OUTPUT") and get_default_output() not in VALID_OUTPUTS:
        problems.append(f"SHADOWCOUNT_OUTPUT must be one of {', '.join(VALID_OUTPUTS)}")
    if os.getenv("SHADOWCOUNT_LOG_LEVEL") and get_log_level() not in VALID_LOG_LEVELS:
        problems.append(f"SHADOWCOUNT_LOG_LEVEL must be one of {', '.join(VALID_LOG_LEVELS)}")

    if problems:
        raise ValueError(f"Invalid environment variables: {'; '.join(problems)}")

    logger.debug("Environment validation passed")
