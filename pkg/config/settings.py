"""
Application settings and configuration constants.
"""
import os
from enum import Enum
from typing import Dict, List

from dotenv import load_dotenv

load_dotenv()


class Command(Enum):
    """Enumeration of experiment commands."""
    SAMPLE = "sample"
    RESAMPLE = "resample"
    VERIFY_DLR = "verify-dlr"
    VERIFY_IDENTITY = "verify-identity"
    VERIFY_BOUNDS = "verify-bounds"
    PARTITION = "partition"
    STATS_DISCREPANCY = "stats-discrepancy"
    STATS_RIGIDITY = "stats-rigidity"
    STATS_CAMPBELL = "stats-campbell"
    TRUNCATION = "truncation"


class InteractionKind(Enum):
    """Pair interaction selector."""
    NON_PERIODIC = "non-periodic"
    PERIODIC = "periodic"


class PartitionMethod(Enum):
    """How a partition function value was obtained."""
    EXACT = "exact"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


# Commands that need Q_{n,beta} samples before running their diagnostics
SAMPLING_COMMANDS = [
    Command.SAMPLE,
    Command.RESAMPLE,
    Command.VERIFY_DLR,
    Command.STATS_DISCREPANCY,
    Command.STATS_RIGIDITY,
    Command.TRUNCATION,
]

# Result CSV header (one row per test and parameter point)
CSV_COLUMNS: List[str] = [
    "test", "n", "beta", "window_lo", "window_hi", "param",
    "mean", "std_error", "n_samples", "pass",
]

# Statistical acceptance is two-sided at this many standard errors
SE_MULTIPLIER = 3.0

# Burn-in is BURN_IN_SWEEPS sweeps of n proposals each
BURN_IN_SWEEPS = 10_000

# Gibbs-kernel chain length per interior particle
KERNEL_STEPS_PER_POINT = 200

# Interior resamples per exterior sample in the paired DLR estimator
KERNEL_RESAMPLES = 4

# Metropolis step-size tuning window and target acceptance band
TUNING_BATCH = 100
TARGET_ACCEPTANCE: Dict[str, float] = {"low": 0.3, "high": 0.5}

# Brute-force W1 oracle refuses anything larger
MAX_BRUTEFORCE_POINTS = 8

# Default tolerance per command when the config does not set one
DEFAULT_TOLERANCES: Dict[Command, float] = {
    Command.PARTITION: 1e-3,
    Command.VERIFY_IDENTITY: 1e-9,
    Command.VERIFY_BOUNDS: 1e-10,
    Command.TRUNCATION: 1e-8,
}


def get_workers() -> int:
    """Get default worker count for parallel chains."""
    return max(1, int(os.getenv("LOGGAS_WORKERS", "1")))


def get_output_dir() -> str:
    """Get the root directory under which run directories are created."""
    return os.getenv("LOGGAS_OUTPUT_DIR", "runs")


def get_log_level() -> str:
    """Get logging level name."""
    return os.getenv("LOGGAS_LOG_LEVEL", "INFO").upper()


def get_default_seed() -> int:
    """Get root seed used when neither config nor flags provide one."""
    return int(os.getenv("LOGGAS_SEED", "20170101"))


def get_tuple_cap() -> int:
    """Get the per-sample cap on enumerated Campbell tuples."""
    return int(os.getenv("LOGGAS_TUPLE_CAP", "1000000"))


def get_se_threshold() -> float:
    """Get the maximum admissible standard error for the smooth DLR statistic."""
    return float(os.getenv("LOGGAS_SE_THRESHOLD", "0.01"))
