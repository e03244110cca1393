"""
Configuration constants for the graph-state verifier.

Centralizes all configuration to avoid duplication and enable easy customization.
A few capacity and runtime values can be overridden from the environment
(or a `.env` file in the working directory).
"""

import os

from dotenv import load_dotenv

load_dotenv()

# =============================================================================
# Simulation Capacity
# =============================================================================

QUBIT_CAP = int(os.getenv("GSV_QUBIT_CAP", "20"))               # max vertices for |G>
DIMENSION_CAP = int(os.getenv("GSV_DIMENSION_CAP", str(2**20)))  # max total Hilbert dimension

# =============================================================================
# Numerical Tolerances
# =============================================================================

ALGEBRAIC_TOL = 1e-12     # hermiticity, involution, normalization
PHYSICAL_TOL = 1e-10      # expectation values, imaginary residue
COLLAPSE_TOL = 1e-14      # smallest branch norm we are willing to collapse onto
AUDIT_TOL = 1e-8          # selftest residuals in exact mode
EXTRACTION_TOL = 1e-9     # 1 - fidelity allowed for honest extraction
STATISTICAL_SIGMAS = 4.0  # band used when expectations come from sampling

# =============================================================================
# Classical Oracle
# =============================================================================

ORACLE_BIT_CAP = 24           # 4 symbols per vertex, so at most 6 vertices
ORACLE_CHUNK_SIZE = 1 << 20   # assignments evaluated per numpy batch

# =============================================================================
# Protocol / Statistics
# =============================================================================

DEFAULT_CONFIDENCE = 2 / 3          # completeness target for the Hoeffding count
HOEFFDING_TRIALS_CAP = 10_000_000
CI_LEVEL = 0.95
CALIBRATION_TRIALS = 2000           # honest CALCULATE estimate when not deterministic
CALIBRATION_SPAWN_KEY = 2**32       # above every trial index, so calibration seeds never repeat one
PATTERN_EXHAUSTIVE_LIMIT = 10       # enumerate every prefix up to this many vertices
PATTERN_SAMPLED_PREFIXES = 256

# =============================================================================
# Runtime
# =============================================================================

DEFAULT_WORKERS = int(os.getenv("GSV_WORKERS", "1"))

# =============================================================================
# Logging Configuration
# =============================================================================

LOG_DIR = os.getenv("GSV_LOG_DIR", "logs")
LOG_KEEP_RECENT = 10  # Keep last 10 log files
LOG_PREFIX = "graphstate_verifier"

# =============================================================================
# Record Streams
# =============================================================================

RECORD_SCHEMA_VERSION = "1.0.0"
