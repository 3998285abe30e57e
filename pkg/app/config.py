"""
Laboratory Configuration
Environment-backed defaults shared by every command
"""

import os
import math
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Default working precision (bits) for ball arithmetic; the only environment knob
DEFAULT_PRECISION = int(os.getenv("STURMLAB_PRECISION", "128"))

# Precision escalation stops here (bits)
MAX_PRECISION = 4096

# Modulation / cocycle parameters, c > epsilon > 0
DEFAULT_EPSILON = 0.1
DEFAULT_C = math.log(5 / 4)
DEFAULT_ALPHA = "gold2"

# Depth limits
DEFAULT_CLASSIFY_DEPTH = 60
DEFAULT_CONTROL_DEPTH = 64
MAX_CONTROL_DEPTH = 2048
DEFAULT_PERIOD_CAP = 16
DEFAULT_SWEEP_PERIOD = 14

# delta(n) enclosures must carry this many correct leading bits
DELTA_RELATIVE_BITS = 16

# Staircase series truncation floor and inverse target radius (as powers of two)
MIN_TRUNCATION_DEPTH = 200
INVERSE_RADIUS_BITS = 80
H_RADIUS_BITS = 60

# Double-mode tolerances
DET_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
BOUND_TOLERANCE = 1e-9
ATTAINMENT_TOLERANCE = 1e-3

# Estimator block size for pairwise reduction (power of two)
REDUCTION_BLOCK = 64

# Non-uniform hyperbolicity identity target radius
IDENTITY_RADIUS = 1e-20


def get_default_precision() -> int:
    """Default precision in bits, clamped to the supported range"""
    return max(32, min(DEFAULT_PRECISION, MAX_PRECISION))
