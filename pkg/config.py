import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

# Master seed and outer radius r of the ball B_c(0, r) the functions live on
DEFAULT_SEED = int(os.getenv("REMEZ_SEED", "20240917"))
DEFAULT_RADIUS = float(os.getenv("REMEZ_RADIUS", "2.0"))

# Thread pool size for line / config fan-out (1 = serial)
MAX_WORKERS = int(os.getenv("REMEZ_WORKERS", "4"))

LOG_LEVEL = os.getenv("REMEZ_LOG_LEVEL", "WARNING")

# Relative slack on every pass/fail verdict
DEFAULT_SLACK = float(os.getenv("REMEZ_SLACK", "1e-6"))

# Analytic expressions
COMPOSE_SERIES_LENGTH = 64
CAUCHY_DERIVATIVE_RADIUS = 0.05
CAUCHY_DERIVATIVE_NODES = 32
LINE_TOLERANCE = 1e-12

# Disk sup norms / zero counting
DISK_SUP_SAMPLES = 1024
MIN_DISK_SUP_SAMPLES = 64
QUADRATURE_NODES = 1024
QUADRATURE_CAP = 2 ** 20
WINDING_TOLERANCE = 1e-6
CONTOUR_ZERO_THRESHOLD = 1e-9
RADIUS_PERTURBATIONS = [1e-3, -1e-3, 2e-3, -2e-3, 3e-3]
FD_STEP = 1e-5                # relative to radius, 4th-order central differences

# Valency sampling
VALENCY_GRID_SIDE = 32        # 32 x 32 polar grid -> 1024 image values
VALENCY_UNIFORM_DRAWS = 512
VALENCY_JITTER = 1e-4         # relative to image bounding-box diameter
CONSTANT_TOLERANCE = 1e-12

# Taylor coefficients
TAYLOR_MIN_NODES = 256

# Empirical Chebyshev degree
N_SEGMENTS = 64
N_SUBSETS = 16
N_EVAL = 256
MIN_EVAL = 128
MIN_OMEGA_RATIO = 0.05
DEGENERATE_OMEGA_RATIO = 1e-4
MAX_OMEGA_PIECES = 5
N_SHARPNESS_SEGMENTS = 4

# Monte Carlo over convex bodies
N_MC = 20000
MIN_MC = 10000
N_RAY_DIRECTIONS = 64
RAY_SCAN_POINTS = 2048
HALF_MEASURE_EVAL = 4096

# Orlicz norm bisection
ORLICZ_RTOL = 1e-4
ORLICZ_MAX_ITER = 200

# Structural-constant calibration (frozen per r)
CALIBRATION_SEED = 1357
CALIBRATION_MARGIN = 1.5
CALIBRATION_FAMILY_SIZE = 6

# Complex lines per valency / Bernstein-index estimate
N_LINES = 32
N_SHIFTS = 20


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run needs besides the function itself."""

    seed: int = DEFAULT_SEED
    r: float = DEFAULT_RADIUS
    n_lines: int = N_LINES
    n_segments: int = N_SEGMENTS
    n_subsets: int = N_SUBSETS
    n_mc: int = N_MC
    n_eval: int = N_EVAL
    slack: float = DEFAULT_SLACK
    workers: int = MAX_WORKERS
    output_path: Optional[Path] = None

    def __post_init__(self):
        if not self.r > 1:
            raise ValueError(f"r must exceed 1, got {self.r}")
        if self.n_lines < 1 or self.n_segments < 1 or self.n_subsets < 1:
            raise ValueError("line, segment and subset counts must be positive")
        if self.n_mc < MIN_MC:
            raise ValueError(f"n_mc must be at least {MIN_MC}, got {self.n_mc}")
        if self.n_eval < MIN_EVAL:
            raise ValueError(f"n_eval must be at least {MIN_EVAL}, got {self.n_eval}")
        if self.slack < 0:
            raise ValueError("slack must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
