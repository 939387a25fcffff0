"""Constants list."""
from enum import IntEnum

ENCODING = "utf-8"

DEFAULT_BACKUP_COUNT = 5  # Maximum of 5 backup files
DEFAULT_MAX_BYTES = 10_000_000  # 10MB

APP_NAME = "painleve-gap"
THREADS_ENV_VAR = "PAINLEVE_GAP_THREADS"

CSV_FLOAT_FORMAT = "%.17g"
CSV_HEADER_PREFIX = "# painleve-gap v"

# Airy function evaluation
AIRY_SERIES_MIN = -3.0
AIRY_SERIES_MAX = 2.0
AIRY_ASYMPTOTIC = 9.0
AIRY_TAYLOR_STEP = 0.5
AIRY_UNDERFLOW = 105.0

# Nystrom discretization
DEFAULT_M = 64
MIN_M = 4
TRUNCATION_EPS = 1e-18
JACOBI_PANEL_WIDTH = 1.0

# Boundary value problems
DEFAULT_L = 10.0
DEFAULT_L_PLUS = 10.0
DEFAULT_N_COLLOC = 400
BVP_TOL = 1e-9
BVP_MAX_NODES = 200_000
MIN_L = 8.0
MIN_N_COLLOC = 200

# Lax pair integration
DEFAULT_Z = 20.0
IVP_RTOL = 1e-11
IVP_ATOL = 1e-13
FORMAL_SERIES_TERMS = 40
SEED_SENSITIVITY_TOL = 1e-9
MAX_SEED_ENLARGEMENTS = 4

# Dressing of the omega = 0 transcendent
DRESSING_STEP = 0.02
DRESSING_T_MAX = 8.0
DRESSING_NODES_PER_UNIT = 8
DRESSING_T_SWITCH = 0.0  # below it the transcendent is continued by its own ODE
DRESSING_T_MIN = -6.0  # lowest x - s reached by dressed coupled trajectories
ASYMPTOTIC_SERIES_TERMS = 16

# Coupled system
COUPLED_LEFT = 20.0
COUPLED_RIGHT_MARGIN = 16.0
COUPLED_DENSE_STEP = 0.05
COUPLED_FIT_WINDOW = 3.0  # half width around x = s where v1 is matched to v2

# Integral formulas
X_MAX_OFFSET = 14.0
X_MIN = -20.0
TAIL_TOL = 1e-8
INTEGRAL_PANEL_WIDTH = 0.5
INTEGRAL_PANEL_NODES = 16

# Monte Carlo
MC_BLOCK_SIZE = 250  # samples per independent stream
DEFAULT_MC_N = 200
DEFAULT_MC_SAMPLES = 10_000
DEFAULT_SEED = 20_240_611


class KernelKind(IntEnum):
    """Limiting correlation kernels handled by the package."""

    AIRY = 1
    P34 = 2
    P2 = 3

    @property
    def label(self) -> str:
        """Name used in output tables."""
        if self == KernelKind.AIRY:
            return "airy"
        if self == KernelKind.P34:
            return "p34"
        return "p2"

    def is_soft_edge(self) -> bool:
        """Whether the kernel acts on a semi-infinite interval (s, inf)."""
        return self != KernelKind.P2


class Method(IntEnum):
    """Ways of computing a log-determinant."""

    NYSTROM = 1
    ODE = 2
    HAMILTONIAN = 3
    ASYMPTOTIC = 4

    @property
    def tag(self) -> str:
        """Method tag written to results."""
        return self.name.lower()

    @classmethod
    def from_tag(cls, tag: str) -> "Method":
        """Parse a method tag."""
        return cls[tag.strip().upper()]
