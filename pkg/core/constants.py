"""
core/constants.py
Numerical rails and system constants.
These values are NOT configurable via environment; per-run knobs live in the
pydantic config models next to the code that consumes them.
"""

from typing import Final

TOOL_VERSION: Final[str] = "0.3.0"

# ---------------------------------------------------------------------------
# Field evaluation
# ---------------------------------------------------------------------------
GRADIENT_UNDEFINED_NORM: Final[float] = 1e-6    # raw |grad| below this => medial locus
CSG_FD_STEP_REL: Final[float] = 1e-4            # x diag, central differences on CSG trees
GRID_FD_STEP_CELLS: Final[float] = 0.5          # x cell_size, central differences on grids
MAX_SHAPE_DEPTH: Final[int] = 32
PROJECTION_TOL_REL: Final[float] = 1e-6         # x diag, |phi(foot)| on exact fields

# ---------------------------------------------------------------------------
# Medial oracle
# ---------------------------------------------------------------------------
ORACLE_TOL_REL: Final[float] = 1e-6             # x diag
ORACLE_SLACK_REL: Final[float] = 1e-12          # x diag, rounding allowance on the spoke identity
ORACLE_MAX_DOUBLINGS: Final[int] = 60
ORACLE_BISECTIONS: Final[int] = 60
ORACLE_R_MAX_DIAGS: Final[float] = 2.0          # default r_max = 2 x diag
EXCLUSION_BAND_REL: Final[float] = 1e-2         # x diag, orthogonality exclusion delta
ORTHOGONALITY_FD_REL: Final[float] = 1e-4       # x diag

SIDE_INTERIOR: Final[str] = "interior"
SIDE_EXTERIOR: Final[str] = "exterior"

# ---------------------------------------------------------------------------
# Neural field
# ---------------------------------------------------------------------------
FOURIER_BANDS: Final[int] = 64
FOURIER_ALPHA: Final[float] = 1e-3
SOFTPLUS_BETA: Final[float] = 100.0
BACKBONE_LAYERS: Final[int] = 6
HEAD_WIDTH: Final[int] = 64
MINSURFACE_SHARPNESS: Final[float] = 100.0
CURVATURE_STEP_REL: Final[float] = 1e-3         # x diag
GEOMETRIC_INIT_RADIUS_REL: Final[float] = 0.5   # initial phi ~ |x| - 0.5 diag

LOSS_WEIGHTS: Final[dict[str, float]] = {
    "surface": 1e4,
    "normal": 10.0,
    "maximal": 1e2,
    "inscribed": 5e2,
    "orthogonal": 3e-2,
    "eikonal": 1.0,
    "minsurface": 1.0,
    "curvature": 1e-1,   # scheduled, see neural.losses.curvature_weight
    "gradient": 1.0,
}
LOSS_TERMS: Final[tuple[str, ...]] = tuple(LOSS_WEIGHTS)
MEDIAL_LOSS_TERMS: Final[tuple[str, ...]] = ("maximal", "inscribed", "orthogonal")

# ---------------------------------------------------------------------------
# Tracing / shading
# ---------------------------------------------------------------------------
TRACE_EPSILON_REL: Final[float] = 1e-4          # x diag
TRACE_T_MAX_DIAGS: Final[float] = 4.0
TRACE_MAX_ITERS: Final[int] = 256
MFAO_A: Final[float] = 1.5
MFAO_P: Final[float] = 0.2
AMBIENT_STRENGTH: Final[float] = 0.25
BACKGROUND_RGB: Final[tuple[int, int, int]] = (24, 26, 32)

STATUS_HIT: Final[str] = "hit"
STATUS_MISS: Final[str] = "miss"
STATUS_BUDGET: Final[str] = "budget_exhausted"

# ---------------------------------------------------------------------------
# Proxies
# ---------------------------------------------------------------------------
FSS_EPSILON_REL: Final[float] = 0.05            # x diag
FSS_DEFAULT_SELECT: Final[int] = 64
DEDUP_TOL_REL: Final[float] = 1e-5              # x diag
REJECTION_MIN_ACCEPTANCE: Final[float] = 1e-3
REJECTION_MAX_TRIALS: Final[int] = 1_000_000

KIND_MEDIAL: Final[str] = "medial"
KIND_TANGENT: Final[str] = "tangent"
KIND_UNIFORM: Final[str] = "uniform"
KIND_SDF_GRID: Final[str] = "sdf_grid"

# ---------------------------------------------------------------------------
# CLI exit codes
# ---------------------------------------------------------------------------
EXIT_OK: Final[int] = 0
EXIT_RUNTIME: Final[int] = 1
EXIT_BAD_INPUT: Final[int] = 2
