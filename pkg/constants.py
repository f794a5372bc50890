# constants.py
# Centralized constants: single source of truth
# Used by: matcore, selfcomm, ozfield, fack, obstruct, pipeline

from pathlib import Path

import yaml

# =========================
# PATHS
# =========================

PROJECT_ROOT = Path(__file__).resolve().parent

CONFIG_FILE = PROJECT_ROOT / "config" / "commutator_config.yaml"
SCHEMA_DIR = PROJECT_ROOT / "docs" / "schemas"

# =========================
# LOADERS
# =========================

def load_yaml(path: Path, default=None):
    if path.exists():
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    return default if default is not None else {}


CONFIG = load_yaml(CONFIG_FILE, {})


def _section(name: str) -> dict:
    return CONFIG.get(name) or {}

# =========================
# TOLERANCES
# =========================

TOLERANCES = _section("tolerances")

HERMITIAN_TOL = float(TOLERANCES.get("hermitian", 1e-12))
TRACE_ZERO_TOL = float(TOLERANCES.get("trace_zero", 1e-9))
FIELD_TRACE_ZERO_TOL = float(TOLERANCES.get("field_trace_zero", 1e-10))
RESIDUAL_TOL = float(TOLERANCES.get("residual", 1e-9))
BOUND_SLACK = float(TOLERANCES.get("bound_slack", 1e-9))
UNITARY_TOL = float(TOLERANCES.get("unitary", 1e-10))
RECONSTRUCTION_TOL = float(TOLERANCES.get("reconstruction", 1e-10))
RANK_THRESHOLD = float(TOLERANCES.get("rank_threshold", 1e-8))
PSD_TOL = float(TOLERANCES.get("psd", 1e-10))
SUPPORT_TOL = float(TOLERANCES.get("support", 1e-8))
ORTHOGONALITY_TOL = float(TOLERANCES.get("orthogonality", 1e-10))
FACK_TOL = float(TOLERANCES.get("fack", 1e-8))
GRID_TOL = float(TOLERANCES.get("grid", 1e-8))

# Leading nonzero eigenvector component threshold for the phase convention.
PHASE_THRESHOLD = 1e-8

# =========================
# OZFIELD
# =========================

GRID_ORDER = int(_section("ozfield").get("grid_order", 8))
VERTEX_WORKERS = int(_section("ozfield").get("workers", 1))

# =========================
# FACK
# =========================

NEUMANN_MAX_ITERATIONS = int(_section("neumann").get("max_iterations", 10000))
NEUMANN_TARGET = float(_section("neumann").get("target", 1e-10))

FACK_RUN = {
    "block_rank": 4,
    "blocks": 5,
    "L": 1,
    "K": 1,
    "M": 1,
    "epsilon": 0.25,
    "depth": 4,
    **_section("fack_run"),
}

# =========================
# OBSTRUCT
# =========================

TOWER_K1 = int(_section("obstruct").get("k1", 1))
MAX_EXPLICIT_TERMS = int(_section("obstruct").get("max_explicit_terms", 4096))
MAX_EXPONENT_BITS = int(_section("obstruct").get("max_exponent_bits", 14000))

# =========================
# CLI
# =========================

DEFAULT_SEED = int(_section("cli").get("seed", 0))
DEFAULT_CLI_TOL = float(_section("cli").get("tol", 1e-9))
DEFAULT_REFINE = int(_section("cli").get("refine", 0))

LOG_LEVEL = str(_section("logging").get("level", "INFO"))
LOG_FILE = _section("logging").get("file")
