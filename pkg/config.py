"""Configuration settings for the index theory workbench."""

import os
from dotenv import load_dotenv

load_dotenv()

# Tool identity
TOOL_NAME = "index-workbench"
TOOL_VERSION = "1.0.0"
SCHEMA_VERSION = 1

# Tolerance profile - override with WORKBENCH_TOLERANCE_PROFILE=strict
TOLERANCE_PROFILE = os.getenv("WORKBENCH_TOLERANCE_PROFILE", "default")

TOLERANCE_PROFILES = {
    "default": {
        "eig_tol": 1e-10,
        "rank_tol": 1e-8,
        "gap_tol": 1e-6,
        "path_step": 1e-2
    },
    "strict": {
        "eig_tol": 1e-12,
        "rank_tol": 1e-10,
        "gap_tol": 1e-5,
        "path_step": 5e-3
    }
}

# Sign convention switch for the torsor symmetry (printed exponent g+g' or Koszul gg')
SYMMETRY_EXPONENT = os.getenv("WORKBENCH_SYMMETRY_EXPONENT", "sum")

# Flips the l=0 tau sign; used only by the mutation smoke test
MUTATE_SIGN = os.getenv("WORKBENCH_MUTATE_SIGN", "0") == "1"

# Clifford construction
N_MAX = 9

# Solver settings
MAX_REFINEMENT_DEPTH = 12
ORACLE_GRID_POINTS = 10_000
ORTHOGONALITY_RESIDUAL = 1e-8

# Suite defaults
DEFAULT_SEED = 1
DEFAULT_TRIALS = 10
REPORT_INDENT = 2

# Suite configurations
SUITE_CONFIGS = {
    "clifford": {
        "description": "Clifford relations, spinor modules, adjacent isomorphisms and cylinder Dirac blocks",
        "trial_factor": 0,
        "ells": [],
        "depends_on": []
    },
    "signs": {
        "description": "Graded line sign calculus and graded torsor groupoid axioms",
        "trial_factor": 1,
        "ells": list(range(8)),
        "depends_on": []
    },
    "torsors": {
        "description": "Determinant, Pfaffian and spectral torsor chart systems and structure isomorphisms",
        "trial_factor": 1,
        "ells": [0, 1, 7],
        "depends_on": ["signs"]
    },
    "bvp": {
        "description": "Cylinder boundary value problems against the grid oracle and the boundary propositions",
        "trial_factor": 1,
        "ells": [0, 1, 3, 7],
        "depends_on": []
    },
    "flow": {
        "description": "Spectral flow along self-adjoint paths against crossing counts",
        "trial_factor": 1,
        "ells": [7],
        "depends_on": ["torsors"]
    },
    "main": {
        "description": "Gluing, disjoint union, direct sum, empty boundary, functoriality and bordism invariance",
        "trial_factor": 1,
        "ells": [0, 1, 2, 3, 4, 7],
        "depends_on": ["torsors", "bvp"]
    }
}

MAIN_SUITES = [
    "gluing",
    "disjoint_union",
    "direct_sum",
    "empty_boundary",
    "functoriality",
    "bordism_index_zero",
    "homotopy"
]

# Logging configuration
LOG_LEVEL = os.getenv("WORKBENCH_LOG_LEVEL", "INFO")
LOG_TO_FILE = os.getenv("WORKBENCH_LOG_TO_FILE", "0") == "1"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
