"""
Numerical defaults, tolerances and report anchors for the spectral checker.
"""

import math

# Default values of q for the acceptance runs
DEFAULT_Q_RANK_ONE = 1.7
DEFAULT_Q_RANK_TWO = 1.5

# Canonical genus parameters: c = CANONICAL_C_SLOPE / q + CANONICAL_C_OFFSET
CANONICAL_C_SLOPE = 0.8
CANONICAL_C_OFFSET = 0.2
ADDITIVE_C = 0.4
GENUS_ONE_ANGLE = 1.1

# Quadrature
DEFAULT_NODES = 512
ORBIT_NODES = 2048
LINE_NODES = 256
TRUNC_HEIGHT = 8.0
MAX_TRUNC_HEIGHT = 32.0
DEFAULT_OFFSET = (math.sqrt(5.0) - 1.0) / 2.0 * 2.0 * math.pi
DEFAULT_SHIFT = 1.5
ALTERNATE_SHIFT = 2.0
LAURENT_RADIUS = 0.05
LAURENT_NODES = 64
TAIL_DECAY = 1e-14

# Cancellation limits
LIMIT_RADIUS = 1e-2
LIMIT_LEVELS = 3
LIMIT_POINTS = 8
COINCIDENCE_TOL = 1e-8
GENERIC_DIRECTION = (1.0, math.sqrt(2.0) - 1.0, math.pi - 3.0)

# Tolerances
COLLISION_TOL = 1e-6
DIVERGENCE_TOL = 1e-6
TOL_RANK_ONE = 1e-9
TOL_RANK_TWO = 1e-8
TOL_G2 = 1e-7
TOL_REGRESSION = 1e-9
TOL_REGULAR = 1e-10
TOL_SHIFT = 1e-10
TOL_ADDITIVE = 1e-8
TOL_POSITIVITY = 1e-10

# Test function basis
DEFAULT_PAIRS = 10
POSITIVITY_SAMPLES = 100
DEFAULT_DEGREE = 3
DEFAULT_SEED = 0

# Retry settings for pole collisions on quadrature nodes
MAX_RETRIES = 3
INITIAL_OFFSET_STEP = 1e-3
MAX_OFFSET_STEP = 1e-1

REPORT_SCHEMA_VERSION = 1
DEFAULT_TIMEZONE = 'UTC'

# Descriptive anchors cited by every suite case
ANCHORS = {
    'main': 'contour pairing equals orbit sum',
    'heights': 'heights versus exponents identity',
    'selfdual': 'self-dual multiplicity spaces',
    'slice': 'slice character identity',
    'w_of_e': 'surviving Weyl cosets',
    'strata': 'Springer strata dimensions',
    'characters': 'component-group character data',
    'idempotent': 'Langlands projector idempotency',
    'shift': 'contour shift independence',
    'scissor': 'scissor identity for the line',
    'density': 'density forms agree',
    'symmetric_projector': 'symmetric projector form',
    'g2_subregular': 'G2 subregular closed forms',
    'regular': 'regular orbit closed form',
    'residue': 'unit residues of the regular density',
    'additive': 'cohomological identity',
    'bridge': 'q to 1 limit bridge',
    'positivity': 'positivity of orbit terms',
    'langlands_g2': 'additive G2 discrete-point template',
}
