"""Numerical defaults shared across modules.

Every threshold that influences a reported number lives here so outputs can
quote it.
"""

# Below this |psi| the momentum field is declared singular.
NODE_FLOOR = 1e-12

# Explicit CQHJ stepping: dt <= SAFETY * dx^2 * m / hbar
CFL_SAFETY = 0.2
BLOWUP_FACTOR = 1e6

# Combined stepping: spatial RK4 sub-steps keep max|p| * h / (m dx) below this
ADVECTION_CFL = 0.5
MAX_SPATIAL_SUBSTEPS = 10000

# Nodes held fixed at each edge during explicit CQHJ stepping (stencil half-width).
CLAMPED_EDGE_NODES = 2

# Pointwise collapse integrator
LOCAL_ERROR_TOL = 1e-10
CONVERGENCE_DELTA = 1e-6
SINGULARITY_FACTOR = 100.0
MIN_SUBSTEP_FRACTION = 1e-12

# exp() overflows above this argument
LOG_OVERFLOW = 709.0

# Quadrature nodes for the N(t) normalization of the closed-form wave function
NORMALIZATION_NODES = 4097

# Bisection on the closed form
BISECTION_MAX_ITER = 200
BISECTION_REL_TOL = 1e-15
COLLAPSE_SCAN_POINTS = 64

# Ensembles
DEFAULT_PROBE_PHASE = 0.125  # k * x_probe in units of pi
BINOMIAL_CONFIDENCE = 0.99
VERIFY_TIME_IN_TAU = 20.0

# Scaling fits
MIN_SCALING_POINTS = 8
MIN_SCALING_DECADES = 2.0

# Equivalence sweeps
WINDOW_THRESHOLD = 1e-4

# Output precision (significant digits)
CSV_DIGITS = 9
