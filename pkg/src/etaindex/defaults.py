"""Global numeric defaults shared by all modules.

KERNEL_TOL is the single membership tolerance for "eigenvalue equals zero";
it must be consistent across modules so that nonnegative spectral projections
agree everywhere.
"""

# |lambda| <= KERNEL_TOL counts as a kernel eigenvalue.
KERNEL_TOL = 1e-9

# Minimum distance between a spectral-flow weight and any eigenvalue.
GAP_TOL = 1e-6

# Samples per partition segment when validating a weight; densified x10 on
# the re-validation pass.
SEGMENT_SAMPLES = 64
DENSIFY_FACTOR = 10

# Adaptive bisection depth limit for the partition engine.
MAX_PARTITION_DEPTH = 20

# Weight-ladder shape: number of candidate gaps, search radius around the
# hint, and the sentinel offset appended beyond the extreme sampled values.
LADDER_GAPS = 16
LADDER_RADIUS = 4.0
LADDER_SENTINEL = 0.5

# Default half-width of the Fourier-mode window for cylinder problems.
MODE_WINDOW = 64

# Dyadic detection: denominators up to 2**DYADIC_MAX_LOG2, tolerance below.
DYADIC_MAX_LOG2 = 20
DYADIC_TOL = 1e-9
