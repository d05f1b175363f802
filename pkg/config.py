# Configuration for the Holoscheme approximation lab
# ==================================================
#
# Every value below is a default. Override through the environment or a
# .env file in the working directory, for example:
#
#   Windows:   set HOLOSCHEME_HORIZON=1024
#   Linux/Mac: export HOLOSCHEME_HORIZON=1024

import os

from dotenv import load_dotenv

load_dotenv()

# Truncation degree N of every space
DEFAULT_HORIZON = int(os.getenv("HOLOSCHEME_HORIZON", "512"))

# SupCircle grid size is oversampling * (deg f + 1)
DEFAULT_OVERSAMPLING = int(os.getenv("HOLOSCHEME_OVERSAMPLING", "16"))

# H(b) working horizon W = factor * horizon
DEFAULT_WORKING_FACTOR = int(os.getenv("HOLOSCHEME_WORKING_FACTOR", "4"))

# Pass threshold for the |alpha_n^(1/n) - 1| trend check
ADMISSIBILITY_THRESHOLD = float(os.getenv("HOLOSCHEME_ADMISSIBILITY_THRESHOLD", "0.05"))

DEFAULT_SEED = int(os.getenv("HOLOSCHEME_SEED", "0"))

LOG_LEVEL = os.getenv("HOLOSCHEME_LOG_LEVEL", "WARNING")

# Degree from which sup-norm sampling uses the FFT path instead of Horner
FFT_THRESHOLD = int(os.getenv("HOLOSCHEME_FFT_THRESHOLD", "64"))

# Numerical tolerances
HERMITIAN_TOL = 1e-12
CONTRACTIVE_SLACK = 1e-12
MATE_IDENTITY_TOL = 1e-8
# np.roots splits a double root on the circle by about sqrt(eps) ~ 1.5e-8,
# so pairing at 1e-8 would reject the exact boundary roots it exists for
ROOT_PAIRING_TOL = 1e-6
TOEPLITZ_CONDITION_CEILING = 1e12
DENSITY_FLOOR = -1e6
DENSITY_LEVELS = 4
DENSITY_STABILITY_TOL = 1e-2
TAIL_NEGLIGIBLE_RATIO = 0.01
TAIL_UNCONTROLLED_RATIO = 0.10
MEMBERSHIP_TAIL_TOL = 1e-6
BOUNDED_GROWTH_TOL = 0.02

# Lebesgue constant quadrature: nodes per unit of (n + 1)
LEBESGUE_POINTS_PER_DEGREE = 64
