"""Frozen calibrated constants.

The underlying theory fixes these only as unspecified absolute constants; the
values below were measured once at desk scale by demos/calibrate_constants.py
and frozen. Rerun that script to reproduce the measurements.
"""

# Codebook construction: m = 2**C0 * n random binary vectors per block length n.
C0 = 3

# Subset certification: every sampled subset of size ceil((1-C1)*m) must have
# average-Gram lambda_min >= C2. Measured min subset lambda_min at n=64
# (draw seed 2024, 200 subsets) was 0.0948; C2 is 0.8x that, rounded down a
# hair so codebooks certify across block lengths 2..1024 and seeds.
C1 = 0.1
C2 = 0.075
SUBSET_TRIALS = 200
LAMBDA_MAX_CAP = 1.0

# Isometry constant alpha = sqrt(C2) (the certificate's c2 = alpha^2 pairing)
# and the empirically calibrated per-block failure probability at that alpha:
# the fraction of random difference vectors with |x(S_U)| < alpha*||x||_2
# peaked at 0.486 over 1000 draws at n=64, rounded up to 0.5.
ALPHA = C2 ** 0.5
DELTA0 = 0.50

# Deterministic amplification defaults for the protocol layer, relaxed to
# keep the group count d modest at desk scale (d = 41 here): eta must cover
# the measured bad-seed fraction of the compression stage (<= 0.2 for
# sign-pattern alternatives once the domain has 8+ blocks, plus margin).
# The strict pair derived from the calibrated per-block failure
# (eta = 1 - delta0, gamma = 1/24, giving d = 197) stays available behind
# the conservative_amplification flag.
AMP_ETA = 0.35
AMP_GAMMA = 1.0 / 12.0
AMP_ETA_STRICT = 1.0 - DELTA0
AMP_GAMMA_STRICT = 1.0 / 24.0

# Leading constants of the required-player formulas, frozen so that every
# acceptance grid cell meets its error target at n = required_players. The
# formula's (... or 1) caps make some cells' formula value smaller than the
# private-coin path they actually run, so one constant per family must cover
# the worst cell ratio (measured at k=64, eps=0.3, delta=1/12: the l=3
# tester needs ~18k players against a formula unit of 252; the rho=0.5
# tester needs ~250k against a unit of 5689).
C_COMM = 80.0
C_LDP = 50.0

# Centralized-tester sizing: minimum viable per-split sample count is
# C_CENTRAL_VIABLE * sqrt(k) / eps^2 (used by the adaptive split rule).
C_CENTRAL_VIABLE = 8.0
# Same role for the LDP tester: C_LDP_VIABLE * K^{3/2} / gap per split.
C_LDP_VIABLE = 2.0

# Number of median splits used when the sample budget is large enough for
# each split to stay viable: ceil(SPLIT_LOG_FACTOR * ln(1/delta)).
SPLIT_LOG_FACTOR = 18.0
