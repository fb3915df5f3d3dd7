"""Distributed identity testing under local information constraints with a
limited budget of shared random bits.

Public surface: core domain types, the seeded domain-compression primitive,
certified deterministic amplification, constrained private-coin testers, the
full shared-seed protocol, and the numerical lower-bound toolkit.
"""

from .core import (
    Channel,
    Comm,
    ConstraintSpec,
    Distribution,
    Ldp,
    SeedBudget,
    Verdict,
    is_ldp,
    l2_distance,
    load_distribution,
    pad_domain,
    pad_sample,
    pad_to_pow2,
    save_distribution,
    tv_distance,
)
from .codebook import Codebook, CertReport, build_codebook, certify_codebook, isometry_gap
from .compression import DcmMap, apply_dcm, build_dcm, dcm_distortion, push_forward
from .amplifier import AmplifierMaps, build_amplifier, mixing_check, neighbors
from .testers import (
    HadamardScheme,
    centralized_identity_test,
    hadamard_scheme,
    ldp_hadamard_channel,
    ldp_test,
    simulate_and_infer_encode,
    simulate_and_infer_test,
)
from .bounds import (
    FluctuationConfig,
    HMatrix,
    bilinear_identity_check,
    chi2_fluctuation,
    h_matrix,
    norm_bound_audit,
    nuclear_norm,
    paninski_dist,
    sample_lb,
)
from .protocol import (
    ProtocolConfig,
    required_players,
    run_protocol,
    universality_audit,
)

__version__ = "0.1.0"
