"""Torus rotations, random twist walks, Lebesgue sampling and the exceptional-set scans."""
from .sampler import (
    acceptance_rate,
    goldman_batch,
    goldman_sample,
    polytope_volume_qmc,
    random_alpha,
    random_regular_point,
    task_rng,
)
from .torus import TorusOrbit, battery_integrals, birkhoff_tolerance, star_discrepancy, torus_rotate
from .walk import (
    OBS_NAMES,
    WalkState,
    WalkSummary,
    advance,
    agreement,
    default_twists,
    goldman_reference,
    orbit_walk,
    start_walk,
    summarize,
)
from .appendix import (
    APPENDIX_EQUATIONS,
    PairConfig,
    PolynomialReport,
    appendix_polynomial,
    identity_residuals,
    leading_coefficient_closed_form,
    main_relation_residual,
    pair_config,
)
from .scans import (
    ScanReport,
    claim_scan_D1B2,
    degenerate_pi_point,
    engineered_eta_point,
    eta_relation_check,
    upsilon_gamma_fit,
)

__all__ = [
    "acceptance_rate",
    "goldman_batch",
    "goldman_sample",
    "polytope_volume_qmc",
    "random_alpha",
    "random_regular_point",
    "task_rng",
    "OBS_NAMES",
    "WalkState",
    "WalkSummary",
    "advance",
    "agreement",
    "default_twists",
    "goldman_reference",
    "orbit_walk",
    "start_walk",
    "summarize",
    "APPENDIX_EQUATIONS",
    "PairConfig",
    "PolynomialReport",
    "appendix_polynomial",
    "identity_residuals",
    "leading_coefficient_closed_form",
    "main_relation_residual",
    "pair_config",
    "ScanReport",
    "claim_scan_D1B2",
    "degenerate_pi_point",
    "engineered_eta_point",
    "eta_relation_check",
    "upsilon_gamma_fit",
    "TorusOrbit",
    "battery_integrals",
    "birkhoff_tolerance",
    "star_discrepancy",
    "torus_rotate",
]
