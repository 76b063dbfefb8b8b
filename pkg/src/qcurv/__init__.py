"""Q-curvature and Gauss-Bonnet-Chern numerics for locally conformally flat metrics.

Metrics are ``g = e^{2w} |dx|^2`` on domains of ``R^n`` (``n`` even, at most 8)
with a radial conformal factor ``w``; axisymmetric fields are supported for
spherical averaging.
"""

from .core import (DEFAULT_QUAD, ConsistencyError, CutoffError, DecompositionError, Dim,
                   DimensionError, DomainError, IntegrabilityError, LevelSetError, LimitError,
                   NotPolyharmonic, OrderError, PreconditionError, QCurvError, QuadratureError,
                   QuadratureSpec, ResolutionError, SchemaError, StructureViolation, make_dim)
from .curvature import (CurvatureFrame, calibration_constants, curvature_frame, curved_laplacian,
                        paneitz_apply, pfaffian, q4_general, q_curvature_lcf, ricci,
                        scalar_curvature, schouten, sigma_k)
from .gbc import (Cutoff, GBCReport, check_hypotheses, f_lambda, gluing_invariance,
                  levelset_identity, multi_end_total, total_q, verify_gbc_rn)
from .kernels import (greens_solve, kernel_G, kernel_II, kernel_log, kernel_table, rv_dot_limits,
                      sphere_mean, verify_lemma2)
from .profiles import (RadialProfile, SphericalField, Term, cylinder_profile, eval_profile,
                       flat_profile, load_profile, round_sphere_profile, w_a_profile)
from .radial import (EndSpec, asymptotic_exponent, basis_decompose, completeness_check,
                     equality_case_check, polyharmonic_basis, radial_delta_power)
from .averaging import (claim2_ratio, spherical_symmetrize, verify_shell_equality,
                        verify_sign_preservation)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_QUAD", "ConsistencyError", "CurvatureFrame", "Cutoff", "CutoffError",
    "DecompositionError", "Dim", "DimensionError", "DomainError", "EndSpec", "GBCReport",
    "IntegrabilityError", "LevelSetError", "LimitError", "NotPolyharmonic", "OrderError",
    "PreconditionError", "QCurvError", "QuadratureError", "QuadratureSpec", "RadialProfile",
    "ResolutionError", "SchemaError", "SphericalField", "StructureViolation", "Term",
    "asymptotic_exponent", "basis_decompose", "calibration_constants", "check_hypotheses",
    "claim2_ratio", "completeness_check", "curvature_frame", "curved_laplacian",
    "cylinder_profile", "equality_case_check", "eval_profile", "f_lambda", "flat_profile",
    "gluing_invariance", "greens_solve", "kernel_G", "kernel_II", "kernel_log", "kernel_table",
    "levelset_identity", "load_profile", "make_dim", "multi_end_total", "paneitz_apply",
    "pfaffian", "polyharmonic_basis", "q4_general", "q_curvature_lcf", "radial_delta_power",
    "ricci", "round_sphere_profile", "rv_dot_limits", "scalar_curvature", "schouten", "sigma_k",
    "sphere_mean", "spherical_symmetrize", "total_q", "verify_gbc_rn", "verify_lemma2",
    "verify_shell_equality", "verify_sign_preservation", "w_a_profile",
]
