"""Forward and inverse spectral toolkit for -y'' - omega^2 Q y = lambda y.

Forward side: bound-state data (xi_j, C_j) of the half-line Dirichlet
operator, semiclassical (WKB) estimates, Jost function and the norming
identity.  Inverse side: determinant and kernel-plus-determinant
reconstructions of Q from the data, the small-dispersion determinant
profile, and a benchmark harness for convergence rates.
"""

from .potentials import (Decay, Potential, PotentialError, builtin,
                         eval_potential, make_potential, validate_class)
from .forward import (BracketError, ForwardError, SolverOptions, SpectralData,
                      calogero_bounds, characteristic_values, count_above,
                      count_states, eigenvalues, forward, squarewell_oracle)
from .wkb import (WkbError, WkbProfile, action, predicted_count,
                  spacing_check, theta_plus, turning_point, wkb_spectrum)
from .glkernel import (KernelError, KernelField, coercivity_check, gh_values,
                       phi_diag_derivative, phi_kernel, solve_kernel)
from .jost import JostError, JostSample, jost, jost_bound, jost_identity_check
from .reconstruct import (ReconstructError, ReconstructionResult, ScaledMatrix,
                          SingularFamilyError, build_T, build_W,
                          build_W_derivatives, lax_levermore, logdet_d1,
                          logdet_d2, reconstruct_gl0, reconstruct_glm)
from .rates import (RateError, RateReport, SpectralEstimateReport,
                    convergence_report, lower_envelope, spectral_estimate_check,
                    vitushkin_c_inf, vitushkin_c_l1)

__version__ = "0.1.0"

__all__ = [
    "Decay", "Potential", "PotentialError", "builtin", "eval_potential",
    "make_potential", "validate_class",
    "BracketError", "ForwardError", "SolverOptions", "SpectralData",
    "calogero_bounds", "characteristic_values", "count_above", "count_states",
    "eigenvalues", "forward", "squarewell_oracle",
    "WkbError", "WkbProfile", "action", "predicted_count", "spacing_check",
    "theta_plus", "turning_point", "wkb_spectrum",
    "KernelError", "KernelField", "coercivity_check", "gh_values",
    "phi_diag_derivative", "phi_kernel", "solve_kernel",
    "JostError", "JostSample", "jost", "jost_bound", "jost_identity_check",
    "ReconstructError", "ReconstructionResult", "ScaledMatrix", "build_T",
    "build_W", "build_W_derivatives", "lax_levermore", "logdet_d1",
    "logdet_d2", "reconstruct_gl0", "reconstruct_glm", "SingularFamilyError",
    "RateError", "RateReport", "SpectralEstimateReport", "convergence_report",
    "lower_envelope", "spectral_estimate_check", "vitushkin_c_inf",
    "vitushkin_c_l1",
    "__version__",
]
