"""Numerical toolkit for continuous-variable data hiding.

Truncated Fock-space states, phase-space representations, Gaussian noise
channels, measurement-restricted biases and the associated bounds.
"""

from .bounds import (BudgetQuery, bk_error_bound_linear, bk_error_bound_refined, c_m,
                     locc_bound, plan_energy_for_hiding, plan_teleport_budget)
from .channels import (ChannelSpec, bk_teleport_output, lambda_of, noise_channel_apply,
                       pure_loss_apply)
from .discrimination import (SchemeSpec, beta_1, beta_het, beta_hom, bias_report,
                             thermal_closed_forms, wigner_l1_bound)
from .errors import (CvhideError, GridWarning, InfeasibleBudget, InfeasibleCutoff,
                     InvalidDimension, InvalidParameter, InvalidState, NumericError,
                     TruncationWarning, VerificationFailure)
from .fock_core import StateSpec, TruncatedOperator, make_state, trace_norm
from .phase_space import PhaseGrid, characteristic_fn, husimi_fn, wigner_fn

__version__ = "0.1.0"

__all__ = [
    "BudgetQuery", "ChannelSpec", "CvhideError", "GridWarning", "InfeasibleBudget",
    "InfeasibleCutoff", "InvalidDimension", "InvalidParameter", "InvalidState",
    "NumericError", "PhaseGrid", "SchemeSpec", "StateSpec", "TruncatedOperator",
    "TruncationWarning", "VerificationFailure", "beta_1", "beta_het", "beta_hom",
    "bias_report", "bk_error_bound_linear", "bk_error_bound_refined", "bk_teleport_output",
    "c_m", "characteristic_fn", "husimi_fn", "lambda_of", "locc_bound", "make_state",
    "noise_channel_apply", "plan_energy_for_hiding", "plan_teleport_budget",
    "pure_loss_apply", "thermal_closed_forms", "trace_norm", "wigner_fn", "wigner_l1_bound",
]
