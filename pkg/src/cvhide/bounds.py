"""Energy-constrained continuity bounds, hiding trade-offs and their inversions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaln, roots_genlaguerre
from scipy.stats import chi2

from .channels import lambda_of, noise_channel_apply, r_to_db
from .errors import InfeasibleBudget, InfeasibleCutoff, InvalidParameter, NumericError
from .fock_core import (MAX_DIM, StateSpec, TruncatedOperator, make_state, trace_norm,
                        truncation_dim_for)

TRACE_CEILING = 2.0
TAIL_CUT = 1e-12


@dataclass
class BoundReport:
    """A bound value with its inputs and optional companion numeric value."""

    name: str
    inputs: dict
    value: float
    raw: float
    numeric: float | None = None
    monotone_in: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class BudgetQuery:
    """Teleportation accuracy target with either eta or r held fixed.

    Attributes:
        target: Trace-norm accuracy epsilon in (0, 2).
        E: Energy per input (irreducible photon number).
        m: Number of modes.
        eta: Fixed detection efficiency (solve for r), or None.
        r: Fixed squeezing (solve for eta), or None.
        bound: ``"linear"`` or ``"refined"``.
    """

    target: float
    E: float = 0.0
    m: int = 1
    eta: float | None = None
    r: float | None = None
    bound: str = "linear"

    def __post_init__(self):
        if not 0 < self.target < 2:
            raise InvalidParameter(f"accuracy target must lie in (0, 2), got {self.target}")
        if (self.eta is None) == (self.r is None):
            raise InvalidParameter("fix exactly one of eta and r")
        if self.bound not in ("linear", "refined"):
            raise InvalidParameter(f"unknown bound {self.bound!r}")
        _check_energy(self.E, self.m)


def _check_energy(E: float, m: int) -> None:
    if not E >= 0:
        raise InvalidParameter(f"energy must be >= 0, got {E}")
    if int(m) != m or m < 1:
        raise InvalidParameter(f"mode count must be a positive integer, got {m}")


def gamma_E(E: float) -> float:
    """Energy factor sqrt(E) + sqrt(E + 1)."""
    if not E >= 0:
        raise InvalidParameter(f"energy must be >= 0, got {E}")
    return math.sqrt(E) + math.sqrt(E + 1)


def _half_moment_ratio(m: int) -> float:
    """Gamma(m + 1/2) / (m - 1)!."""
    return math.exp(gammaln(m + 0.5) - gammaln(m))


def bk_error_bound_linear(E: float, m: int, lam: float, cap: bool = True) -> float:
    """Linear teleportation error bound (2 Gamma(m+1/2)/(m-1)!) gamma_E sqrt(lam)."""
    _check_energy(E, m)
    if not lam >= 0:
        raise InvalidParameter(f"noise parameter must be >= 0, got {lam}")
    raw = 2 * _half_moment_ratio(m) * gamma_E(E) * math.sqrt(lam)
    return min(raw, TRACE_CEILING) if cap else raw


def bk_error_bound_refined(E: float, m: int, lam: float) -> float:
    """Chi-square averaged teleportation error bound.

    Evaluates 2 E[sin(min(gamma_E sqrt(lam X / 2), pi/2))] for X chi-square
    distributed with 2m degrees of freedom. The factor 2 is the trace-norm
    scale of a difference of states; the value never exceeds 2.

    Raises:
        NumericError: If the quadrature reports a failure.
    """
    _check_energy(E, m)
    if not lam >= 0:
        raise InvalidParameter(f"noise parameter must be >= 0, got {lam}")
    if lam == 0:
        return 0.0
    c = gamma_E(E) * math.sqrt(lam / 2)
    s_sat = math.pi / (2 * c)
    s_cut = math.sqrt(chi2.isf(TAIL_CUT, 2 * m))
    lognorm = -(m - 1) * math.log(2) - gammaln(m)

    # x = s^2 turns the chi-square density into a smooth integrand in s.
    def integrand(s):
        return math.exp(lognorm + (2 * m - 1) * math.log(s) - s * s / 2) * math.sin(c * s) if s > 0 else 0.0

    upper = min(s_sat, s_cut)
    val, err = quad(integrand, 0.0, upper, epsabs=1e-15, epsrel=1e-13, limit=400)
    if not np.isfinite(val) or err > 1e-9:
        raise NumericError(f"refined bound quadrature failed (err {err:.3g})")
    if s_sat < s_cut:
        sat = float(chi2.sf(s_sat * s_sat, 2 * m))
    else:
        # Mass beyond the cutoff, where sin(c s) is increasing towards 1.
        tail = float(chi2.sf(s_cut * s_cut, 2 * m))
        sat = tail * 0.5 * (math.sin(c * s_cut) + 1.0)
    return min(2 * (val + sat), TRACE_CEILING)


def noise_pair_bound(E: float, m: int, lam1: float, lam2: float) -> float:
    """Energy-constrained distance bound between N_lam1 and N_lam2 on m modes.

    Depends on the noise parameters only through (sqrt(lam1) - sqrt(lam2))^2;
    lam2 = 0 recovers ``bk_error_bound_refined``.
    """
    return bk_error_bound_refined(E, m, (math.sqrt(lam1) - math.sqrt(lam2)) ** 2)


def bk_error_bound_refined_reference(E: float, m: int, lam: float, nodes: int = 61) -> float:
    """Generalized Gauss-Laguerre evaluation of the refined bound.

    With x = 2t the expectation becomes int t^{m-1/2} e^{-t} h(t) dt / Gamma(m)
    where h(t) = sin(min(gamma_E sqrt(lam t), pi/2)) / sqrt(t) is smooth.
    """
    t, w = roots_genlaguerre(nodes, m - 0.5)
    c = gamma_E(E) * math.sqrt(lam)
    h = np.sin(np.minimum(c * np.sqrt(t), math.pi / 2)) / np.sqrt(t)
    return float(2 * np.dot(w, h) * math.exp(-gammaln(m)))


def displacement_diamond_bound(alpha, beta, E: float) -> float:
    """Energy-constrained distance bound 2 sin(min(gamma_E ||alpha - beta||, pi/2))."""
    diff = np.linalg.norm(np.atleast_1d(np.asarray(alpha, dtype=complex))
                          - np.atleast_1d(np.asarray(beta, dtype=complex)))
    return 2 * math.sin(min(gamma_E(E) * float(diff), math.pi / 2))


def log_c_m(m: int) -> float:
    if int(m) != m or m < 1:
        raise InvalidParameter(f"mode count must be a positive integer, got {m}")
    return (-(m + 1) * math.log(4) - math.log(m)
            + (2 * m + 1) * math.log(2 * m / (2 * m + 1))
            + 2 * m * (gammaln(m) - gammaln(m + 0.5)))


def c_m(m: int) -> float:
    """Constant of the LOCC hiding trade-off; c_1 = 2/(27 pi)."""
    return math.exp(log_c_m(m))


def locc_bound(beta_1: float, E: float, m: int) -> float:
    """Lower bound c_m beta_1^{2m+1} / gamma_E^{2m} on the LOCC bias."""
    if not 0 <= beta_1 <= 1:
        raise InvalidParameter(f"beta_1 must lie in [0, 1], got {beta_1}")
    _check_energy(E, m)
    return c_m(m) * beta_1 ** (2 * m + 1) / gamma_E(E) ** (2 * m)


def plan_energy_for_hiding(beta_target: float, m: int, beta_1: float) -> float:
    """Energy at which the LOCC lower bound drops to ``beta_target``.

    Raises:
        InvalidParameter: If the target is not in (0, c_m beta_1^{2m+1}].
    """
    if not 0 <= beta_1 <= 1:
        raise InvalidParameter(f"beta_1 must lie in [0, 1], got {beta_1}")
    ceiling = c_m(m) * beta_1 ** (2 * m + 1)
    if not 0 < beta_target <= ceiling * (1 + 1e-12):
        raise InvalidParameter(f"target {beta_target} outside (0, {ceiling}]")
    g = max((ceiling / beta_target) ** (1 / (2 * m)), 1.0)
    return ((g * g - 1) / (2 * g)) ** 2


def _lambda_star(eps: float, E: float, m: int, bound: str) -> float:
    if bound == "linear":
        return (eps / (2 * _half_moment_ratio(m) * gamma_E(E))) ** 2
    hi = 1e-6
    while bk_error_bound_refined(E, m, hi) < eps:
        hi *= 2
        if hi > 1e12:
            raise NumericError("refined bound never reaches the target")
    return brentq(lambda x: bk_error_bound_refined(E, m, x) - eps, 0.0, hi,
                  xtol=1e-15, rtol=1e-13)


def _bound(bound: str, E: float, m: int, lam: float) -> float:
    if bound == "linear":
        return bk_error_bound_linear(E, m, lam)
    return bk_error_bound_refined(E, m, lam)


def plan_teleport_budget(query: BudgetQuery) -> dict:
    """Resources that guarantee teleportation error at most ``query.target``.

    Returns:
        Dict with ``lambda_star`` and either ``r``/``s_db`` (eta fixed) or
        ``eta`` (r fixed). A solved r is clamped at 0 when no squeezing is
        needed.

    Raises:
        InfeasibleBudget: If the fixed resource alone already exceeds the
            target; ``limiting_value`` is the best reachable accuracy.
    """
    q = query
    lam = _lambda_star(q.target, q.E, q.m, q.bound)
    out = {"lambda_star": lam, "bound": q.bound}
    if q.eta is not None:
        floor = lambda_of(math.inf, q.eta)
        if lam <= floor:
            raise InfeasibleBudget(
                f"efficiency {q.eta} alone gives error {_bound(q.bound, q.E, q.m, floor):.6g}",
                _bound(q.bound, q.E, q.m, floor))
        r = max(0.0, -0.5 * math.log(lam - floor))
        out.update(eta=q.eta, r=r, s_db=r_to_db(r))
    else:
        if not q.r >= 0:
            raise InvalidParameter(f"squeezing must be >= 0, got {q.r}")
        floor = math.exp(-2 * q.r)
        if lam < floor:
            raise InfeasibleBudget(
                f"squeezing {q.r} alone gives error {_bound(q.bound, q.E, q.m, floor):.6g}",
                _bound(q.bound, q.E, q.m, floor))
        out.update(r=q.r, s_db=r_to_db(q.r), eta=1 / math.sqrt(1 + lam - floor))
    return out


DEFAULT_LAMBDA_GRID = np.geomspace(1e-3, 1.0, 64)


def locc_lower_bound_numeric(Z: TruncatedOperator, lam_grid=None) -> dict:
    """Teleportation-argument lower bound max_lam (lam/(2-lam)) ||N_lam(Z)||_1.

    For two-mode Z the channel acts on mode A and the output keeps the input
    cutoff; compressing can only lower the trace norm, so the value stays a
    lower bound.

    Returns:
        Dict with ``value`` and the maximizing ``argmax``.
    """
    grid = DEFAULT_LAMBDA_GRID if lam_grid is None else np.asarray(lam_grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid >= 2):
        raise InvalidParameter("lambda grid must lie in (0, 2)")
    best, arg = 0.0, float(grid[0])
    for lam in grid:
        val = lam / (2 - lam) * trace_norm(noise_channel_apply(Z, float(lam)))
        if val > best:
            best, arg = val, float(lam)
    return {"value": best, "argmax": arg}


def squeezed_analytic_bound(r: float, lam: float) -> float:
    """Closed-form lower bound on ||N_lam(zeta_r) - zeta_r||_1, tending to 2 as r grows."""
    e2 = math.exp(2 * r)
    return 2 - 2 / math.sqrt((1 + lam * e2 / 2) * (1 + lam / e2 / 2))


def squeezed_noise_lower_bound(r: float, lam: float, dim: int | None = None) -> dict:
    """Disturbance of a squeezed state by N_lam: analytic lower bound and exact value.

    Returns:
        Dict with ``analytic`` (the closed-form lower bound), ``overlap`` (the
        same bound evaluated with the exact overlap
        1/sqrt((1+lam e^{2r})(1+lam e^{-2r}))), ``numeric`` (the trace norm of
        N_lam(zeta) - zeta) and ``cutoff``.

    Raises:
        InfeasibleCutoff: If the required cutoff exceeds the maximum.
    """
    if not r >= 0 or not lam > 0:
        raise InvalidParameter("need r >= 0 and lam > 0")
    e2 = math.exp(2 * r)
    analytic = squeezed_analytic_bound(r, lam)
    overlap = 2 - 2 / math.sqrt((1 + lam * e2) * (1 + lam / e2))
    if dim is None:
        dim = max(truncation_dim_for(StateSpec.squeezed(r)), math.ceil(20 * e2))
    if dim > MAX_DIM:
        raise InfeasibleCutoff(f"squeezing r={r} needs cutoff {dim} > {MAX_DIM}")
    z = make_state(StateSpec.squeezed(r), dim)
    out = noise_channel_apply(z, lam)
    numeric = trace_norm(out - z.padded(out.dim))
    return {"analytic": analytic, "overlap": overlap, "numeric": numeric, "cutoff": out.dim}


def dimension_count(m: int, E: int) -> tuple[int, Fraction]:
    """Number of m-mode Fock vectors with total photon number at most E.

    Returns:
        ``(comb(m + E, m), E^m / m!)`` with the lower bound as an exact fraction.
    """
    if int(m) != m or m < 1 or int(E) != E or E < 0:
        raise InvalidParameter("need integers m >= 1 and E >= 0")
    m, E = int(m), int(E)
    return math.comb(m + E, m), Fraction(E**m, math.factorial(m))


def teleport_bound_reports(E: float, m: int, lam: float,
                           state: TruncatedOperator | None = None) -> list[BoundReport]:
    """Linear and refined bounds, optionally paired with the exact single-mode error."""
    numeric = None
    if state is not None and state.modes == 1:
        out = noise_channel_apply(state, lam)
        numeric = trace_norm(out - state.padded(out.dim))
    inputs = {"E": E, "m": m, "lambda": lam}
    lin_raw = bk_error_bound_linear(E, m, lam, cap=False)
    ref = bk_error_bound_refined(E, m, lam)
    return [BoundReport("linear", inputs, min(lin_raw, TRACE_CEILING), lin_raw, numeric,
                        ("E", "lambda")),
            BoundReport("refined", inputs, ref, ref, numeric, ("E", "lambda"))]
