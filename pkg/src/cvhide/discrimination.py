"""Bias functionals of binary discrimination schemes and their closed forms.

For a scheme (rho, sigma; p) every bias is the L1 norm of the weighted
difference p * (outcome law under rho) - (1 - p) * (outcome law under sigma).
With p = 1/2 this is half the distance between the two outcome laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from . import _numerics
from .channels import pure_loss_apply
from .errors import InvalidParameter, InvalidState, VerificationFailure
from .fock_core import (DEFAULT_TAIL_TOL, StateSpec, TruncatedOperator, make_state,
                        trace_norm, truncation_dim_for)
from .phase_space import (PhaseFunction, PhaseGrid, default_grid, homodyne_window,
                          husimi_fn, is_phase_invariant, l1_phase_norm, quadrature_pdf,
                          wigner_fn)

HOM_ANGLE_GRID = 24


@dataclass(frozen=True, eq=False)
class SchemeSpec:
    """A discrimination scheme (rho, sigma; p).

    Single-mode states with different cutoffs are zero-padded to a common
    cutoff, which leaves every bias unchanged.
    """

    rho: TruncatedOperator
    sigma: TruncatedOperator
    p: float = 0.5

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise InvalidParameter(f"prior must lie in [0, 1], got {self.p}")
        if self.rho.modes != self.sigma.modes:
            raise InvalidState("scheme states act on different numbers of modes")
        for s in (self.rho, self.sigma):
            if not s.is_state():
                raise InvalidState("scheme members must be states")
        if self.rho.dim != self.sigma.dim:
            d = max(self.rho.dim, self.sigma.dim)
            object.__setattr__(self, "rho", self.rho.padded(d))
            object.__setattr__(self, "sigma", self.sigma.padded(d))

    @classmethod
    def from_specs(cls, a: StateSpec, b: StateSpec, p: float = 0.5,
                   tail_tol: float = DEFAULT_TAIL_TOL) -> "SchemeSpec":
        """Builds both states at the larger of their required cutoffs."""
        d = max(truncation_dim_for(a, tail_tol), truncation_dim_for(b, tail_tol))
        return cls(make_state(a, d), make_state(b, d), p)

    @property
    def dim(self) -> int:
        return self.rho.dim

    @property
    def operator(self) -> TruncatedOperator:
        """The weighted difference p rho - (1 - p) sigma."""
        return self.p * self.rho - (1 - self.p) * self.sigma

    @property
    def radial(self) -> bool:
        return is_phase_invariant(self.rho) and is_phase_invariant(self.sigma)


@dataclass
class BiasReport:
    """All bias functionals of a scheme, with optional closed-form comparisons."""

    beta_1: float
    beta_hom: float
    beta_het: float
    wigner_l1_half: float
    cutoff: int
    grid: dict
    closed_form: dict = field(default_factory=dict)
    deltas: dict = field(default_factory=dict)


def beta_1(scheme: SchemeSpec) -> float:
    """Helstrom bias ||p rho - (1 - p) sigma||_1."""
    return trace_norm(scheme.operator)


def _angles(angles) -> np.ndarray:
    if angles is None:
        return np.zeros(1)
    if isinstance(angles, str):
        if angles != "grid":
            raise InvalidParameter(f"unknown angle grid {angles!r}")
        angles = HOM_ANGLE_GRID
    if isinstance(angles, (int, np.integer)):
        return np.pi * np.arange(int(angles)) / int(angles)
    return np.asarray(angles, dtype=float).ravel()


def _hom_samples(dim: int, window: float) -> int:
    h = min(0.05, 0.25 / math.sqrt(2 * dim + 1))
    return int(2 * window / h) + 1


def beta_hom(scheme: SchemeSpec, angles=None, tol: float = 1e-11) -> float:
    """Homodyne bias, maximized over quadrature angles.

    Args:
        scheme: Single-mode scheme.
        angles: None for the x quadrature only, an integer or ``"grid"`` for
            equispaced angles in [0, pi), or explicit angles.
        tol: Absolute quadrature tolerance.
    """
    if scheme.rho.modes != 1:
        raise InvalidParameter("homodyne bias is defined for single-mode schemes")
    ths = np.zeros(1) if scheme.radial else _angles(angles)
    X = homodyne_window(scheme.dim)
    n = _hom_samples(scheme.dim, X)
    best = 0.0
    for th in ths:
        def f(x, th=th):
            return (scheme.p * quadrature_pdf(scheme.rho, x, th)
                    - (1 - scheme.p) * quadrature_pdf(scheme.sigma, x, th))
        best = max(best, _numerics.abs_integral_1d(f, -X, X, n, tol))
    return best


def _difference_function(scheme: SchemeSpec, fn) -> PhaseFunction:
    def ev(a):
        return scheme.p * fn(scheme.rho, a) - (1 - scheme.p) * fn(scheme.sigma, a)
    return PhaseFunction(ev, "radial" if scheme.radial else "none")


def _phase_bias(scheme: SchemeSpec, fn, grid: PhaseGrid | None) -> tuple[float, PhaseGrid]:
    if scheme.rho.modes != 1:
        raise InvalidParameter("phase-space biases are defined for single-mode schemes")
    f = _difference_function(scheme, fn)
    if grid is None:
        grid = default_grid([scheme.rho, scheme.sigma], f)
    return l1_phase_norm(f, grid), grid


def beta_het(scheme: SchemeSpec, grid: PhaseGrid | None = None) -> float:
    """Heterodyne bias: L1 norm of the weighted Husimi difference."""
    return _phase_bias(scheme, husimi_fn, grid)[0]


def wigner_l1_bound(scheme: SchemeSpec, grid: PhaseGrid | None = None) -> float:
    """L1 norm of the weighted Wigner difference, an upper bound on GOCC bias."""
    return _phase_bias(scheme, wigner_fn, grid)[0]


def bias_report(scheme: SchemeSpec, closed_form: dict | None = None,
                angles=None) -> BiasReport:
    """Evaluates every bias functional and compares with supplied closed forms.

    Args:
        scheme: Single-mode scheme.
        closed_form: Optional mapping with any of the keys ``beta_1``,
            ``beta_hom``, ``beta_het``, ``wigner_l1_half``.
        angles: Homodyne angle selection, see ``beta_hom``.
    """
    unknown = set(closed_form or {}) - {"beta_1", "beta_hom", "beta_het", "wigner_l1_half"}
    if unknown:
        raise InvalidParameter(f"unknown closed-form keys: {sorted(unknown)}")
    het, grid = _phase_bias(scheme, husimi_fn, None)
    wig, _ = _phase_bias(scheme, wigner_fn, None)
    rep = BiasReport(beta_1(scheme), beta_hom(scheme, angles), het, wig,
                     scheme.dim, grid.describe(), dict(closed_form or {}))
    rep.deltas = {k: getattr(rep, k) - v for k, v in rep.closed_form.items()}
    return rep


class ThermalClosedForms(NamedTuple):
    half_trace: float
    half_wigner_l1: float
    half_het: float
    half_hom: float
    N0: int


def thermal_crossing_index(nu: float, mu: float) -> int:
    """Last photon number at which tau_nu outweighs tau_mu (0 when nu = 0)."""
    if nu == 0:
        return 0
    num = math.log(mu + 1) - math.log(nu + 1)
    den = math.log(mu * (nu + 1)) - math.log(nu * (mu + 1))
    return int(math.floor(num / den))


def thermal_closed_forms(nu: float, mu: float) -> ThermalClosedForms:
    """Half distances between thermal states tau_nu and tau_mu.

    Raises:
        InvalidParameter: Unless mu > nu >= 0.
    """
    if not (nu >= 0 and mu > nu):
        raise InvalidParameter(f"need mu > nu >= 0, got nu={nu}, mu={mu}")
    n0 = thermal_crossing_index(nu, mu)
    ht = (mu / (mu + 1)) ** (n0 + 1) - (nu / (nu + 1)) ** (n0 + 1)
    s_nu, s_mu = 2 * nu + 1, 2 * mu + 1
    hw = 2 * (mu - nu) / s_mu * (s_mu / s_nu) ** (-s_nu / (2 * (mu - nu)))
    hh = (mu - nu) / (mu + 1) * ((mu + 1) / (nu + 1)) ** (-(nu + 1) / (mu - nu))
    ln = math.log(s_mu / s_nu)
    hq = (erf(math.sqrt(s_mu / (4 * (mu - nu)) * ln))
          - erf(math.sqrt(s_nu / (4 * (mu - nu)) * ln)))
    return ThermalClosedForms(ht, hw, hh, float(hq), n0)


@dataclass
class SandwichReport:
    nu: float
    mu: float
    beta_het: float
    beta_1: float
    ratio: float


def thermal_sandwich_check(nu: float, mu: float, tol: float = 1e-9) -> SandwichReport:
    """Checks beta_het <= beta_1 <= e * beta_het for a thermal pair.

    Raises:
        VerificationFailure: If either inequality fails by more than ``tol``.
    """
    cf = thermal_closed_forms(nu, mu)
    if cf.half_het > cf.half_trace + tol or cf.half_trace > math.e * cf.half_het + tol:
        raise VerificationFailure(f"thermal sandwich violated at nu={nu}, mu={mu}")
    return SandwichReport(nu, mu, cf.half_het, cf.half_trace, cf.half_trace / cf.half_het)


def coherent_pair_biases(alpha: float) -> dict:
    """Helstrom and Gaussian biases for the equiprobable pair |alpha>, |-alpha>."""
    if not alpha >= 0:
        raise InvalidParameter(f"alpha must be real and >= 0, got {alpha}")
    return {"beta_1": math.sqrt(-math.expm1(-4 * alpha * alpha)),
            "beta_gocc": math.erf(math.sqrt(2) * alpha)}


def fock_pair_hom_distance(n: int, tol: float = 1e-12) -> float:
    """L1 distance between the position densities of |n> and |n+1>.

    The integrand is split at every sign change and each piece is integrated
    adaptively.
    """
    if int(n) != n or n < 0:
        raise InvalidParameter(f"n must be a non-negative integer, got {n}")
    n = int(n)
    X = homodyne_window(n + 2)

    def f(x):
        psi = _numerics.hermite_functions(n + 1, x)
        return psi[n] ** 2 - psi[n + 1] ** 2

    return _numerics.abs_integral_1d(f, -X, X, _hom_samples(n + 2, X), tol)


def even_odd_gocc_bound(lam: float) -> float:
    """Half Wigner-L1 distance of the even/odd thermal pair, 2/e at lam = 0."""
    if not 0 <= lam < 1:
        raise InvalidParameter(f"lambda must lie in [0, 1), got {lam}")
    if lam == 0:
        return 2 / math.e
    return 2 * ((1 - lam) / (1 + lam)) ** ((1 + lam * lam) / (2 * lam))


def even_odd_scheme(lam: float, tail_tol: float = DEFAULT_TAIL_TOL) -> SchemeSpec:
    return SchemeSpec.from_specs(StateSpec.even_thermal(lam), StateSpec.odd_thermal(lam),
                                 0.5, tail_tol)


def efficiency_bound(lam: float, eta: float) -> float:
    """Two-term upper bound on the even/odd bias under efficiency-eta detection."""
    return (1 - lam) / (1 + lam) + (1 - lam) / (1 + lam - 2 * eta * lam)


def efficiency_bias(lam: float, eta: float, tail_tol: float = DEFAULT_TAIL_TOL) -> dict:
    """Even/odd bias after pure loss eta, with its two-term upper bound.

    Raises:
        VerificationFailure: If the numeric bias exceeds the bound by 1e-6.
    """
    if not 0 <= lam < 1 or not 0 <= eta <= 1:
        raise InvalidParameter(f"need lam in [0, 1) and eta in [0, 1], got {lam}, {eta}")
    sch = even_odd_scheme(lam, tail_tol)
    z = sch.rho - sch.sigma
    numeric = 0.5 * trace_norm(pure_loss_apply(z, eta))
    bound = efficiency_bound(lam, eta)
    if numeric > bound + 1e-6:
        raise VerificationFailure(f"efficiency bias {numeric} exceeds bound {bound}")
    return {"numeric": numeric, "bound": bound, "cutoff": sch.dim}


def oscillatory_integral_check(eps: float, phi: float, n: int) -> dict:
    """Integral of |cos(2(n+1)t - (n+1/2) sin 2t)| on [eps, phi] vs (2/pi)(phi-eps).

    The phase is strictly increasing, so its zeros are found by bracketing
    and each half-period is integrated with a fixed Gauss-Legendre rule.
    """
    if not (0 < eps <= phi < math.pi - eps) or n < 1:
        raise InvalidParameter("need 0 < eps <= phi < pi - eps and n >= 1")
    limit = 2 / math.pi * (phi - eps)
    if phi == eps:
        return {"integral": 0.0, "limit": 0.0, "delta": 0.0}

    def h(t):
        return 2 * (n + 1) * t - (n + 0.5) * np.sin(2 * t)

    j0 = math.ceil((h(eps) - math.pi / 2) / math.pi)
    j1 = math.floor((h(phi) - math.pi / 2) / math.pi)
    pts = [eps]
    for j in range(j0, j1 + 1):
        target = math.pi / 2 + j * math.pi
        pts.append(brentq(lambda t: h(t) - target, eps, phi, xtol=1e-15))
    pts.append(phi)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += _numerics.gl_integrate(lambda t: np.abs(np.cos(h(t))), lo, hi, 24)
    return {"integral": total, "limit": limit, "delta": total - limit}


def sweep_even_odd(lams: Sequence[float]) -> list[dict]:
    """beta_1 and the Wigner-L1 bound for even/odd thermal pairs."""
    rows = []
    for lam in lams:
        sch = even_odd_scheme(lam)
        rows.append({"lambda": lam, "beta_1": beta_1(sch),
                     "wigner_l1_bound": even_odd_gocc_bound(lam), "cutoff": sch.dim})
    return rows
