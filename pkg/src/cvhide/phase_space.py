"""Characteristic, Wigner and Husimi functions plus phase-space L1 integrals."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from . import _numerics
from .errors import GridWarning, InvalidParameter, NumericError, TruncationWarning
from .fock_core import StateSpec, TruncatedOperator, mean_photon_number

TAIL_BOUND = 1e-10
RADIAL_NODES = 400
CARTESIAN_NODES = 600


@dataclass(frozen=True)
class PhaseGrid:
    """Gauss-Legendre quadrature grid on a disc or square of half-width R.

    ``polar`` grids place ``nodes`` Gauss-Legendre radii on [0, R] and
    ``angular_nodes`` equispaced angles; with a single angle the grid is only
    meant for radial integrands. ``cartesian`` grids are tensor products on
    [-R, R]^2.
    """

    kind: str
    extent: float
    nodes: int = RADIAL_NODES
    angular_nodes: int = 1
    points: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("polar", "cartesian"):
            raise InvalidParameter(f"grid kind must be polar or cartesian, got {self.kind!r}")
        if not self.extent > 0 or self.nodes < 1 or self.angular_nodes < 1:
            raise InvalidParameter("grid extent and node counts must be positive")
        x, w = _numerics.gauss_legendre(self.nodes)
        R = float(self.extent)
        if self.kind == "polar":
            r = 0.5 * R * (x + 1)
            wr = 0.5 * R * w * r
            phi = 2 * np.pi * np.arange(self.angular_nodes) / self.angular_nodes
            pts = (r[:, None] * np.exp(1j * phi)[None, :]).ravel()
            wts = np.repeat(wr * (2 * np.pi / self.angular_nodes), self.angular_nodes)
        else:
            u = R * x
            wu = R * w
            pts = (u[:, None] + 1j * u[None, :]).ravel()
            wts = (wu[:, None] * wu[None, :]).ravel()
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def area(self) -> float:
        R = float(self.extent)
        return math.pi * R * R if self.kind == "polar" else 4 * R * R

    def describe(self) -> dict:
        return {"kind": self.kind, "extent": float(self.extent), "nodes": self.nodes,
                "angular_nodes": self.angular_nodes}


@dataclass(frozen=True)
class PhaseFunction:
    """A phase-space function with a declared symmetry ("none" or "radial")."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    symmetry: str = "none"

    def __post_init__(self):
        if self.symmetry not in ("none", "radial"):
            raise InvalidParameter(f"unknown symmetry {self.symmetry!r}")

    def __call__(self, alpha) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(alpha, dtype=complex)))


def is_phase_invariant(T: TruncatedOperator) -> bool:
    """True when T is diagonal in the Fock basis (rotation invariant)."""
    m = T.entries
    return not np.any(m - np.diag(np.diagonal(m)))


def default_extent(states: Sequence[TruncatedOperator]) -> float:
    nbar = max(mean_photon_number(s) for s in states)
    return 2.0 * math.sqrt(2.0 * max(nbar, 0.0) + 6.0)


def _tail_estimate(f: PhaseFunction, R: float) -> float:
    radii = R * np.linspace(1.0, 1.5, 6)
    if f.symmetry == "radial":
        pts = radii.astype(complex)
    else:
        phi = 2 * np.pi * np.arange(16) / 16
        pts = (radii[:, None] * np.exp(1j * phi)[None, :]).ravel()
    return float(np.max(np.abs(f(pts))))


def default_grid(states: Sequence[TruncatedOperator], f: PhaseFunction | None = None,
                 nodes: int | None = None) -> PhaseGrid:
    """Grid suited to functions built from ``states``.

    Starts from R = 2 sqrt(2 nbar + 6) and, when the integrand is supplied,
    widens R until the tail estimate falls below 1e-10.
    """
    radial = all(is_phase_invariant(s) for s in states)
    kind = "polar" if radial else "cartesian"
    if nodes is None:
        nodes = RADIAL_NODES if radial else CARTESIAN_NODES
    R = default_extent(states)
    if f is not None:
        R0 = R
        while _tail_estimate(f, R) > TAIL_BOUND and R < 8 * R0:
            R *= 1.25
    return PhaseGrid(kind, R, nodes)


def characteristic_fn(T: TruncatedOperator, alpha) -> np.ndarray | complex:
    """Tr[T D(alpha)] for scalar or array ``alpha``."""
    a = np.asarray(alpha, dtype=complex)
    if np.any(np.abs(a) ** 2 > T.dim / 4):
        warnings.warn("characteristic function requested beyond |alpha|^2 = dim/4",
                      TruncationWarning, stacklevel=2)
    out = _numerics.displacement_trace(T.entries, a, parity=False)
    return complex(out) if out.ndim == 0 else out


def wigner_fn(T: TruncatedOperator, alpha) -> np.ndarray | float:
    """(2/pi) Tr[T D(2 alpha) Pi] with Pi the parity operator.

    The value is exact for the truncated operator at any ``alpha``; large
    arguments only probe how well the cutoff represents the intended state.

    Raises:
        NumericError: If a Hermitian input leaves an imaginary residue >= 1e-6.
    """
    a = np.asarray(alpha, dtype=complex)
    w = (2 / np.pi) * _numerics.displacement_trace(T.entries, 2 * a, parity=True)
    if T.hermitian and w.size and np.max(np.abs(w.imag)) >= 1e-6:
        raise NumericError(f"Wigner imaginary residue {np.max(np.abs(w.imag)):.3g}")
    w = w.real
    return float(w) if w.ndim == 0 else w


def husimi_fn(rho: TruncatedOperator, alpha, chunk: int = 2_000_000) -> np.ndarray | float:
    """(1/pi) <alpha|rho|alpha> via coherent-state amplitude vectors."""
    a = np.asarray(alpha, dtype=complex)
    flat = a.ravel()
    d = rho.dim
    n = np.arange(d)
    m = rho.entries
    diag = is_phase_invariant(rho)
    out = np.empty(flat.size)
    step = max(1, chunk // d)
    for s in range(0, flat.size, step):
        b = flat[s:s + step]
        with np.errstate(divide="ignore", invalid="ignore"):
            logmag = (-np.abs(b)[:, None] ** 2 / 2 + n[None, :] * np.log(np.abs(b))[:, None]
                      - 0.5 * gammaln(n + 1)[None, :])
        logmag[:, 0] = -np.abs(b) ** 2 / 2
        mag = np.exp(logmag)
        if diag:
            out[s:s + step] = (mag**2) @ np.real(np.diagonal(m))
        else:
            c = mag * np.exp(1j * np.outer(np.angle(b), n))
            out[s:s + step] = np.real(np.einsum("pi,ij,pj->p", c.conj(), m, c))
    out /= np.pi
    out = out.reshape(a.shape)
    return float(out) if out.ndim == 0 else out


def wigner_closed_form(spec: StateSpec, alpha) -> np.ndarray | float:
    """Closed-form Wigner functions of thermal, Fock and even/odd thermal states."""
    a = np.asarray(alpha, dtype=complex)
    x = np.abs(a) ** 2
    f, v = spec.family, spec.value
    if f == "thermal":
        out = 2 / (np.pi * (2 * v + 1)) * np.exp(-2 * x / (2 * v + 1))
    elif f == "fock":
        g = _numerics.laguerre_diagonals(4 * x, v + 1, 0)[:, 0, v]
        out = (2 * (-1) ** v / np.pi) * g.reshape(x.shape)
    elif f in ("even_thermal", "odd_thermal"):
        lo = (1 - v) * np.exp(-2 * (1 - v) / (1 + v) * x)
        hi = (1 + v) * np.exp(-2 * (1 + v) / (1 - v) * x) if v > 0 else 0 * x
        if f == "even_thermal":
            out = (lo + hi) / np.pi
        elif v == 0:
            return wigner_closed_form(StateSpec.fock(1), alpha)
        else:
            out = (lo - hi) / (np.pi * v)
    else:
        raise InvalidParameter(f"no closed-form Wigner function for {f}")
    return float(out) if np.ndim(out) == 0 else out


def _radial_abs_integral(f: PhaseFunction, R: float, nodes: int) -> float:
    x, w = _numerics.gauss_legendre(nodes)
    r = 0.5 * R * (x + 1)
    vals = np.real(f(r.astype(complex)))
    g = lambda t: np.real(f(np.asarray(t, dtype=complex)))  # noqa: E731
    roots = _numerics.sign_change_roots(g, r, vals)
    pts = [0.0] + [t for t in roots if 0 < t < R] + [R]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += abs(_numerics.gl_integrate(lambda t: g(t) * t, lo, hi, nodes))
    return 2 * np.pi * total


def l1_phase_norm(f: PhaseFunction, grid: PhaseGrid, check_tail: bool = True) -> float:
    """Integral of |f| over the grid region.

    Radial functions on a polar grid reduce to a one-dimensional radial
    integral, split at the sign changes of f so each piece is smooth.

    Warns:
        GridWarning: If |f| just outside the grid exceeds 1e-10.
    """
    if check_tail:
        tail = _tail_estimate(f, float(grid.extent))
        if tail > TAIL_BOUND:
            warnings.warn(f"|f| beyond R = {grid.extent:.4g} reaches {tail:.3g}",
                          GridWarning, stacklevel=2)
    if grid.kind == "polar" and f.symmetry == "radial":
        return _radial_abs_integral(f, float(grid.extent), grid.nodes)
    if grid.kind == "polar" and grid.angular_nodes == 1:
        raise InvalidParameter("a single-angle polar grid needs a radial function")
    return float(np.dot(grid.weights, np.abs(f(grid.points))))


def phase_integral(f: PhaseFunction, grid: PhaseGrid) -> float:
    """Signed integral of a real phase-space function over the grid."""
    if grid.kind == "polar" and f.symmetry == "radial":
        x, w = _numerics.gauss_legendre(grid.nodes)
        R = float(grid.extent)
        r = 0.5 * R * (x + 1)
        return float(2 * np.pi * 0.5 * R * np.dot(w, np.real(f(r.astype(complex))) * r))
    return float(np.dot(grid.weights, np.real(f(grid.points))))


def hermite_wavefunction(n: int, x) -> np.ndarray:
    """Position wave function of the n-th Fock state."""
    xs = np.asarray(x, dtype=float)
    return _numerics.hermite_functions(int(n), xs)[int(n)].reshape(xs.shape)


def quadrature_pdf(rho: TruncatedOperator, x, theta: float = 0.0) -> np.ndarray:
    """Outcome density of the rotated quadrature (a e^{-i theta} + h.c.)/sqrt(2).

    Args:
        rho: Single-mode state.
        x: Evaluation points.
        theta: Quadrature angle; 0 measures x and pi/2 measures p.
    """
    xs = np.asarray(x, dtype=float)
    d = rho.dim
    psi = _numerics.hermite_functions(d - 1, xs.ravel())
    m = rho.entries
    if is_phase_invariant(rho):
        p = np.real(np.diagonal(m)) @ (psi**2)
    else:
        if theta:
            k = np.arange(d)
            m = m * np.exp(-1j * theta * (k[:, None] - k[None, :]))
        p = np.real(np.einsum("ip,ij,jp->p", psi, m, psi))
    return p.reshape(xs.shape)


def thermal_quadrature_pdf(nu: float, x) -> np.ndarray:
    """Gaussian homodyne density of a thermal state with mean photon number nu."""
    if nu < 0:
        raise InvalidParameter(f"nu must be >= 0, got {nu}")
    s = 2 * nu + 1
    return np.exp(-np.asarray(x, dtype=float) ** 2 / s) / np.sqrt(np.pi * s)


def homodyne_window(dim: int) -> float:
    """Half-width beyond which every Hermite function below ``dim`` is negligible."""
    return math.sqrt(2 * dim + 1) + 8.0
