"""Truncated Fock-space linear algebra.

Operators live on the span of |0>, ..., |d-1>. Two-mode operators use the
row-major Kronecker convention with mode A as the slow index, so the basis
vector |j>|k> sits at position ``j * d + k``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import gammainc, gammaln

from . import _numerics
from .errors import (InfeasibleCutoff, InvalidDimension, InvalidParameter,
                     InvalidState, NumericError, TruncationWarning)

DEFAULT_TAIL_TOL = 1e-12
MIN_DIM = 8
MAX_DIM = 8192
HERMITIAN_TOL = 1e-12
STATE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Immutable operator on one or two truncated modes.

    Attributes:
        entries: Complex matrix of side ``dim ** modes``.
        dim: Fock cutoff per mode.
        modes: Number of modes (1 or 2).
        hermitian: Whether the matrix is declared Hermitian.
        renorm_delta: Trace removed by truncation before renormalization
            (zero when nothing was renormalized).
    """

    entries: np.ndarray
    dim: int
    modes: int = 1
    hermitian: bool = False
    renorm_delta: float = 0.0

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if self.modes not in (1, 2):
            raise InvalidDimension(f"modes must be 1 or 2, got {self.modes}")
        side = self.dim ** self.modes
        if m.shape != (side, side):
            raise InvalidDimension(f"entries have shape {m.shape}, expected {(side, side)}")
        if self.hermitian:
            dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if dev > HERMITIAN_TOL:
                raise InvalidState(f"operator flagged Hermitian deviates by {dev:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_matrix(cls, matrix, modes: int = 1, hermitian: bool | None = None,
                    renorm_delta: float = 0.0) -> "TruncatedOperator":
        """Wraps a square matrix, inferring the cutoff and Hermiticity."""
        matrix = np.asarray(matrix, dtype=complex)
        side = matrix.shape[0]
        dim = round(side ** (1.0 / modes))
        if hermitian is None:
            hermitian = bool(np.max(np.abs(matrix - matrix.conj().T)) <= HERMITIAN_TOL)
        return cls(matrix, dim, modes, hermitian, renorm_delta)

    @property
    def matrix(self) -> np.ndarray:
        return self.entries

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def padded(self, dim: int) -> "TruncatedOperator":
        """Embeds a single-mode operator into a larger cutoff with zero padding."""
        if self.modes != 1:
            raise InvalidDimension("padding is only defined for single-mode operators")
        if dim < self.dim:
            raise InvalidDimension(f"cannot pad dim {self.dim} down to {dim}")
        if dim == self.dim:
            return self
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.entries
        return TruncatedOperator(out, dim, 1, self.hermitian, self.renorm_delta)

    def is_state(self, tol: float = STATE_TOL) -> bool:
        """Unit trace and positive semi-definite up to ``tol``."""
        if not self.hermitian or abs(self.trace() - 1) > tol:
            return False
        m = self.entries
        if not np.any(m - np.diag(np.diagonal(m))):
            return bool(np.real(np.diagonal(m)).min() >= -tol)
        return bool(np.linalg.eigvalsh(_hermitian_part(m)).min() >= -tol)

    def _combine(self, other, sign: float) -> "TruncatedOperator":
        if not isinstance(other, TruncatedOperator):
            return NotImplemented
        a, b = self, other
        if a.modes != b.modes:
            raise InvalidDimension("cannot combine operators on different mode counts")
        if a.dim != b.dim:
            if a.modes != 1:
                raise InvalidDimension("two-mode operators must share a cutoff")
            d = max(a.dim, b.dim)
            a, b = a.padded(d), b.padded(d)
        return TruncatedOperator(a.entries + sign * b.entries, a.dim, a.modes,
                                 a.hermitian and b.hermitian)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        herm = self.hermitian and np.isreal(scalar)
        return TruncatedOperator(self.entries * scalar, self.dim, self.modes, bool(herm))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


@dataclass(frozen=True)
class StateSpec:
    """A named state family with its parameters.

    Use the class-method constructors, e.g. ``StateSpec.thermal(1.0)``.
    """

    family: str
    params: tuple = field(default_factory=tuple)

    FAMILIES = ("fock", "coherent", "thermal", "squeezed", "tmsv",
                "even_thermal", "odd_thermal")

    def __post_init__(self):
        f, p = self.family, self.params
        if f not in self.FAMILIES:
            raise InvalidParameter(f"unknown state family {f!r}")
        if len(p) != 1:
            raise InvalidParameter(f"{f} takes exactly one parameter")
        v = p[0]
        if f == "fock" and (int(v) != v or v < 0):
            raise InvalidParameter(f"fock index must be a non-negative integer, got {v}")
        if f == "thermal" and not v >= 0:
            raise InvalidParameter(f"thermal mean photon number must be >= 0, got {v}")
        if f in ("squeezed", "tmsv") and not v >= 0:
            raise InvalidParameter(f"squeezing must be >= 0, got {v}")
        if f in ("even_thermal", "odd_thermal") and not 0 <= v < 1:
            raise InvalidParameter(f"lambda must lie in [0, 1), got {v}")
        if f == "coherent" and not np.isfinite(complex(v)):
            raise InvalidParameter("coherent amplitude must be finite")

    @property
    def value(self):
        return self.params[0]

    @classmethod
    def fock(cls, n: int) -> "StateSpec":
        return cls("fock", (int(n),))

    @classmethod
    def coherent(cls, alpha: complex) -> "StateSpec":
        return cls("coherent", (complex(alpha),))

    @classmethod
    def thermal(cls, nu: float) -> "StateSpec":
        return cls("thermal", (float(nu),))

    @classmethod
    def squeezed(cls, r: float) -> "StateSpec":
        return cls("squeezed", (float(r),))

    @classmethod
    def tmsv(cls, r: float) -> "StateSpec":
        return cls("tmsv", (float(r),))

    @classmethod
    def even_thermal(cls, lam: float) -> "StateSpec":
        return cls("even_thermal", (float(lam),))

    @classmethod
    def odd_thermal(cls, lam: float) -> "StateSpec":
        return cls("odd_thermal", (float(lam),))


@dataclass(frozen=True)
class EnergyBudget:
    """Mean photon number ``E`` spread over ``m`` modes."""

    E: float
    m: int = 1

    def __post_init__(self):
        if not self.E >= 0:
            raise InvalidParameter(f"energy must be >= 0, got {self.E}")
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameter(f"mode count must be a positive integer, got {self.m}")


class Ladder(NamedTuple):
    a: TruncatedOperator
    adag: TruncatedOperator
    N: TruncatedOperator
    x: TruncatedOperator
    p: TruncatedOperator


def _check_dim(dim: int, minimum: int = 2) -> int:
    if int(dim) != dim or dim < minimum:
        raise InvalidDimension(f"dim must be an integer >= {minimum}, got {dim}")
    return int(dim)


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _as_matrix(X) -> np.ndarray:
    return X.entries if isinstance(X, TruncatedOperator) else np.asarray(X, dtype=complex)


def ladder_matrices(dim: int) -> Ladder:
    """Annihilation, creation, number and quadrature operators.

    Args:
        dim: Fock cutoff, at least 2.

    Returns:
        ``Ladder(a, adag, N, x, p)`` with ``x = (a + a^dag)/sqrt(2)`` and
        ``p = (a - a^dag)/(i sqrt(2))``.
    """
    dim = _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    N = np.diag(np.arange(dim, dtype=float)).astype(complex)
    x = (a + ad) / np.sqrt(2)
    p = (a - ad) / (1j * np.sqrt(2))
    return Ladder(TruncatedOperator(a, dim), TruncatedOperator(ad, dim),
                  TruncatedOperator(N, dim, hermitian=True),
                  TruncatedOperator(x, dim, hermitian=True),
                  TruncatedOperator(p, dim, hermitian=True))


def displacement_matrix(alpha: complex, dim: int) -> TruncatedOperator:
    """Truncation of the displacement operator D(alpha).

    Entries are exact matrix elements of the infinite operator, obtained
    from a scaled associated-Laguerre recurrence. The truncated block is
    close to unitary only while |alpha|^2 is small compared with ``dim``.

    Args:
        alpha: Complex displacement.
        dim: Fock cutoff.

    Returns:
        The d x d block of D(alpha).
    """
    dim = _check_dim(dim)
    alpha = complex(alpha)
    if abs(alpha) ** 2 > dim:
        warnings.warn(f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds dim {dim}; the "
                      "truncated displacement is far from unitary", TruncationWarning,
                      stacklevel=2)
    return TruncatedOperator(_numerics.displacement_batch(np.array([alpha]), dim)[0], dim)


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Fock amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!) for n < dim."""
    alpha = complex(alpha)
    n = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    logmag = -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * np.exp(1j * n * np.angle(alpha))


def squeezed_amplitudes(r: float, dim: int) -> np.ndarray:
    """Fock amplitudes of S(r)|0> with S(r) = exp[(r/2)(a^dag^2 - a^2)]."""
    out = np.zeros(dim)
    t = np.tanh(r)
    c = 1.0 / np.sqrt(np.cosh(r))
    for n in range(0, (dim + 1) // 2):
        out[2 * n] = c
        c *= t * np.sqrt((2 * n + 1) / (2 * n + 2))
    return out.astype(complex)


def tmsv_vector(r: float, dim: int) -> np.ndarray:
    """Two-mode squeezed vacuum (1/cosh r) sum_k (-tanh r)^k |k>|k>, truncated."""
    psi = np.zeros(dim * dim, dtype=complex)
    k = np.arange(dim)
    psi[k * dim + k] = (-np.tanh(r)) ** k / np.cosh(r)
    return psi


def _squeezed_tail_dim(r: float, tail_tol: float) -> int:
    t = np.tanh(r) ** 2
    if t == 0:
        return 1
    p = 1.0 / np.cosh(r)
    n = 0
    while p * t / (1 - t) >= tail_tol:
        p *= t * (2 * n + 1) / (2 * n + 2)
        n += 1
        if 2 * n + 1 > MAX_DIM:
            break
    return 2 * n + 1


def _geometric_count(q: float, tail_tol: float) -> int:
    """Smallest c with q**c < tail_tol."""
    if q <= 0:
        return 1
    return int(math.floor(math.log(tail_tol) / math.log(q))) + 1


def truncation_dim_for(spec: StateSpec, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest cutoff whose discarded Fock weight is below ``tail_tol``.

    Thermal-type families use their exact geometric tails; coherent states use
    the Poisson tail and squeezed states a geometric majorant of their
    amplitude decay. The result is never below 8.

    Raises:
        InvalidParameter: If ``tail_tol`` is outside (0, 1e-2).
        InfeasibleCutoff: If the required cutoff exceeds ``MAX_DIM``.
    """
    if not 0 < tail_tol < 1e-2:
        raise InvalidParameter(f"tail_tol must lie in (0, 1e-2), got {tail_tol}")
    f, v = spec.family, spec.value
    if f == "fock":
        d = v + 1
    elif f == "thermal":
        d = _geometric_count(v / (v + 1), tail_tol)
    elif f == "tmsv":
        d = _geometric_count(np.tanh(v) ** 2, tail_tol)
    elif f == "even_thermal":
        d = 2 * _geometric_count(v * v, tail_tol) - 1
    elif f == "odd_thermal":
        d = 2 * _geometric_count(v * v, tail_tol)
    elif f == "coherent":
        x = abs(v) ** 2
        d = 1
        while x > 0 and gammainc(d, x) >= tail_tol:
            d += 1
            if d > MAX_DIM:
                break
    else:
        d = _squeezed_tail_dim(v, tail_tol)
    d = max(MIN_DIM, int(d))
    if d > MAX_DIM:
        raise InfeasibleCutoff(f"{f}{spec.params} needs cutoff {d} > {MAX_DIM}")
    return d


def _pure(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def make_state(spec: StateSpec, dim: int | None = None,
               tail_tol: float = DEFAULT_TAIL_TOL) -> TruncatedOperator:
    """Density matrix of a state family, renormalized after truncation.

    Args:
        spec: Family and parameters.
        dim: Fock cutoff per mode; chosen by ``truncation_dim_for`` if omitted.
        tail_tol: Tail tolerance used when ``dim`` is omitted.

    Returns:
        A Hermitian unit-trace TruncatedOperator whose ``renorm_delta`` is the
        weight lost to truncation.
    """
    if dim is None:
        dim = truncation_dim_for(spec, tail_tol)
    dim = _check_dim(dim)
    f, v = spec.family, spec.value
    n = np.arange(dim)
    modes = 1
    if f == "fock":
        if v >= dim:
            raise InvalidDimension(f"fock({v}) needs dim > {v}")
        m = np.zeros((dim, dim), dtype=complex)
        m[v, v] = 1.0
    elif f == "thermal":
        m = np.diag((1 / (v + 1)) * (v / (v + 1)) ** n).astype(complex)
    elif f == "even_thermal":
        m = np.diag(np.where(n % 2 == 0, (1 - v * v) * v ** n, 0.0)).astype(complex)
    elif f == "odd_thermal":
        m = np.diag(np.where(n % 2 == 1, (1 - v * v) * v ** np.maximum(n - 1, 0), 0.0)).astype(complex)
    elif f == "coherent":
        m = _pure(coherent_amplitudes(v, dim))
    elif f == "squeezed":
        m = _pure(squeezed_amplitudes(v, dim))
    else:
        m = _pure(tmsv_vector(v, dim))
        modes = 2
    tr = float(np.real(np.trace(m)))
    delta = 1.0 - tr
    if delta > 1e-6:
        warnings.warn(f"truncation at dim {dim} discards weight {delta:.3g} of "
                      f"{f}{spec.params}", TruncationWarning, stacklevel=2)
    m = _hermitian_part(m / tr)
    return TruncatedOperator(m, dim, modes, hermitian=True, renorm_delta=max(delta, 0.0))


def trace_norm(X) -> float:
    """Sum of singular values of a truncated operator.

    Hermitian input uses a Hermitian eigendecomposition. Exactly diagonal
    matrices short-circuit to the sum of absolute diagonal entries (their
    eigenvalues). Non-Hermitian input goes through the Hermitian dilation
    [[0, X], [X^dag, 0]], whose eigenvalues are plus/minus the singular values.

    Raises:
        NumericError: If any entry is non-finite.
    """
    m = _as_matrix(X)
    if not np.all(np.isfinite(m)):
        raise NumericError("trace_norm received non-finite entries")
    if not np.any(m - np.diag(np.diagonal(m))):
        return float(np.sum(np.abs(np.diagonal(m))))
    if np.max(np.abs(m - m.conj().T)) <= HERMITIAN_TOL * max(1.0, np.max(np.abs(m))):
        return float(np.sum(np.abs(np.linalg.eigvalsh(_hermitian_part(m)))))
    side = m.shape[0]
    dil = np.zeros((2 * side, 2 * side), dtype=complex)
    dil[:side, side:] = m
    dil[side:, :side] = m.conj().T
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(dil))))


def partial_trace(op: TruncatedOperator, keep: int = 0) -> TruncatedOperator:
    """Reduced operator on mode ``keep`` (0 = A, 1 = B) of a two-mode operator."""
    if op.modes != 2:
        raise InvalidDimension("partial_trace needs a two-mode operator")
    d = op.dim
    t = op.entries.reshape(d, d, d, d)
    red = np.einsum("ijkj->ik", t) if keep == 0 else np.einsum("jijk->ik", t)
    return TruncatedOperator(red, d, 1, op.hermitian)


def mean_photon_number(rho: TruncatedOperator) -> float:
    """Tr[rho N] with N the exact diagonal (total) number operator."""
    n = np.arange(rho.dim, dtype=float)
    if rho.modes == 2:
        n = (n[:, None] + n[None, :]).ravel()
    return float(np.real(np.dot(np.diagonal(rho.entries), n)))


def irreducible_energy(rho: TruncatedOperator) -> float:
    """Tr[rho N] - |Tr[rho a]|^2, the photon number left after recentring."""
    if rho.modes != 1:
        raise InvalidDimension("irreducible_energy is single-mode")
    a = np.sqrt(np.arange(1, rho.dim, dtype=float))
    mean_a = np.dot(np.diagonal(rho.entries, -1), a)
    return mean_photon_number(rho) - abs(mean_a) ** 2


def schmidt_robustness(psi, dims: tuple[int, int] | None = None) -> float:
    """(sum_k sqrt(lambda_k))^2 for the Schmidt coefficients of a pure state.

    Args:
        psi: Two-mode vector (Kronecker order, mode A slow) or its coefficient
            matrix.
        dims: Local dimensions for a flat vector; a square split is assumed
            when omitted.

    Raises:
        InvalidState: If the vector norm deviates from 1 by more than 1e-6.
    """
    c = np.asarray(psi, dtype=complex)
    if c.ndim == 1:
        if dims is None:
            side = math.isqrt(c.size)
            if side * side != c.size:
                raise InvalidDimension("cannot split a vector of non-square length")
            dims = (side, side)
        c = c.reshape(dims)
    norm = np.linalg.norm(c)
    if abs(norm - 1) > 1e-6:
        raise InvalidState(f"vector norm {norm:.9g} is not 1")
    s = np.linalg.svd(c, compute_uv=False)
    return float(np.sum(s) ** 2)
