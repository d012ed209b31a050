"""Single-mode bosonic channels on truncated operators.

The Gaussian noise channel N_lam multiplies characteristic functions by
exp(-lam |alpha|^2). It factors as a pure loss of transmissivity 1/(1+lam)
followed by a quantum-limited amplifier of gain 1+lam. Both are
phase covariant, so each Fock diagonal |n+k><n| is mapped onto the same
diagonal offset k. Each factor is therefore a small transfer matrix per
offset, with closed-form Kraus-derived entries. Output entries below the
output cutoff are exact for any input supported below the input cutoff.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from . import _numerics
from .errors import InvalidParameter, TruncationWarning
from .fock_core import TruncatedOperator

OUTPUT_TAIL_TOL = 1e-12
ORACLE_NODES = 61


def lambda_of(r: float, eta: float) -> float:
    """Noise parameter e^{-2r} + (1 - eta^2)/eta^2 of a teleportation link.

    Raises:
        InvalidParameter: If r < 0 or eta is outside (0, 1].
    """
    if not r >= 0:
        raise InvalidParameter(f"squeezing r must be >= 0, got {r}")
    if not 0 < eta <= 1:
        raise InvalidParameter(f"efficiency eta must lie in (0, 1], got {eta}")
    return math.exp(-2 * r) + (1 - eta * eta) / (eta * eta)


def db_to_r(s_db: float) -> float:
    """Squeezing parameter r from a squeezing level in dB (e^{2r} = 10^{s/10})."""
    if not s_db >= 0:
        raise InvalidParameter(f"squeezing in dB must be >= 0, got {s_db}")
    return s_db / 20 * math.log(10)


def r_to_db(r: float) -> float:
    """Inverse of ``db_to_r``."""
    return 20 * r / math.log(10)


def _log_binom(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1)


def loss_kernel(eta: float, k: int, d_in: int) -> np.ndarray:
    """Transfer matrix of pure loss on the k-th Fock diagonal.

    Entry [m, n] maps the coefficient of |n+k><n| onto |m+k><m| (m <= n).
    """
    n = np.arange(d_in - k, dtype=float)[None, :]
    m = np.arange(d_in - k, dtype=float)[:, None]
    j = np.maximum(n - m, 0)
    logv = (0.5 * (_log_binom(n + k, j) + _log_binom(n, j))
            + xlogy(m + k / 2, eta) + xlogy(j, 1 - eta))
    return np.where(m <= n, np.exp(logv), 0.0)


def amplifier_kernel(gain: float, k: int, d_in: int, d_out: int) -> np.ndarray:
    """Transfer matrix of the quantum-limited amplifier on the k-th diagonal.

    Entry [m, n] maps |n+k><n| onto |m+k><m| (m >= n).
    """
    n = np.arange(d_in - k, dtype=float)[None, :]
    m = np.arange(d_out - k, dtype=float)[:, None]
    j = np.maximum(m - n, 0)
    logv = (0.5 * (_log_binom(m + k, j) + _log_binom(m, j))
            + xlogy(j, 1 - 1 / gain) - (n + 1 + k / 2) * math.log(gain))
    return np.where(m >= n, np.exp(logv), 0.0)


def _active_offsets(m: np.ndarray) -> list[int]:
    d = m.shape[0]
    return [k for k in range(d)
            if np.any(np.diagonal(m, k)) or np.any(np.diagonal(m, -k))]


def _apply_offsets(m: np.ndarray, d_out: int, transfer) -> np.ndarray:
    """Builds the output matrix from per-offset transfer matrices."""
    d = m.shape[0]
    out = np.zeros((d_out, d_out), dtype=complex)
    for k in _active_offsets(m):
        if k >= d_out:
            continue
        t = transfer(k)
        idx = np.arange(d_out - k)
        out[idx, idx + k] = t @ np.diagonal(m, k)
        if k:
            out[idx + k, idx] = t @ np.diagonal(m, -k)
    return out


def _noise_matrix(m: np.ndarray, lam: float, d_out: int) -> np.ndarray:
    d = m.shape[0]
    eta, gain = 1 / (1 + lam), 1 + lam
    return _apply_offsets(
        m, d_out, lambda k: amplifier_kernel(gain, k, d, d_out) @ loss_kernel(eta, k, d))


def _noise_out_dim(m: np.ndarray, lam: float, tol: float) -> int:
    """Smallest output cutoff losing at most ``tol`` of the diagonal weight."""
    d = m.shape[0]
    pops = np.abs(np.real(np.diagonal(m)))
    total = pops.sum()
    if total == 0 or lam == 0:
        return d
    eta, gain = 1 / (1 + lam), 1 + lam
    kept_in = loss_kernel(eta, 0, d) @ pops
    pad = 16
    while True:
        out = amplifier_kernel(gain, 0, d, d + pad) @ kept_in
        lost = total - np.cumsum(out)
        ok = np.nonzero(lost <= tol * total)[0]
        if ok.size or pad > 16 * d:
            return d + pad if not ok.size else max(d, int(ok[0]) + 1)
        pad *= 2


def _two_mode_apply(op: TruncatedOperator, single, d_out: int) -> np.ndarray:
    d = op.dim
    z = op.entries.reshape(d, d, d, d)
    out = np.zeros((d_out, d, d_out, d), dtype=complex)
    for j in range(d):
        for l in range(d):
            block = z[:, j, :, l]
            if np.any(block):
                out[:, j, :, l] = single(block)
    return out.reshape(d_out * d, d_out * d)


def noise_channel_apply(rho: TruncatedOperator, lam: float, out_dim: int | None = None,
                        tail_tol: float = OUTPUT_TAIL_TOL) -> TruncatedOperator:
    """Gaussian noise channel N_lam on a single-mode operator (or mode A of two).

    Args:
        rho: Input operator.
        lam: Noise parameter, >= 0.
        out_dim: Output cutoff. By default it grows until the discarded output
            weight is below ``tail_tol`` times the input weight.
        tail_tol: Relative output tail tolerance for the automatic cutoff.

    Returns:
        The output operator; ``renorm_delta`` holds the discarded trace.
    """
    if not lam >= 0:
        raise InvalidParameter(f"noise parameter must be >= 0, got {lam}")
    m = rho.entries
    if rho.modes == 2:
        d_out = out_dim or rho.dim
        single = lambda b: _noise_matrix(b, lam, d_out)  # noqa: E731
        out = _two_mode_apply(rho, single, d_out)
        return TruncatedOperator(out, d_out, 2, rho.hermitian and _is_herm(out))
    if out_dim is None:
        out_dim = _noise_out_dim(m, lam, tail_tol)
    out = m.copy() if lam == 0 else _noise_matrix(m, lam, out_dim)
    if lam == 0 and out_dim != rho.dim:
        out = _resize(m, out_dim)
    lost = float(np.real(np.trace(m) - np.trace(out)))
    return TruncatedOperator(_herm_clean(out, rho.hermitian), out_dim, 1,
                             rho.hermitian, renorm_delta=max(lost, 0.0))


def noise_channel_oracle(rho: TruncatedOperator, lam: float, out_dim: int | None = None,
                         nodes: int = ORACLE_NODES) -> TruncatedOperator:
    """Reference N_lam from Gauss-Hermite quadrature of the displacement integral.

    N_lam(rho) = (1/(pi lam)) int exp(-|beta|^2/lam) D(beta) rho D(beta)^dag d^2beta.
    The substitution beta = sqrt(lam/(1+lam)) (u + i v) turns the integrand
    into a polynomial times exp(-u^2 - v^2), which the tensor Gauss-Hermite
    rule integrates to high accuracy.
    """
    if not lam >= 0:
        raise InvalidParameter(f"noise parameter must be >= 0, got {lam}")
    d = rho.dim
    d_out = out_dim or d
    if lam == 0:
        return TruncatedOperator(_resize(rho.entries, d_out), d_out, 1, rho.hermitian)
    u, w = np.polynomial.hermite.hermgauss(nodes)
    c2 = lam / (1 + lam)
    wpts = (u[:, None] + 1j * u[None, :]).ravel()
    wts = (w[:, None] * w[None, :]).ravel() * np.exp(c2 * np.abs(wpts) ** 2) / (np.pi * (1 + lam))
    betas = math.sqrt(c2) * wpts
    side = max(d, d_out)
    out = np.zeros((d_out, d_out), dtype=complex)
    m = rho.entries
    for s in range(0, betas.size, 256):
        D = _numerics.displacement_batch(betas[s:s + 256], side)[:, :d_out, :d]
        out += np.einsum("p,pij,jk,plk->il", wts[s:s + 256], D, m, D.conj(), optimize=True)
    return TruncatedOperator(_herm_clean(out, rho.hermitian), d_out, 1, rho.hermitian)


def loss_kraus_operators(eta: float, dim: int) -> list[np.ndarray]:
    """Kraus operators A_k with <n-k|A_k|n> = sqrt(C(n,k) eta^{n-k} (1-eta)^k)."""
    ops = []
    n = np.arange(dim, dtype=float)
    for k in range(dim):
        a = np.zeros((dim, dim))
        nn = n[k:]
        a[(nn - k).astype(int), nn.astype(int)] = np.exp(
            0.5 * (_log_binom(nn, np.full_like(nn, k)) + xlogy(nn - k, eta) + xlogy(k, 1 - eta)))
        ops.append(a)
    return ops


def pure_loss_apply(rho: TruncatedOperator, eta: float,
                    method: str = "kernel") -> TruncatedOperator:
    """Pure loss channel of transmissivity ``eta``.

    Args:
        rho: Single-mode operator (or two-mode, acting on mode A).
        eta: Transmissivity in [0, 1].
        method: ``"kernel"`` (per-diagonal transfer matrices) or ``"kraus"``
            (explicit Kraus sum, O(d^4)).
    """
    if not 0 <= eta <= 1:
        raise InvalidParameter(f"transmissivity must lie in [0, 1], got {eta}")
    d = rho.dim
    if method == "kraus":
        def single(b):
            return sum(a @ b @ a.T for a in loss_kraus_operators(eta, d))
    elif method == "kernel":
        def single(b):
            return _apply_offsets(b, d, lambda k: loss_kernel(eta, k, d))
    else:
        raise InvalidParameter(f"unknown method {method!r}")
    if rho.modes == 2:
        out = _two_mode_apply(rho, single, d)
        return TruncatedOperator(out, d, 2, rho.hermitian and _is_herm(out))
    out = single(rho.entries)
    return TruncatedOperator(_herm_clean(out, rho.hermitian), d, 1, rho.hermitian)


def displacement_channel_apply(rho: TruncatedOperator, alpha: complex,
                               out_dim: int | None = None,
                               renormalize: bool = True) -> TruncatedOperator:
    """Conjugation D(alpha) rho D(alpha)^dag, truncated to ``out_dim``.

    Warns:
        TruncationWarning: If more than 1e-6 of the trace leaves the cutoff.
    """
    d = rho.dim
    d_out = out_dim or d
    side = max(d, d_out)
    D = _numerics.displacement_batch(np.array([complex(alpha)]), side)[0][:d_out, :d]
    out = D @ rho.entries @ D.conj().T
    tr_in = complex(np.trace(rho.entries))
    delta = float(np.real(tr_in - np.trace(out)))
    if delta > 1e-6:
        warnings.warn(f"displacement by {alpha} pushes weight {delta:.3g} past the cutoff",
                      TruncationWarning, stacklevel=2)
    if renormalize and abs(np.trace(out)) > 0:
        out = out * (tr_in / np.trace(out))
    return TruncatedOperator(_herm_clean(out, rho.hermitian), d_out, 1, rho.hermitian,
                             renorm_delta=max(delta, 0.0))


def bk_teleport_output(rho: TruncatedOperator, r: float, eta: float,
                       out_dim: int | None = None) -> TruncatedOperator:
    """Output of single-mode teleportation with squeezing r and efficiency eta."""
    return noise_channel_apply(rho, lambda_of(r, eta), out_dim=out_dim)


@dataclass(frozen=True)
class ChannelSpec:
    """A channel kind with its parameters: noise, loss, displace or bk."""

    kind: str
    params: tuple

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "noise" and not (len(p) == 1 and p[0] >= 0):
            raise InvalidParameter("noise takes one parameter lam >= 0")
        elif k == "loss" and not (len(p) == 1 and 0 <= p[0] <= 1):
            raise InvalidParameter("loss takes one parameter eta in [0, 1]")
        elif k == "displace" and len(p) != 1:
            raise InvalidParameter("displace takes one complex amplitude")
        elif k == "bk" and not (len(p) == 2 and p[0] >= 0 and 0 < p[1] <= 1):
            raise InvalidParameter("bk takes (r >= 0, eta in (0, 1])")
        elif k not in ("noise", "loss", "displace", "bk"):
            raise InvalidParameter(f"unknown channel kind {k!r}")

    def apply(self, rho: TruncatedOperator, **kwargs) -> TruncatedOperator:
        if self.kind == "noise":
            return noise_channel_apply(rho, *self.params, **kwargs)
        if self.kind == "loss":
            return pure_loss_apply(rho, *self.params, **kwargs)
        if self.kind == "displace":
            return displacement_channel_apply(rho, *self.params, **kwargs)
        return bk_teleport_output(rho, *self.params, **kwargs)


def _resize(m: np.ndarray, d_out: int) -> np.ndarray:
    out = np.zeros((d_out, d_out), dtype=complex)
    s = min(d_out, m.shape[0])
    out[:s, :s] = m[:s, :s]
    return out


def _is_herm(m: np.ndarray) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= 1e-12)


def _herm_clean(m: np.ndarray, hermitian: bool) -> np.ndarray:
    return 0.5 * (m + m.conj().T) if hermitian else m
