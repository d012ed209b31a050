"""Low-level special-function recurrences and quadrature helpers.

The three-term recurrences here carry a separate logarithmic scale so that
values spanning hundreds of orders of magnitude (large photon numbers, far
phase-space tails) neither overflow nor lose precision to underflow.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, xlogy

from .errors import NumericError

_RESCALE_HI = 1e100
_RESCALE_LO = 1e-100


def _rescale(prev: np.ndarray, cur: np.ndarray, scale: np.ndarray) -> None:
    """Renormalize a recurrence pair in place, moving the size into ``scale``."""
    mag = np.maximum(np.abs(prev), np.abs(cur))
    bad = (mag > _RESCALE_HI) | ((mag < _RESCALE_LO) & (mag > 0))
    if np.any(bad):
        m = np.where(bad, mag, 1.0)
        prev /= m
        cur /= m
        scale += np.log(m)


def _unscale(cur: np.ndarray, scale: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", under="ignore", over="ignore"):
        return np.sign(cur) * np.exp(np.log(np.abs(cur)) + scale)


def laguerre_diagonals(x: np.ndarray, dim: int, kmax: int) -> np.ndarray:
    """Normalized associated-Laguerre functions used by displacement matrices.

    Computes ``G[p, k, n] = exp(-x/2) x^(k/2) sqrt(n!/(n+k)!) L_n^(k)(x)``
    for ``k <= kmax`` and ``n + k < dim``; other entries are zero. These are
    the moduli-with-sign of the displacement matrix elements on the k-th
    sub-diagonal.

    Args:
        x: Non-negative arguments |beta|^2, any shape (flattened).
        dim: Fock cutoff.
        kmax: Largest diagonal offset required.

    Returns:
        Array of shape (len(x), kmax + 1, dim).
    """
    x = np.asarray(x, dtype=float).ravel()
    kmax = min(int(kmax), dim - 1)
    k = np.arange(kmax + 1, dtype=float)[None, :]
    xx = x[:, None]
    out = np.zeros((x.size, kmax + 1, dim))
    scale = -xx / 2 + 0.5 * xlogy(k, xx) - 0.5 * gammaln(k + 1)
    scale = np.broadcast_to(scale, (x.size, kmax + 1)).copy()
    cur = np.ones_like(scale)
    prev = np.zeros_like(scale)
    valid = np.arange(kmax + 1)[None, :]
    for n in range(dim):
        mask = (valid + n) < dim
        out[:, :, n] = np.where(mask, _unscale(cur, scale), 0.0)
        nxt = ((2 * n + 1 + k - xx) * cur - np.sqrt(n * (n + k)) * prev) / np.sqrt(
            (n + 1) * (n + 1 + k)
        )
        prev, cur = cur, nxt
        _rescale(prev, cur, scale)
    return out


def displacement_batch(betas: np.ndarray, dim: int) -> np.ndarray:
    """Truncated displacement matrices for many arguments at once.

    Args:
        betas: Complex displacements, shape (P,).
        dim: Fock cutoff.

    Returns:
        Complex array of shape (P, dim, dim).
    """
    betas = np.asarray(betas, dtype=complex).ravel()
    g = laguerre_diagonals(np.abs(betas) ** 2, dim, dim - 1)
    theta = np.angle(betas)
    out = np.zeros((betas.size, dim, dim), dtype=complex)
    for k in range(dim):
        idx = np.arange(dim - k)
        lower = g[:, k, : dim - k] * np.exp(1j * k * theta)[:, None]
        out[:, idx + k, idx] = lower
        if k:
            out[:, idx, idx + k] = ((-1) ** k) * np.conj(lower)
    return out


def displacement_trace(T: np.ndarray, betas: np.ndarray, parity: bool,
                       chunk: int = 4_000_000) -> np.ndarray:
    """Evaluate Tr[T D(beta)] (optionally with the parity operator) for many betas.

    Only the diagonals of ``T`` that carry non-zero entries are visited, so
    phase-invariant operators cost O(P * dim).

    Args:
        T: Square matrix in the truncated Fock basis.
        betas: Complex displacements.
        parity: If true, computes Tr[T D(beta) Pi] with Pi = diag((-1)^n).
        chunk: Soft limit on the number of recurrence values held at once.

    Returns:
        Complex array with the shape of ``betas``.
    """
    T = np.asarray(T)
    dim = T.shape[0]
    betas = np.asarray(betas, dtype=complex)
    shape = betas.shape
    betas = betas.ravel()
    offsets = [k for k in range(dim)
               if np.any(np.diagonal(T, k) != 0) or np.any(np.diagonal(T, -k) != 0)]
    if not offsets:
        return np.zeros(shape, dtype=complex)
    kmax = max(offsets)
    sign = (-1.0) ** np.arange(dim) if parity else np.ones(dim)
    result = np.zeros(betas.size, dtype=complex)
    step = max(1, chunk // ((kmax + 1) * dim))
    for start in range(0, betas.size, step):
        b = betas[start:start + step]
        g = laguerre_diagonals(np.abs(b) ** 2, dim, kmax)
        theta = np.angle(b)
        acc = np.zeros(b.size, dtype=complex)
        for k in offsets:
            n = np.arange(dim - k)
            gk = g[:, k, : dim - k]
            ph = np.exp(1j * k * theta)
            # D[n+k, n] pairs with T[n, n+k]; parity acts on the column index n.
            up = np.diagonal(T, k) * sign[n]
            acc += ph * (gk @ up)
            if k:
                # D[n, n+k] = (-1)^k conj(phase) * g pairs with T[n+k, n].
                lo = np.diagonal(T, -k) * sign[n + k]
                acc += ((-1) ** k) * np.conj(ph) * (gk @ lo)
        result[start:start + step] = acc
    return result.reshape(shape)


def hermite_functions(nmax: int, x: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions psi_0..psi_nmax evaluated at ``x``.

    Uses psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}; no
    factorials are formed.

    Returns:
        Array of shape (nmax + 1, len(x)).
    """
    x = np.asarray(x, dtype=float).ravel()
    out = np.zeros((nmax + 1, x.size))
    scale = -x**2 / 2 - 0.25 * np.log(np.pi)
    cur = np.ones_like(x)
    prev = np.zeros_like(x)
    for n in range(nmax + 1):
        out[n] = _unscale(cur, scale)
        nxt = np.sqrt(2.0 / (n + 1)) * x * cur - np.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        _rescale(prev, cur, scale)
    return out


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached Gauss-Legendre nodes and weights on [-1, 1]."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def gl_integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                 n: int) -> float:
    """Fixed-order Gauss-Legendre rule on [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return float(half * np.dot(w, f(half * x + 0.5 * (a + b))))


def adaptive_gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                tol: float = 1e-12, order: int = 24, max_depth: int = 40) -> float:
    """Adaptive bisection with a Gauss-Legendre panel rule.

    A panel is accepted when its single-panel estimate agrees with the sum
    of its two halves to within its share of ``tol``.

    Raises:
        NumericError: If the recursion depth is exhausted.
    """
    if b <= a:
        return 0.0
    total = 0.0
    stack = [(a, b, gl_integrate(f, a, b, order), 0)]
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = gl_integrate(f, lo, mid, order)
        right = gl_integrate(f, mid, hi, order)
        share = tol * (hi - lo) / (b - a)
        if abs(left + right - whole) <= max(share, 1e-15 * abs(whole)):
            total += left + right
        elif depth >= max_depth:
            raise NumericError(f"adaptive quadrature did not converge on [{lo}, {hi}]")
        else:
            stack.append((mid, hi, right, depth + 1))
            stack.append((lo, mid, left, depth + 1))
    return total


def sign_change_roots(f: Callable[[np.ndarray], np.ndarray],
                      samples: np.ndarray, values: np.ndarray | None = None
                      ) -> list[float]:
    """Locate roots of ``f`` bracketed by sign changes between samples."""
    samples = np.asarray(samples, dtype=float)
    if values is None:
        values = np.asarray(f(samples), dtype=float)
    roots = []
    scalar = lambda t: float(f(np.array([t]))[0])  # noqa: E731
    for i in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        roots.append(brentq(scalar, samples[i], samples[i + 1], xtol=1e-14, rtol=1e-14))
    for i in np.nonzero(values == 0)[0]:
        if 0 < i < len(values) - 1:
            roots.append(float(samples[i]))
    return sorted(roots)


def abs_integral_1d(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                    samples: int, tol: float = 1e-12) -> float:
    """Integral of |f| over [a, b], split at the sign changes of f."""
    grid = np.linspace(a, b, samples)
    pts = [a] + [r for r in sign_change_roots(f, grid) if a < r < b] + [b]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += abs(adaptive_gl(f, lo, hi, tol=tol * (hi - lo) / (b - a)))
    return total
