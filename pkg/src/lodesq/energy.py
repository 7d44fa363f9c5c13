"""Log-sine pair energy on the torus and its analytic gradient.

The energy of a set X = {x_1, ..., x_N} in [0, 1)^d is

    E(X) = sum_{m != n} prod_k (1 - log(2 sin(pi |x_{m,k} - x_{n,k}|)))

summed over *ordered* pairs.  The gradient therefore carries a factor 2
relative to a sum over unordered pairs:

    dE/dx_{n,i} = 2 sum_{m != n} prod_{k != i} K(x_{m,k} - x_{n,k})
                                 * K'(x_{n,i} - x_{m,i})

with K(u) = 1 - log(2 sin(pi |u|)) and K'(u) = -pi cot(pi |u|) sign(u).
Raw coordinate differences u in (-1, 1) are used without wrapping: both
K and K' are already 1-periodic in that form.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _fourier
from .core import (
    DEFAULT_EPS,
    DegenerateSetError,
    InvalidArgumentError,
    LodesqError,
    as_points,
    check_nondegenerate,
)

KERNEL_FLOOR = 1.0 - math.log(2.0)
THREADS_ENV = "LODESQ_THREADS"


class DegenerateCoordinateError(LodesqError, ValueError):
    """Kernel evaluated at a coordinate difference of 0 (mod 1)."""


def partition_count(partitions: int | None = None) -> int:
    """Number of row partitions for pair sums; defaults to ``$LODESQ_THREADS`` or 1."""
    if partitions is not None:
        if int(partitions) < 1:
            raise InvalidArgumentError("partitions must be a positive integer")
        return int(partitions)
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InvalidArgumentError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def _kernel(t: np.ndarray) -> np.ndarray:
    s = np.minimum(t, 1.0 - t)
    return 1.0 - np.log(2.0 * np.sin(np.pi * s))


def _slope(u: np.ndarray) -> np.ndarray:
    a = np.abs(u)
    s = np.minimum(a, 1.0 - a)
    cot = np.where(a <= 0.5, 1.0, -1.0) / np.tan(np.pi * s)
    return -np.pi * np.sign(u) * cot


def logsin_kernel(t):
    """``1 - log(2 sin(pi t))`` for 0 < t < 1; never below ``1 - log 2``."""
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise InvalidArgumentError("kernel argument must lie in (0, 1)")
    if np.any(np.minimum(arr, 1.0 - arr) < DEFAULT_EPS):
        raise DegenerateCoordinateError("kernel evaluated at a coincident coordinate (t = 0 or 1)")
    out = _kernel(arr)
    return float(out) if out.ndim == 0 else out


def kernel_slope(u):
    """Derivative of the kernel in the signed difference u: ``-pi cot(pi |u|) sign(u)``."""
    arr = np.asarray(u, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) >= 1.0):
        raise InvalidArgumentError("slope argument must lie in (-1, 1)")
    a = np.abs(arr)
    if np.any(np.minimum(a, 1.0 - a) < DEFAULT_EPS):
        raise DegenerateCoordinateError("slope evaluated at a coincident coordinate (u = 0)")
    out = _slope(arr)
    return float(out) if out.ndim == 0 else out


def _row_chunks(N: int, parts: int):
    bounds = np.linspace(0, N, min(parts, N) + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run(fn, chunks, parts):
    if parts == 1 or len(chunks) == 1:
        return [fn(*c) for c in chunks]
    with ThreadPoolExecutor(max_workers=parts) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


def energy(X, partitions: int | None = None, eps: float = DEFAULT_EPS) -> float:
    """Pair energy E(X), summed over ordered pairs.

    Raises
    ------
    DegenerateSetError
        If two points share a coordinate (within ``eps`` on the circle).
    """
    pts = check_nondegenerate(X, eps)
    N = pts.shape[0]
    if N == 1:
        return 0.0
    parts = partition_count(partitions)

    def block(lo, hi):
        total = 0.0
        for n in range(lo, hi):
            u = np.abs(pts[n + 1:] - pts[n])
            if u.size:
                total += float(np.prod(_kernel(u), axis=1).sum())
        return total

    partial = _run(block, _row_chunks(N, parts), parts)
    # fixed left-to-right reduction keeps results reproducible per partition count
    return 2.0 * math.fsum(partial)


def _leave_one_out_products(K: np.ndarray) -> np.ndarray:
    """P[..., i] = prod_{k != i} K[..., k] via prefix and suffix products."""
    ones = np.ones(K.shape[:-1] + (1,))
    prefix = np.concatenate([ones, np.cumprod(K[..., :-1], axis=-1)], axis=-1)
    suffix = np.concatenate([np.cumprod(K[..., :0:-1], axis=-1)[..., ::-1], ones], axis=-1)
    return prefix * suffix


def energy_gradient(X, partitions: int | None = None, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Gradient field of :func:`energy`, an (N, d) array matching the input shape."""
    pts = check_nondegenerate(X, eps)
    N, d = pts.shape
    parts = partition_count(partitions)

    def block(lo, hi):
        U = pts[lo:hi, None, :] - pts[None, :, :]  # x_n - x_m
        rows = np.arange(lo, hi)
        # placeholder on the diagonal keeps the kernel finite; its slope is zeroed
        U[rows - lo, rows, :] = 0.5
        K = _kernel(np.abs(U))
        S = _slope(U)
        S[rows - lo, rows, :] = 0.0
        return 2.0 * np.einsum("nmi,nmi->ni", _leave_one_out_products(K), S)

    return np.vstack(_run(block, _row_chunks(N, parts), parts))


def normalized_energy(X) -> float:
    """E(X) / N^2 for a one-dimensional set; tends to 1 for uniformly distributed sequences."""
    pts = as_points(X)
    if pts.shape[1] != 1:
        raise InvalidArgumentError("normalized energy is defined for one-dimensional sets only")
    return energy(pts) / pts.shape[0] ** 2


@dataclass(frozen=True)
class SpectralSpec:
    """Frequency weight ``(2 pi |m|_2)**sigma`` truncated to ``|m|_inf <= M``."""

    sigma: float
    M: int

    def __post_init__(self):
        if int(self.M) < 1:
            raise InvalidArgumentError("frequency cutoff M must be >= 1")
        if self.sigma >= 0:
            warnings.warn(
                f"sigma = {self.sigma} >= 0: truncated sums grow with M", RuntimeWarning, stacklevel=2
            )


def _spectral_weights(M: int, d: int, sigma: float) -> np.ndarray:
    grid = _fourier.frequency_grid(M, d)
    norm = np.sqrt(sum(g.astype(float) ** 2 for g in grid))
    w = np.zeros_like(norm)
    nz = norm > 0
    w[nz] = (2.0 * np.pi * norm[nz]) ** sigma
    return w


def spectral_energy(X, spec: SpectralSpec) -> float:
    """Truncated spectral pair energy.

    ``sum_{k != l} sum_{0 < |m|_inf <= M} (2 pi |m|_2)^sigma cos(2 pi <m, x_k - x_l>)``,
    evaluated as ``sum_m w(m) (|S(m)|^2 - N)`` with S the exponential sum of X.
    At sigma = -1 in one dimension this tends to ``-(1/pi) sum log(2 sin(pi |x_k - x_l|))``.
    """
    pts = check_nondegenerate(X)
    N, d = pts.shape
    if N == 1:
        return 0.0
    S = _fourier.exponential_sums(pts, spec.M)
    w = _spectral_weights(spec.M, d, spec.sigma)
    return float(np.sum(w * (np.abs(S) ** 2 - N)))


def spectral_gradient(X, spec: SpectralSpec) -> np.ndarray:
    """Gradient of :func:`spectral_energy` with respect to every coordinate."""
    pts = check_nondegenerate(X)
    N, d = pts.shape
    M = spec.M
    S = _fourier.exponential_sums(pts, M).ravel()
    w = _spectral_weights(M, d, spec.sigma).ravel()
    freqs = np.stack([g.ravel() for g in _fourier.frequency_grid(M, d)], axis=1).astype(float)
    if freqs.shape[0] * N > _fourier.DEFAULT_FOURIER_BUDGET:
        raise _fourier.BudgetExceededError("spectral gradient exceeds the frequency budget")
    phase = np.exp(2j * np.pi * (pts @ freqs.T))  # (N, K^d)
    # d|S(m)|^2 / dx_{n,i} = 2 Re(conj(S(m)) * 2 pi i m_i e^{2 pi i <m, x_n>})
    core = np.real(np.conj(S)[None, :] * 2j * np.pi * phase) * (2.0 * w)[None, :]
    return core @ freqs


def partial_cosine_sum(n: int, x: float) -> float:
    """``sum_{k=1}^{n} cos(2 pi k x) / k``."""
    if int(n) < 1:
        raise InvalidArgumentError("n must be a positive integer")
    total = 0.0
    chunk = 1 << 16
    for lo in range(1, int(n) + 1, chunk):
        k = np.arange(lo, min(lo + chunk, int(n) + 1), dtype=float)
        total += float(np.sum(np.cos(2.0 * np.pi * k * x) / k))
    return total


def max_partial_cosine_sum(n_max: int, xs) -> np.ndarray:
    """``max_{1 <= n <= n_max} sum_{k=1}^{n} cos(2 pi k x) / k`` for every x in ``xs``."""
    from ._sweeps import running_max_cosine_sums

    xs = np.ascontiguousarray(np.asarray(xs, dtype=float).ravel())
    return running_max_cosine_sums(int(n_max), xs)


__all__ = [
    "DegenerateCoordinateError",
    "DegenerateSetError",
    "KERNEL_FLOOR",
    "SpectralSpec",
    "energy",
    "energy_gradient",
    "kernel_slope",
    "logsin_kernel",
    "max_partial_cosine_sum",
    "normalized_energy",
    "partial_cosine_sum",
    "spectral_energy",
    "spectral_gradient",
]
