"""Exponential sums over a full frequency box, shared by the spectral and ETK code."""

from __future__ import annotations

import numpy as np

from .core import BudgetExceededError

# Maximum number of complex entries held in one intermediate table.
DEFAULT_FOURIER_BUDGET = 60_000_000


def frequency_axis(M: int) -> np.ndarray:
    return np.arange(-M, M + 1)


def exponential_sums(pts: np.ndarray, M: int, budget: int = DEFAULT_FOURIER_BUDGET) -> np.ndarray:
    """S[k] = sum_l exp(2 pi i <k, x_l>) for every k with |k|_inf <= M.

    Returned as a d-dimensional array of side 2M+1; index j along an axis
    stands for frequency j - M.
    """
    N, d = pts.shape
    K = 2 * M + 1
    largest = K ** (d - 1) * max(N, K)
    if largest > budget:
        raise BudgetExceededError(
            f"frequency box (2M+1)^d = {K}^{d} with N = {N} needs ~{largest:.3g} "
            f"entries, above the budget of {budget:.3g}"
        )
    k = frequency_axis(M)
    # per-dimension factors E_j[k, l] = exp(2 pi i k x_{l,j})
    factors = [np.exp(2j * np.pi * np.outer(k, pts[:, j])) for j in range(d)]
    if d == 1:
        return factors[0].sum(axis=1)
    T = factors[0]
    for j in range(1, d - 1):
        T = (T[..., None, :] * factors[j][(None,) * (T.ndim - 1)]).reshape(-1, N)
    S = T @ factors[-1].T
    return S.reshape((K,) * d)


def frequency_grid(M: int, d: int) -> list[np.ndarray]:
    k = frequency_axis(M)
    return np.meshgrid(*([k] * d), indexing="ij")
