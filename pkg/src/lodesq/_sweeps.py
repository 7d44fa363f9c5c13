"""Compiled inner loops for long one-dimensional sweeps."""

import numba
import numpy as np


@numba.njit(cache=True, parallel=False)
def running_max_cosine_sums(n_max, xs):
    out = np.empty(xs.shape[0])
    for j in range(xs.shape[0]):
        step = np.exp(2j * np.pi * xs[j])
        z = step
        total = 0.0
        best = -np.inf
        for k in range(1, n_max + 1):
            total += z.real / k
            if total > best:
                best = total
            z *= step
            # keep |z| = 1 against rounding drift
            if k % 4096 == 0:
                z = np.exp(2j * np.pi * ((k + 1) * xs[j] % 1.0))
        out[j] = best
    return out
