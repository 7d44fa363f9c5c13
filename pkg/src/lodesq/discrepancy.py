"""Quality metrics for point sets: star discrepancy, Warnock L2 discrepancy, ETK sums."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _fourier
from .core import (
    BudgetExceededError,
    InvalidArgumentError,
    QualityReport,
    as_points,
)
from .energy import energy

logger = logging.getLogger(__name__)

# N * (N+1)^d elementary operations allowed for the exact enumerator
DEFAULT_STAR_BUDGET = 10**9
DEFAULT_SAMPLED_ANCHORS = 100_000
_ANCHOR_CHUNK = 20_000


def _critical_grid(pts: np.ndarray) -> list[np.ndarray]:
    return [np.union1d(pts[:, i], [1.0]) for i in range(pts.shape[1])]


def star_discrepancy(X, budget: float = DEFAULT_STAR_BUDGET) -> float:
    """Exact star discrepancy by enumeration of the critical grid.

    Every candidate corner y takes its coordinates from the point coordinates
    (plus 1).  At each corner both the closed count (x <= y) and the open
    count (x < y) are compared with the box volume, so the result is the
    supremum over anchored boxes regardless of which faces are included.
    Counts on the whole grid come from a d-dimensional cumulative histogram.

    Raises
    ------
    BudgetExceededError
        If ``N * (N+1)**d`` exceeds ``budget``; use
        :func:`star_discrepancy_sampled` instead.
    """
    pts = as_points(X)
    N, d = pts.shape
    cost = float(N) * float(N + 1) ** d
    if cost > budget:
        raise BudgetExceededError(
            f"exact star discrepancy needs ~{cost:.3g} operations (N={N}, d={d}), "
            f"over the budget of {budget:.3g}; use star_discrepancy_sampled"
        )
    grid = _critical_grid(pts)
    shape = tuple(len(g) for g in grid)
    idx = tuple(np.searchsorted(grid[i], pts[:, i]) for i in range(d))
    closed = np.zeros(shape, dtype=np.int64)
    np.add.at(closed, idx, 1)
    for axis in range(d):
        closed = closed.cumsum(axis=axis)
    # grid values are distinct, so x < g[j] iff x <= g[j-1]
    open_ = np.pad(closed, [(1, 0)] * d)[tuple(slice(0, s) for s in shape)]

    vol = grid[0]
    for g in grid[1:]:
        vol = np.multiply.outer(vol, g)
    over = closed / N - vol
    under = vol - open_ / N
    return float(max(over.max(), under.max()))


def local_discrepancy(X, anchors) -> np.ndarray:
    """Largest one-sided deviation ``|count/N - vol|`` at each anchor, open and closed counts."""
    pts = as_points(X)
    N, d = pts.shape
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    if anchors.shape[1] != d:
        raise InvalidArgumentError(f"anchors must have {d} columns")
    out = np.empty(anchors.shape[0])
    for lo in range(0, anchors.shape[0], _ANCHOR_CHUNK):
        a = anchors[lo:lo + _ANCHOR_CHUNK]
        vol = np.prod(a, axis=1)
        le = pts[None, :, :] <= a[:, None, :]
        closed = le.all(axis=2).sum(axis=1)
        open_ = (pts[None, :, :] < a[:, None, :]).all(axis=2).sum(axis=1)
        out[lo:lo + _ANCHOR_CHUNK] = np.maximum(closed / N - vol, vol - open_ / N)
    return out


def _shifted_halton(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    from .generators import halton

    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]
    if d > len(primes):
        return rng.random((n, d))
    base = halton(n, primes[:d]).points
    return (base + rng.random(d)) % 1.0


def star_discrepancy_sampled(X, n_anchors: int = DEFAULT_SAMPLED_ANCHORS, seed: int = 0) -> float:
    """Lower bound on the star discrepancy from a finite set of anchor corners.

    Anchors are the points themselves, ``n_anchors // 2`` randomly shifted
    Halton corners, and the remaining anchors drawn at random from the
    critical grid (each coordinate picked among the point coordinates and 1).
    Every anchor value is an attained local discrepancy, so the result never
    exceeds :func:`star_discrepancy`.
    """
    if n_anchors < 1:
        raise InvalidArgumentError("n_anchors must be >= 1")
    pts = as_points(X)
    N, d = pts.shape
    rng = np.random.default_rng(seed)
    n_qmc = n_anchors // 2
    n_grid = n_anchors - n_qmc
    grid = _critical_grid(pts)
    parts = [pts]
    if n_qmc:
        parts.append(_shifted_halton(n_qmc, d, rng))
    if n_grid:
        parts.append(np.column_stack([rng.choice(g, size=n_grid) for g in grid]))
    return float(local_discrepancy(pts, np.vstack(parts)).max())


def l2_discrepancy(X) -> float:
    """L2 star discrepancy via Warnock's closed formula.

    L2^2 = 3^-d - (2/N) sum_n prod_i (1 - x_{n,i}^2)/2
           + (1/N^2) sum_{n,m} prod_i min(1 - x_{n,i}, 1 - x_{m,i})
    """
    pts = as_points(X)
    N, d = pts.shape
    first = 3.0 ** (-d)
    second = 2.0 / N * np.sum(np.prod((1.0 - pts**2) / 2.0, axis=1))
    comp = 1.0 - pts
    cross = 0.0
    step = max(1, 4_000_000 // max(N * d, 1))
    for lo in range(0, N, step):
        block = np.minimum(comp[lo:lo + step, None, :], comp[None, :, :])
        cross += float(np.prod(block, axis=2).sum())
    sq = first - second + cross / N**2
    # difference of near-equal terms; clamp rounding noise
    return float(np.sqrt(max(sq, 0.0)))


@dataclass(frozen=True)
class EtkSpec:
    """Frequency cutoff ``|k|_inf <= M`` for the weighted exponential-sum surrogate."""

    M: int

    def __post_init__(self):
        if int(self.M) < 1:
            raise InvalidArgumentError("ETK cutoff M must be >= 1")


def etk_square_sum(X, spec: EtkSpec | int, budget: int = _fourier.DEFAULT_FOURIER_BUDGET) -> float:
    """``sum_{k != 0, |k|_inf <= M} |sum_l e^{2 pi i <k, x_l>}|^2 / r(k)`` with
    ``r(k) = prod_j max(1, |k_j|)``."""
    M = spec.M if isinstance(spec, EtkSpec) else EtkSpec(int(spec)).M
    pts = as_points(X)
    d = pts.shape[1]
    S = _fourier.exponential_sums(pts, M, budget=budget)
    inv_r1 = 1.0 / np.maximum(1, np.abs(_fourier.frequency_axis(M)))
    weight = inv_r1
    for _ in range(1, d):
        weight = np.multiply.outer(weight, inv_r1)
    power = np.abs(S) ** 2
    power[(M,) * d] = 0.0
    return float(np.sum(weight * power))


def quality_report(
    X,
    metrics=("energy", "star", "l2", "etk"),
    etk_M: int | None = None,
    star_budget: float = DEFAULT_STAR_BUDGET,
    n_anchors: int = DEFAULT_SAMPLED_ANCHORS,
    seed: int = 0,
) -> QualityReport:
    """Collect the requested metrics.  ``etk_M`` defaults to N.

    The star discrepancy falls back to the sampled lower bound when the exact
    enumeration is over budget; ``star_disc_exact`` records which one was used.
    """
    pts = as_points(X)
    N, d = pts.shape
    unknown = set(metrics) - {"energy", "star", "l2", "etk"}
    if unknown:
        raise InvalidArgumentError(f"unknown metric(s): {sorted(unknown)}")
    values = {}
    if "energy" in metrics:
        values["energy"] = energy(pts)
    if "star" in metrics:
        try:
            values["star_disc"] = star_discrepancy(pts, budget=star_budget)
        except BudgetExceededError:
            logger.info("exact star discrepancy over budget; using sampled lower bound")
            values["star_disc"] = star_discrepancy_sampled(pts, n_anchors, seed)
            values["star_disc_exact"] = False
    if "l2" in metrics:
        values["l2_disc"] = l2_discrepancy(pts)
    if "etk" in metrics:
        values["etk_square_sum"] = etk_square_sum(pts, EtkSpec(etk_M or N))
    return QualityReport(n_points=N, dim=d, **values)
