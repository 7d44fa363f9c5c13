import math

import numpy as np
import pytest

from lodesq.generators import halton, hammersley, lattice_rule, van_der_corput


def energy_by_loops(pts):
    """Ordered-pair energy with plain Python loops; independent of the vectorised path."""
    pts = np.asarray(pts, dtype=float)
    N, d = pts.shape
    total = 0.0
    for m in range(N):
        for n in range(N):
            if m == n:
                continue
            prod = 1.0
            for k in range(d):
                prod *= 1.0 - math.log(2.0 * math.sin(math.pi * abs(pts[m, k] - pts[n, k])))
            total += prod
    return total


def central_differences(f, pts, h=1e-7):
    pts = np.array(pts, dtype=float)
    out = np.zeros_like(pts)
    for idx in np.ndindex(*pts.shape):
        up, down = pts.copy(), pts.copy()
        up[idx] += h
        down[idx] -= h
        out[idx] = (f(up) - f(down)) / (2 * h)
    return out


def grid_scan_star(pts, steps=2048):
    """Star discrepancy lower bound from every corner of a uniform grid (d <= 2).

    Uses the same open/closed local deviations as the exact enumerator, so
    0 <= exact - scan <= d / steps.
    """
    pts = np.asarray(pts, dtype=float)
    N, d = pts.shape
    g = np.arange(steps + 1) / steps
    if d == 1:
        x = pts[:, 0]
        closed = (x[None, :] <= g[:, None]).sum(1)
        open_ = (x[None, :] < g[:, None]).sum(1)
        return float(max((closed / N - g).max(), (g - open_ / N).max()))
    # 2-D: cumulative counts on the grid via searchsorted per axis
    ix_c = np.searchsorted(g, pts[:, 0], side="left")  # first grid index with g >= x
    iy_c = np.searchsorted(g, pts[:, 1], side="left")
    ix_o = np.searchsorted(g, pts[:, 0], side="right")  # first grid index with g > x
    iy_o = np.searchsorted(g, pts[:, 1], side="right")
    size = steps + 1
    closed = np.zeros((size + 1, size + 1))
    open_ = np.zeros((size + 1, size + 1))
    np.add.at(closed, (ix_c, iy_c), 1)
    np.add.at(open_, (ix_o, iy_o), 1)
    closed = closed.cumsum(0).cumsum(1)[:size, :size]
    open_ = open_.cumsum(0).cumsum(1)[:size, :size]
    vol = np.outer(g, g)
    return float(max((closed / N - vol).max(), (vol - open_ / N).max()))


def l2_by_cells(pts):
    """Exact integral of the squared local discrepancy, cell by cell (d = 1 or 2)."""
    pts = np.asarray(pts, dtype=float)
    N, d = pts.shape
    if d == 1:
        edges = np.unique(np.concatenate([[0.0, 1.0], pts[:, 0]]))
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            c = np.count_nonzero(pts[:, 0] <= a) / N  # constant count on (a, b)
            # integral of (c - y)^2 over (a, b)
            total += ((b - c) ** 3 - (a - c) ** 3) / 3.0
        return math.sqrt(total)
    xe = np.unique(np.concatenate([[0.0, 1.0], pts[:, 0]]))
    ye = np.unique(np.concatenate([[0.0, 1.0], pts[:, 1]]))
    total = 0.0
    for a0, a1 in zip(xe[:-1], xe[1:]):
        for b0, b1 in zip(ye[:-1], ye[1:]):
            c = np.count_nonzero((pts[:, 0] <= a0) & (pts[:, 1] <= b0)) / N
            # integral over the cell of (c - xy)^2 = c^2 A - 2c Ix Iy + Ix2 Iy2
            A = (a1 - a0) * (b1 - b0)
            Ix, Iy = (a1**2 - a0**2) / 2, (b1**2 - b0**2) / 2
            Ix2, Iy2 = (a1**3 - a0**3) / 3, (b1**3 - b0**3) / 3
            total += c * c * A - 2 * c * Ix * Iy + Ix2 * Iy2
    return math.sqrt(total)


def etk_by_loops(pts, M):
    pts = np.asarray(pts, dtype=float)
    N, d = pts.shape
    total = 0.0
    for k in np.ndindex(*([2 * M + 1] * d)):
        k = np.array(k) - M
        if not k.any():
            continue
        r = np.prod(np.maximum(1, np.abs(k)))
        s = sum(complex(math.cos(2 * math.pi * k @ x), math.sin(2 * math.pi * k @ x)) for x in pts)
        total += abs(s) ** 2 / r
    return total


def small_fixtures():
    """Named sets with d <= 2 and N <= 16."""
    out = {
        "single_half": np.array([[0.5]]),
        "midpoints4": ((2 * np.arange(1, 5) - 1) / 8)[:, None],
        "vdc16": van_der_corput(16).points,
        "halton16": halton(16, [2, 3]).points,
        "hammersley13": hammersley(13, [2]).points,
        "lattice13": lattice_rule(13, 5).points,
        "lattice8": lattice_rule(8, 3).points,
        "on_grid": np.array([[0.25, 0.5], [0.5, 0.125], [0.875, 0.75]]),
    }
    for seed in range(6):
        rng = np.random.default_rng(seed)
        for d in (1, 2):
            out[f"rand_d{d}_s{seed}"] = rng.random((int(rng.integers(1, 17)), d))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
