"""Numerical checks for rank-1 lattices {(n/N, {an/N})} as critical points of the energy.

Moving the lattice point at the origin by (eps, delta) changes the energy,
to second order, by a quadratic form proportional to

    eps^2 * sum_I + 2 eps delta * sum_II + delta^2 * sum_III

with (k = 1, ..., N-1, t_k = k/N, s_k = {ak/N}, K(t) = 1 - log(2 sin(pi t)))

    sum_I   = sum csc^2(pi t_k) K(s_k)
    sum_II  = sum cot(pi t_k) cot(pi s_k)
    sum_III = sum csc^2(pi s_k) K(t_k)

The form is positive definite iff sum_I * sum_III > sum_II^2.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import InvalidArgumentError
from .energy import _kernel, energy, energy_gradient
from .generators import is_involution, lattice_rule

logger = logging.getLogger(__name__)

REPORT_FIELDS = (
    "n", "a", "involution", "grad_residual",
    "sum_I", "sum_II", "sum_III", "sum_1", "sum_2", "sum_3",
    "second_order_ok", "conjecture_ok",
)
DEFAULT_EPS_GRID = (1e-5, 1e-4, 1e-3)


def _check_pair(n, a):
    n, a = int(n), int(a)
    if n < 2:
        raise InvalidArgumentError(f"lattice size must be >= 2, got {n}")
    if math.gcd(a, n) != 1:
        raise InvalidArgumentError(f"multiplier {a} is not coprime to n={n}")
    return n, a


def _fractions(n, a):
    k = np.arange(1, n, dtype=np.int64)
    return k / n, (a * k) % n / n


def second_order_sums(n: int, a: int) -> tuple[float, float, float]:
    """Raw second-order coefficient sums (sum_I, sum_II, sum_III), prefactors stripped."""
    n, a = _check_pair(n, a)
    t, s = _fractions(n, a)
    csc2_t = 1.0 / np.sin(np.pi * t) ** 2
    csc2_s = 1.0 / np.sin(np.pi * s) ** 2
    sum_I = math.fsum(csc2_t * _kernel(s))
    sum_II = math.fsum(1.0 / np.tan(np.pi * t) / np.tan(np.pi * s))
    sum_III = math.fsum(csc2_s * _kernel(t))
    return sum_I, sum_II, sum_III


def criticality_residual(n: int, a: int) -> float:
    """``max |grad E| / E`` at the lattice rule; zero up to rounding for every coprime pair."""
    n, a = _check_pair(n, a)
    X = lattice_rule(n, a)
    return float(np.max(np.abs(energy_gradient(X))) / energy(X))


def _origin_energy_change(pts: np.ndarray, shift: np.ndarray) -> float:
    """E(X with point 0 moved by ``shift``) - E(X), keeping only the terms that change."""
    others = pts[1:]
    before = np.prod(_kernel(np.abs(others - pts[0])), axis=1)
    moved = (pts[0] + shift) % 1.0
    after = np.prod(_kernel(np.abs(others - moved)), axis=1)
    return 2.0 * math.fsum(after - before)


@dataclass(frozen=True)
class ProbeResult:
    n: int
    a: int
    eps_grid: tuple
    increases: np.ndarray  # (n_directions, len(eps_grid))
    slopes: np.ndarray  # log-log slope per direction
    strict_increase: bool
    quadratic: bool

    @property
    def ok(self) -> bool:
        return self.strict_increase and self.quadratic


def probe_origin(n: int, a: int, eps_grid=DEFAULT_EPS_GRID, n_directions: int = 16,
                 seed: int = 0, slope_window: float = 0.1) -> ProbeResult:
    """Move the origin lattice point by each eps in random unit directions and record dE."""
    n, a = _check_pair(n, a)
    eps_grid = tuple(float(e) for e in eps_grid)
    pts = lattice_rule(n, a).points
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n_directions)
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    inc = np.array([[_origin_energy_change(pts, e * u) for e in eps_grid] for u in dirs])
    positive = [e for e in eps_grid if e > 0]
    strict = bool(np.all(inc[:, [i for i, e in enumerate(eps_grid) if e > 0]] > 0))
    slopes = np.full(n_directions, np.nan)
    if strict and len(positive) >= 2:
        cols = [i for i, e in enumerate(eps_grid) if e > 0]
        logeps = np.log(np.array(positive))
        for j in range(n_directions):
            slopes[j] = np.polyfit(logeps, np.log(inc[j, cols]), 1)[0]
    quadratic = bool(np.all(np.abs(slopes - 2.0) <= slope_window))
    return ProbeResult(n, a, eps_grid, inc, slopes, strict, quadratic)


def local_min_probe(n: int, a: int, eps_grid=DEFAULT_EPS_GRID, n_directions: int = 16,
                    seed: int = 0) -> bool:
    """True iff every probe raises the energy and the rise scales like eps^2 (slope 2 +- 0.1)."""
    return probe_origin(n, a, eps_grid, n_directions, seed).ok


def cot_csc_margin(x, y):
    """RHS - LHS of ``2|cot(pi x) cot(pi y)| < K(x) csc^2(pi y) + csc^2(pi x) K(y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x <= 0) | (x >= 1) | (y <= 0) | (y >= 1)):
        raise InvalidArgumentError("inputs must lie strictly inside (0, 1)")
    fx = np.pi * np.minimum(x, 1.0 - x)
    fy = np.pi * np.minimum(y, 1.0 - y)
    lhs = 2.0 * np.abs(1.0 / np.tan(fx) / np.tan(fy))
    rhs = _kernel(x) / np.sin(fy) ** 2 + _kernel(y) / np.sin(fx) ** 2
    return rhs - lhs


def cot_csc_check(x, y):
    """Whether the cot-csc inequality holds strictly at (x, y); vectorised over arrays."""
    out = cot_csc_margin(x, y) > 0
    return bool(out) if np.ndim(out) == 0 else out


def conjecture_sums(n: int, a: int) -> dict:
    """The three second-order sums with both readings of the definiteness test.

    ``printed_ok`` is the literal test sum_1 * sum_2 >= sum_3**2 with
    (sum_1, sum_2, sum_3) = (sum_I, sum_II, sum_III).  ``determinant_ok`` is
    the positive semi-definiteness test sum_I * sum_III >= sum_II**2.
    """
    s1, s2, s3 = second_order_sums(n, a)
    return {
        "sum_1": s1,
        "sum_2": s2,
        "sum_3": s3,
        "printed_ok": bool(s1 * s2 >= s3 * s3),
        "determinant_ok": bool(s1 * s3 >= s2 * s2),
    }


@dataclass(frozen=True)
class LatticeReport:
    n: int
    a: int
    involution: bool
    grad_residual: float
    sum_I: float
    sum_II: float
    sum_III: float
    sum_1: float
    sum_2: float
    sum_3: float
    second_order_ok: bool
    conjecture_ok: bool
    determinant_ok: bool

    def as_dict(self) -> dict:
        return asdict(self)


def lattice_report(n: int, a: int) -> LatticeReport:
    n, a = _check_pair(n, a)
    sum_I, sum_II, sum_III = second_order_sums(n, a)
    conj = conjecture_sums(n, a)
    return LatticeReport(
        n=n,
        a=a,
        involution=is_involution(n, a),
        grad_residual=criticality_residual(n, a),
        sum_I=sum_I,
        sum_II=sum_II,
        sum_III=sum_III,
        sum_1=conj["sum_1"],
        sum_2=conj["sum_2"],
        sum_3=conj["sum_3"],
        second_order_ok=bool(abs(sum_II) <= sum_I + sum_III),
        conjecture_ok=conj["printed_ok"],
        determinant_ok=conj["determinant_ok"],
    )


def coprime_pairs(n_max: int, n_min: int = 2):
    for n in range(n_min, n_max + 1):
        for a in range(1, n):
            if math.gcd(a, n) == 1:
                yield n, a


def lattice_sweep(n_max: int) -> list[LatticeReport]:
    return [lattice_report(n, a) for n, a in coprime_pairs(n_max)]


def write_report_csv(reports, path_or_file) -> None:
    def _write(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        for r in reports:
            row = []
            for name in REPORT_FIELDS:
                v = getattr(r, name)
                if isinstance(v, bool):
                    row.append("true" if v else "false")
                elif isinstance(v, float):
                    row.append("%.17g" % v)
                else:
                    row.append(str(v))
            writer.writerow(row)

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            _write(fh)
