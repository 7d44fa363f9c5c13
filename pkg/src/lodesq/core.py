"""Point sets on the unit torus, torus arithmetic and CSV point I/O."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-12


class LodesqError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(LodesqError, ValueError):
    pass


class DegenerateSetError(LodesqError, ValueError):
    """Two distinct points share a coordinate (on the torus) in some dimension."""

    def __init__(self, m: int, n: int, dim: int, message: str | None = None):
        self.pair = (m, n)
        self.dim = dim
        if message is None:
            message = (
                f"degenerate point set: points {m} and {n} coincide in "
                f"dimension {dim}"
            )
        super().__init__(message)


class ParseError(LodesqError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class BudgetExceededError(LodesqError, RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class PointSet:
    """N points in [0, 1)^d, stored as an immutable (N, d) float array.

    Construction copies the input and marks the copy read-only.  Use
    :meth:`from_unwrapped` to build a set from coordinates that may lie
    outside the unit cube.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidArgumentError(
                f"points must be a non-empty N x d table, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("points contain non-finite coordinates")
        if np.any(pts < 0.0) or np.any(pts >= 1.0):
            raise InvalidArgumentError("coordinates must lie in [0, 1)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_unwrapped(cls, coords) -> "PointSet":
        return cls(wrap_array(np.asarray(coords, dtype=float)))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n_points

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"PointSet(n_points={self.n_points}, dim={self.dim})"


@dataclass(frozen=True)
class QualityReport:
    n_points: int
    dim: int
    energy: float | None = None
    star_disc: float | None = None
    l2_disc: float | None = None
    etk_square_sum: float | None = None
    star_disc_exact: bool = True

    def as_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "dim": self.dim,
            "energy": self.energy,
            "star_disc": self.star_disc,
            "star_disc_exact": self.star_disc_exact,
            "l2_disc": self.l2_disc,
            "etk_square_sum": self.etk_square_sum,
        }


def as_points(X) -> np.ndarray:
    """Return the coordinate table of a PointSet or array-like as an (N, d) array."""
    if isinstance(X, PointSet):
        return X.points
    return PointSet(X).points


def wrap(x: float) -> float:
    """Fractional part ``x - floor(x)``, guaranteed to land in [0, 1)."""
    x = float(x)
    if not math.isfinite(x):
        raise InvalidArgumentError(f"cannot wrap non-finite value {x!r}")
    r = x - math.floor(x)
    # tiny negative x rounds up to exactly 1.0
    return 0.0 if r >= 1.0 else r


def wrap_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("cannot wrap non-finite coordinates")
    r = x - np.floor(x)
    r[r >= 1.0] = 0.0
    return r


def find_degenerate_pair(X, eps: float = DEFAULT_EPS):
    """First ``(m, n, k)`` with points m < n coinciding in dimension k, else None.

    Coincidence is measured on the circle, so 0 and 1 - 1e-13 collide.
    """
    if eps < 0:
        raise InvalidArgumentError("eps must be non-negative")
    pts = as_points(X)
    for k in range(pts.shape[1]):
        order = np.argsort(pts[:, k], kind="stable")
        col = pts[order, k]
        gaps = np.diff(col)
        bad = np.flatnonzero(gaps < eps)
        if bad.size:
            i = bad[0]
            m, n = sorted((int(order[i]), int(order[i + 1])))
            return m, n, k
        if len(col) > 1:
            if 1.0 - (col[-1] - col[0]) < eps:
                m, n = sorted((int(order[0]), int(order[-1])))
                return m, n, k
    return None


def is_degenerate(X, eps: float = DEFAULT_EPS) -> bool:
    return find_degenerate_pair(X, eps) is not None


def check_nondegenerate(X, eps: float = DEFAULT_EPS) -> np.ndarray:
    pts = as_points(X)
    hit = find_degenerate_pair(pts, eps)
    if hit is not None:
        raise DegenerateSetError(*hit)
    return pts


def torus_displacement(X, Y) -> float:
    """Largest per-coordinate distance between two equally shaped sets, on the circle."""
    a, b = as_points(X), as_points(Y)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"shape mismatch {a.shape} vs {b.shape}")
    d = np.abs(a - b)
    return float(np.max(np.minimum(d, 1.0 - d)))


def _parse_rows(text: str):
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not f.strip() for f in row):
            continue
        rows.append((lineno, [f.strip() for f in row]))
    return rows


def load_points_csv(path) -> PointSet:
    """Read a point set: one point per row, optional ``x1,...,xd`` header.

    Coordinates outside [0, 1) are wrapped onto the torus and the number of
    wrapped coordinates is logged as a warning.
    """
    raw = Path(path).read_bytes().decode("utf-8-sig")
    rows = _parse_rows(raw.replace("\r\n", "\n"))
    if not rows:
        raise ParseError(1, "empty file, no points found")

    first_line, first = rows[0]
    try:
        [float(f) for f in first]
    except ValueError:
        expected = [f"x{i + 1}" for i in range(len(first))]
        if first != expected:
            raise ParseError(first_line, f"non-numeric field in {first!r}")
        rows = rows[1:]
        if not rows:
            raise ParseError(first_line, "header without any points")

    dim = len(rows[0][1])
    values = []
    for lineno, fields in rows:
        if len(fields) != dim:
            raise ParseError(lineno, f"expected {dim} fields, found {len(fields)}")
        try:
            vals = [float(f) for f in fields]
        except ValueError:
            raise ParseError(lineno, f"non-numeric field in {fields!r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(lineno, "non-finite coordinate")
        values.append(vals)

    coords = np.array(values, dtype=float)
    outside = int(np.count_nonzero((coords < 0.0) | (coords >= 1.0)))
    if outside:
        logger.warning("%s: wrapped %d coordinate(s) into [0, 1)", path, outside)
    return PointSet(wrap_array(coords))


def format_coord(x: float) -> str:
    return "%.17g" % x


def save_points_csv(X, path, header: bool = True) -> None:
    pts = as_points(X)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header:
            fh.write(",".join(f"x{i + 1}" for i in range(pts.shape[1])) + "\n")
        for row in pts:
            fh.write(",".join(format_coord(v) for v in row) + "\n")
