"""Classical low-discrepancy point sets used as starting configurations.

Index conventions
-----------------
* van der Corput / Halton: points n = start_index, ..., start_index + N - 1,
  with start_index = 1 by default so the all-zero point is skipped.
* Hammersley and lattice rules: n = 0, ..., N - 1.
* Kronecker: n = 1, ..., N by default.
* Sobol: Gray-code ordering, starting at index 1 (the all-zero point at
  index 0 is skipped), so the first dimension reads 0.5, 0.75, 0.25, ...
  and the first point is (0.5, ..., 0.5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import InvalidArgumentError, LodesqError, PointSet, wrap_array

KINDS = ("van_der_corput", "halton", "hammersley", "kronecker", "lattice", "sobol", "random")
KIND_ALIASES = {"vdc": "van_der_corput"}

# Joe & Kuo direction numbers (file new-joe-kuo-6.21201), dimensions 2..8.
# Each row: (degree s, polynomial coefficient a, initial m_1..m_s).
# Dimension 1 uses m_k = 1 for all k, i.e. the base-2 van der Corput sequence.
SOBOL_DIRECTION_TABLE = (
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
)
SOBOL_MAX_DIM = len(SOBOL_DIRECTION_TABLE) + 1
_SOBOL_BITS = 32


class UnsupportedDimensionError(LodesqError, ValueError):
    pass


def radical_inverse(n: int, b: int) -> float:
    """Reflect the base-``b`` digits of ``n`` about the radix point.

    >>> radical_inverse(3, 2)
    0.75
    """
    if b < 2:
        raise InvalidArgumentError(f"base must be >= 2, got {b}")
    if n < 0:
        raise InvalidArgumentError(f"index must be non-negative, got {n}")
    rev, denom = 0, 1
    while n:
        n, digit = divmod(n, b)
        rev = rev * b + digit
        denom *= b
    return rev / denom


def _radical_inverse_array(idx: np.ndarray, b: int) -> np.ndarray:
    if b < 2:
        raise InvalidArgumentError(f"base must be >= 2, got {b}")
    n = np.array(idx, dtype=np.int64)
    rev = np.zeros_like(n)
    denom = np.ones_like(n)
    while np.any(n):
        digit = n % b
        live = n > 0
        rev = np.where(live, rev * b + digit, rev)
        denom = np.where(live, denom * b, denom)
        n //= b
    return rev / denom


def _check_bases(bases):
    bases = [int(b) for b in bases]
    for b in bases:
        if b < 2:
            raise InvalidArgumentError(f"bases must be integers >= 2, got {b}")
    for b1, b2 in combinations(bases, 2):
        if math.gcd(b1, b2) != 1:
            raise InvalidArgumentError(f"bases {b1} and {b2} are not coprime")
    return bases


def _check_count(N):
    if int(N) < 1:
        raise InvalidArgumentError(f"number of points must be positive, got {N}")
    return int(N)


def halton(N: int, bases, start_index: int = 1) -> PointSet:
    N = _check_count(N)
    bases = _check_bases(bases)
    if not bases:
        raise InvalidArgumentError("at least one base is required")
    if start_index < 0:
        raise InvalidArgumentError("start_index must be non-negative")
    idx = np.arange(start_index, start_index + N)
    return PointSet(np.column_stack([_radical_inverse_array(idx, b) for b in bases]))


def van_der_corput(N: int, b: int = 2, start_index: int = 1) -> PointSet:
    return halton(N, [b], start_index)


def hammersley(N: int, bases, start_index: int = 0, inverse_offset: int = 0) -> PointSet:
    """Hammersley set: point n is ({n/N}, phi_b1(n + offset), ...).

    With ``inverse_offset=1`` the radical-inverse columns follow the Halton
    indexing (starting at 1) while the first column stays 0, 1/N, ...
    """
    N = _check_count(N)
    bases = _check_bases(bases)
    if start_index < 0 or start_index + inverse_offset < 0:
        raise InvalidArgumentError("indices must be non-negative")
    idx = np.arange(start_index, start_index + N)
    cols = [wrap_array(idx / N)]
    cols += [_radical_inverse_array(idx + inverse_offset, b) for b in bases]
    return PointSet(np.column_stack(cols))


def kronecker(N: int, alphas, start_index: int = 1) -> PointSet:
    N = _check_count(N)
    alphas = np.asarray(alphas, dtype=float).ravel()
    if alphas.size == 0 or not np.all(np.isfinite(alphas)):
        raise InvalidArgumentError("alphas must be a non-empty list of finite reals")
    n = np.arange(start_index, start_index + N, dtype=float)
    return PointSet(wrap_array(np.outer(n, alphas)))


def is_involution(N: int, a: int) -> bool:
    return (a * a) % N == 1 % N


def lattice_rule(N: int, a: int) -> PointSet:
    """Rank-1 lattice {(n/N, {a n / N}) : 0 <= n < N} in two dimensions."""
    N = _check_count(N)
    a = int(a)
    if math.gcd(a, N) != 1:
        raise InvalidArgumentError(f"lattice multiplier {a} is not coprime to N={N}")
    n = np.arange(N, dtype=np.int64)
    return PointSet(np.column_stack([n / N, (a * n) % N / N]))


def _sobol_directions(dim: int) -> np.ndarray:
    L = _SOBOL_BITS
    v = np.zeros((dim, L), dtype=np.uint64)
    v[0] = [1 << (L - k) for k in range(1, L + 1)]
    for j in range(1, dim):
        s, a, m = SOBOL_DIRECTION_TABLE[j - 1]
        row = [0] * (L + 1)  # 1-based
        for k in range(1, L + 1):
            if k <= s:
                row[k] = m[k - 1] << (L - k)
            else:
                val = row[k - s] ^ (row[k - s] >> s)
                for r in range(1, s):
                    if (a >> (s - 1 - r)) & 1:
                        val ^= row[k - r]
                row[k] = val
        v[j] = row[1:]
    return v


def sobol(N: int, d: int) -> PointSet:
    """First ``N`` points (Gray-code order, from index 1) of the unscrambled Sobol sequence."""
    N = _check_count(N)
    if d < 1:
        raise InvalidArgumentError("dimension must be positive")
    if d > SOBOL_MAX_DIM:
        raise UnsupportedDimensionError(
            f"embedded Sobol direction numbers cover d <= {SOBOL_MAX_DIM}; "
            f"import higher-dimensional sets from a CSV file instead"
        )
    if N >= 2**31:
        raise InvalidArgumentError("at most 2**31 - 1 Sobol points are supported")
    v = _sobol_directions(d)
    n = np.arange(1, N + 1, dtype=np.uint64)
    gray = n ^ (n >> np.uint64(1))
    out = np.zeros((N, d), dtype=np.uint64)
    for bit in range(_SOBOL_BITS):
        on = ((gray >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        if not on.any():
            break
        out[on] ^= v[:, bit]
    return PointSet(out.astype(float) / float(1 << _SOBOL_BITS))


def random_points(N: int, d: int, seed: int) -> PointSet:
    """Uniform points from numpy's PCG64 generator (``numpy.random.default_rng(seed)``)."""
    N = _check_count(N)
    if d < 1:
        raise InvalidArgumentError("dimension must be positive")
    rng = np.random.default_rng(seed)
    return PointSet(rng.random((N, d)))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n_points: int
    params: tuple = ()
    dim: int | None = None
    start_index: int | None = None
    seed: int = 0
    inverse_offset: int = 0

    def __post_init__(self):
        kind = KIND_ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise InvalidArgumentError(f"unknown generator kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(self.params))

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_points": self.n_points,
            "params": list(self.params),
            "dim": self.dim,
            "start_index": self.start_index,
            "seed": self.seed,
            "inverse_offset": self.inverse_offset,
        }


def generate(spec: GeneratorSpec) -> PointSet:
    kind, N, p = spec.kind, spec.n_points, spec.params
    si = spec.start_index

    def need_params():
        if not p:
            raise InvalidArgumentError(f"generator {kind!r} needs --params")

    if kind == "van_der_corput":
        need_params()
        if len(p) != 1:
            raise InvalidArgumentError("van der Corput takes exactly one base")
        return van_der_corput(N, int(p[0]), 1 if si is None else si)
    if kind == "halton":
        need_params()
        return halton(N, [int(b) for b in p], 1 if si is None else si)
    if kind == "hammersley":
        need_params()
        return hammersley(N, [int(b) for b in p], 0 if si is None else si, spec.inverse_offset)
    if kind == "kronecker":
        need_params()
        return kronecker(N, [float(x) for x in p], 1 if si is None else si)
    if kind == "lattice":
        need_params()
        if len(p) != 1:
            raise InvalidArgumentError("lattice takes exactly one multiplier a")
        return lattice_rule(N, int(p[0]))
    if kind == "sobol":
        return sobol(N, spec.dim or 1)
    if kind == "random":
        return random_points(N, spec.dim or 1, spec.seed)
    raise InvalidArgumentError(f"unknown generator kind {kind!r}")  # pragma: no cover
