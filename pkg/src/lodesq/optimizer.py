"""Fixed-step gradient descent of the log-sine energy on the torus."""

from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass

import numpy as np

from .core import (
    DEFAULT_EPS,
    InvalidArgumentError,
    LodesqError,
    PointSet,
    as_points,
    find_degenerate_pair,
    wrap_array,
)
from .discrepancy import l2_discrepancy, star_discrepancy, star_discrepancy_sampled
from .core import BudgetExceededError
from .energy import energy, energy_gradient

logger = logging.getLogger(__name__)

MAX_HALVINGS = 20


class UnrepairableSetError(LodesqError, RuntimeError):
    """Jitter could not separate coincident coordinates.

    ``trace`` holds the records collected before the failure (possibly empty).
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


@dataclass(frozen=True)
class OptimizerConfig:
    alpha: float = 1e-5
    max_iters: int = 200
    grad_tolerance: float = 1e-9
    min_separation: float = DEFAULT_EPS
    jitter: float = 1e-9
    adaptive: bool = False
    trace_every: int = 10
    seed: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidArgumentError("alpha must be positive")
        if self.max_iters < 0:
            raise InvalidArgumentError("max_iters must be non-negative")
        if self.grad_tolerance < 0:
            raise InvalidArgumentError("grad_tolerance must be non-negative")
        if self.min_separation < 0:
            raise InvalidArgumentError("min_separation must be non-negative")
        if self.jitter < 10 * self.min_separation:
            raise InvalidArgumentError("jitter must be at least 10 * min_separation")
        if self.trace_every < 0:
            raise InvalidArgumentError("trace_every must be >= 0 (0 disables discrepancy tracing)")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    energy: float
    grad_max: float
    star_disc: float | None = None
    l2_disc: float | None = None


TRACE_FIELDS = ("iter", "energy", "grad_max", "star_disc", "l2_disc")


def write_trace_csv(trace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_FIELDS)
        for rec in trace:
            row = []
            for name in TRACE_FIELDS:
                v = getattr(rec, name)
                row.append("" if v is None else (str(v) if name == "iter" else "%.17g" % v))
            writer.writerow(row)


def gradient_step(X, alpha: float) -> PointSet:
    """One descent step ``x <- x - alpha * grad E(x)``, wrapped back onto the torus."""
    pts = as_points(X)
    return PointSet(wrap_array(pts - alpha * energy_gradient(pts)))


def jitter_degenerate(X, cfg: OptimizerConfig = OptimizerConfig()) -> PointSet:
    """Separate coincident coordinates with small seeded perturbations.

    Each repair round finds one offending pair (m, n) in dimension k and moves
    the coordinate of point n by a random amount in ``[jitter/2, jitter]``
    with random sign, drawn from ``cfg.seed``.  Non-degenerate input is returned unchanged.
    """
    pts = np.array(as_points(X))
    hit = find_degenerate_pair(pts, cfg.min_separation)
    if hit is None:
        return X if isinstance(X, PointSet) else PointSet(pts)
    rng = np.random.default_rng(cfg.seed)
    N, d = pts.shape
    for _ in range(N * d):
        m, n, k = hit
        step = rng.choice((-1.0, 1.0)) * rng.uniform(0.5, 1.0) * cfg.jitter
        pts[n, k] = wrap_array(np.array([pts[n, k] + step]))[0]
        hit = find_degenerate_pair(pts, cfg.min_separation)
        if hit is None:
            return PointSet(pts)
    raise UnrepairableSetError(
        f"could not separate coordinates after {N * d} jitter rounds; "
        f"points {hit[0]} and {hit[1]} still coincide in dimension {hit[2]}"
    )


def _discrepancies(pts, seed):
    try:
        star = star_discrepancy(pts)
    except BudgetExceededError:
        star = star_discrepancy_sampled(pts, seed=seed)
    return star, l2_discrepancy(pts)


def optimize(X, cfg: OptimizerConfig = OptimizerConfig()):
    """Run gradient descent from ``X``.

    Energy and the largest gradient entry are traced every iteration; star
    and L2 discrepancies every ``cfg.trace_every`` iterations (and at the
    start and end).  Iteration stops after ``cfg.max_iters`` steps or once
    ``max|grad| < cfg.grad_tolerance * E``.  With ``cfg.adaptive`` a step
    that raises the energy is retried with half the step size, up to 20
    times; the step size then stays reduced.

    Returns
    -------
    (PointSet, list[TraceRecord])
    """
    current = as_points(jitter_degenerate(X, cfg))
    trace: list[TraceRecord] = []
    alpha = cfg.alpha

    def record(it, E, g, force_disc=False):
        star = l2 = None
        if force_disc or (cfg.trace_every and it % cfg.trace_every == 0):
            star, l2 = _discrepancies(current, cfg.seed)
        trace.append(TraceRecord(it, E, float(np.max(np.abs(g))), star, l2))

    E = energy(current)
    grad = energy_gradient(current)
    record(0, E, grad, force_disc=True)

    it = 0
    while it < cfg.max_iters:
        if np.max(np.abs(grad)) < cfg.grad_tolerance * E:
            logger.info("gradient tolerance met after %d iterations", it)
            break
        step = alpha
        for attempt in range(MAX_HALVINGS + 1):
            candidate = wrap_array(current - step * grad)
            if find_degenerate_pair(candidate, cfg.min_separation) is not None:
                logger.warning("iteration %d produced coincident coordinates; jittering", it + 1)
                try:
                    candidate = as_points(jitter_degenerate(candidate, cfg))
                except UnrepairableSetError as exc:
                    raise UnrepairableSetError(str(exc), trace) from exc
            E_new = energy(candidate)
            if not cfg.adaptive or E_new <= E:
                break
            if attempt == MAX_HALVINGS:
                logger.info("no decrease after %d halvings; stopping", MAX_HALVINGS)
                candidate, E_new = current, E
                break
            step /= 2.0
        if cfg.adaptive and candidate is current:
            break
        alpha = step
        current, E = candidate, E_new
        grad = energy_gradient(current)
        it += 1
        record(it, E, grad)

    if trace[-1].star_disc is None:
        last = trace.pop()
        star, l2 = _discrepancies(current, cfg.seed)
        trace.append(TraceRecord(last.iter, last.energy, last.grad_max, star, l2))
    return PointSet(current), trace
