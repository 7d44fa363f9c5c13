import math

import numpy as np
import pytest

from lodesq.core import (
    DegenerateSetError,
    InvalidArgumentError,
    PointSet,
    is_degenerate,
    torus_displacement,
)
from lodesq.energy import energy
from lodesq.generators import halton, hammersley, kronecker, lattice_rule, random_points, sobol
from lodesq.optimizer import (
    OptimizerConfig,
    TraceRecord,
    UnrepairableSetError,
    gradient_step,
    jitter_degenerate,
    optimize,
    write_trace_csv,
)


def test_gradient_step_fixed_points():
    X = lattice_rule(5, 2)
    np.testing.assert_allclose(gradient_step(X, 0.1).points, X.points, atol=1e-12)
    assert torus_displacement(gradient_step([[0.0], [0.5]], 3.0), [[0.0], [0.5]]) < 1e-13


def test_gradient_step_descends():
    X = random_points(20, 2, 5)
    assert energy(gradient_step(X, 1e-6)) < energy(X)


def test_gradient_step_degenerate():
    with pytest.raises(DegenerateSetError):
        gradient_step([[0.1, 0.2], [0.1, 0.7]], 1e-6)


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        OptimizerConfig(alpha=0)
    with pytest.raises(InvalidArgumentError):
        OptimizerConfig(jitter=1e-12, min_separation=1e-12)


# jitter --------------------------------------------------------------------

def test_jitter_leaves_clean_sets_alone():
    X = halton(10, [2, 3])
    assert jitter_degenerate(X) is X


def test_jitter_single_repair():
    cfg = OptimizerConfig()
    Y = jitter_degenerate([[0.1, 0.2], [0.1, 0.7]], cfg).points
    assert abs(Y[0, 0] - Y[1, 0]) >= cfg.min_separation
    assert not is_degenerate(Y, cfg.min_separation)


@pytest.mark.parametrize("seed", range(20))
def test_jitter_torture_set(seed):
    cfg = OptimizerConfig(seed=seed)
    X = np.column_stack([np.arange(10) / 10, np.full(10, 0.5)])
    Y = jitter_degenerate(X, cfg).points
    assert not is_degenerate(Y, cfg.min_separation)
    shift = np.abs((Y - X + 0.5) % 1.0 - 0.5)
    assert shift.max() <= 10 * cfg.jitter


def test_jitter_unrepairable():
    # min_separation above the achievable spacing can never be satisfied
    cfg = OptimizerConfig(min_separation=0.2, jitter=2.0)
    with pytest.raises(UnrepairableSetError):
        jitter_degenerate(np.column_stack([np.arange(10) / 10, np.arange(10) / 10]), cfg)


# optimize ------------------------------------------------------------------

def test_optimize_deterministic():
    X = random_points(30, 2, 1)
    cfg = OptimizerConfig(max_iters=15, trace_every=5)
    A, ta = optimize(X, cfg)
    B, tb = optimize(X, cfg)
    assert A == B and ta == tb


def test_optimize_trace_layout():
    X = halton(32, [2, 3])
    _, trace = optimize(X, OptimizerConfig(max_iters=12, trace_every=5))
    assert [r.iter for r in trace] == list(range(13))
    with_disc = [r.iter for r in trace if r.star_disc is not None]
    assert with_disc == [0, 5, 10, 12]


def test_lattice_is_a_fixed_point():
    X = lattice_rule(8, 3)
    Y, trace = optimize(X, OptimizerConfig())
    assert Y == X
    assert trace[-1].iter == 0
    assert all(r.energy == trace[0].energy for r in trace)


def test_adaptive_never_increases_energy():
    X = random_points(100, 2, 0)
    Y, trace = optimize(X, OptimizerConfig(adaptive=True, max_iters=60, trace_every=0))
    E = [r.energy for r in trace]
    assert all(b <= a for a, b in zip(E, E[1:]))
    assert np.all((Y.points >= 0) & (Y.points < 1)) and not is_degenerate(Y)


def test_optimize_repairs_degenerate_start():
    X = np.array([[0.1, 0.2], [0.1, 0.7], [0.6, 0.4]])
    Y, trace = optimize(X, OptimizerConfig(max_iters=3))
    assert not is_degenerate(Y)
    assert len(trace) == 4


REGRESSION_SETS = {
    "kronecker100": lambda: kronecker(100, [math.sqrt(2), math.sqrt(math.pi)]),
    "hammersley50": lambda: hammersley(50, [3], inverse_offset=1),
    "halton25_64": lambda: halton(64, [2, 5]),
    "halton23_64": lambda: halton(64, [2, 3]),
    "sobol50": lambda: sobol(50, 2),
}


@pytest.mark.parametrize("name", sorted(REGRESSION_SETS))
def test_fixed_step_strictly_decreasing_on_regression_sets(name):
    _, trace = optimize(REGRESSION_SETS[name](), OptimizerConfig(max_iters=50, trace_every=0))
    E = [r.energy for r in trace]
    assert all(b < a for a, b in zip(E, E[1:]))


def test_trace_csv(tmp_path):
    p = tmp_path / "trace.csv"
    write_trace_csv([TraceRecord(0, 1.5, 0.25, 0.1, 0.05), TraceRecord(1, 1.25, 0.125)], p)
    lines = p.read_text().splitlines()
    assert lines[0] == "iter,energy,grad_max,star_disc,l2_disc"
    assert lines[2] == "1,1.25,0.125,,"


def test_final_set_is_a_pointset():
    Y, _ = optimize(halton(16, [2, 3]), OptimizerConfig(max_iters=2))
    assert isinstance(Y, PointSet)
