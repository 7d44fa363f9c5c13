import io
import math

import numpy as np
import pytest

from lodesq.core import InvalidArgumentError
from lodesq.lattice import (
    REPORT_FIELDS,
    _origin_energy_change,
    conjecture_sums,
    coprime_pairs,
    cot_csc_check,
    cot_csc_margin,
    criticality_residual,
    lattice_report,
    lattice_sweep,
    local_min_probe,
    probe_origin,
    second_order_sums,
    write_report_csv,
)
from lodesq.generators import is_involution, lattice_rule

INVOLUTIONS = [(8, 3), (12, 5), (15, 4), (16, 7)]


def sums_by_loops(n, a):
    s1 = s2 = s3 = 0.0
    for k in range(1, n):
        t, s = k / n, (a * k % n) / n
        K = lambda u: 1 - math.log(2 * math.sin(math.pi * u))
        s1 += K(s) / math.sin(math.pi * t) ** 2
        s2 += 1 / math.tan(math.pi * t) / math.tan(math.pi * s)
        s3 += K(t) / math.sin(math.pi * s) ** 2
    return s1, s2, s3


@pytest.mark.parametrize("n, a", [(3, 1), (5, 2), (8, 3), (13, 5), (30, 7)])
def test_second_order_sums_direct(n, a):
    np.testing.assert_allclose(second_order_sums(n, a), sums_by_loops(n, a), rtol=1e-12, atol=1e-12)


def test_second_order_examples():
    I, II, III = second_order_sums(8, 3)
    assert abs(II) <= I + III
    I, II, III = second_order_sums(11, 1)
    assert I == pytest.approx(III, rel=1e-14)
    I, II, III = second_order_sums(5, 2)
    assert I > 0 and III > 0 and np.isfinite(II)


def test_second_order_sums_describe_energy_change():
    # moving the origin by (e, f) changes E by pi^2 (e^2 I + 2 e f II + f^2 III) to second order
    n, a = 13, 5
    I, II, III = second_order_sums(n, a)
    pts = lattice_rule(n, a).points
    for e, f in [(1e-4, 0.0), (0.0, 1e-4), (7e-5, -5e-5)]:
        predicted = math.pi**2 * (e * e * I + 2 * e * f * II + f * f * III)
        assert _origin_energy_change(pts, np.array([e, f])) == pytest.approx(predicted, rel=1e-3)


@pytest.mark.parametrize("n", [7, 12, 20, 31])
def test_sums_swap_under_inverse_multiplier(n):
    for a in range(1, n):
        if math.gcd(a, n) != 1:
            continue
        inv = pow(a, -1, n)
        I, _, III = second_order_sums(n, a)
        I_inv, _, III_inv = second_order_sums(n, inv)
        assert I == pytest.approx(III_inv, rel=1e-12)
        assert III == pytest.approx(I_inv, rel=1e-12)


def test_invalid_pairs():
    with pytest.raises(InvalidArgumentError):
        second_order_sums(4, 2)
    with pytest.raises(InvalidArgumentError):
        criticality_residual(1, 1)


@pytest.mark.parametrize("n, a", [(5, 2), (8, 3), (12, 5)])
def test_criticality_examples(n, a):
    assert criticality_residual(n, a) <= 1e-9


@pytest.mark.parametrize("n, a", INVOLUTIONS)
def test_probe_involutions(n, a):
    res = probe_origin(n, a)
    assert res.ok
    assert np.all(np.abs(res.slopes - 2.0) <= 0.1)
    assert local_min_probe(n, a)


def test_probe_zero_step_and_non_involution():
    res = probe_origin(5, 2, eps_grid=(0.0, 1e-4, 1e-3))
    assert np.all(res.increases[:, 0] == 0.0)
    assert isinstance(local_min_probe(5, 2), bool)


def test_cot_csc_examples():
    assert cot_csc_check(0.5, 0.5)
    assert cot_csc_margin(0.5, 0.5) == pytest.approx(2 * (1 - math.log(2)))
    assert cot_csc_check(0.1, 0.1)
    with pytest.raises(InvalidArgumentError):
        cot_csc_check(0.0, 0.3)


def test_cot_csc_random_samples():
    rng = np.random.default_rng(0)
    x = rng.random(200_000)
    y = rng.random(200_000)
    keep = (x > 0) & (y > 0)
    assert cot_csc_check(x[keep], y[keep]).all()


def test_conjecture_readings():
    for n, a in [(8, 3), (5, 2), (3, 1)]:
        c = conjecture_sums(n, a)
        assert all(np.isfinite(c[k]) for k in ("sum_1", "sum_2", "sum_3"))
        assert c["printed_ok"] == (c["sum_1"] * c["sum_2"] >= c["sum_3"] ** 2)
        assert c["determinant_ok"] == (c["sum_1"] * c["sum_3"] >= c["sum_2"] ** 2)


def test_report_and_sweep():
    r = lattice_report(8, 3)
    assert r.involution and r.second_order_ok and r.grad_residual <= 1e-9
    reports = lattice_sweep(20)
    assert [(x.n, x.a) for x in reports] == list(coprime_pairs(20))
    assert all(x.grad_residual <= 1e-9 for x in reports)
    assert all(x.second_order_ok for x in reports if x.involution)
    assert all(is_involution(x.n, x.a) == x.involution for x in reports)


def test_report_csv_layout():
    buf = io.StringIO()
    write_report_csv([lattice_report(8, 3), lattice_report(5, 2)], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(REPORT_FIELDS)
    assert lines[1].startswith("8,3,true,")
    assert len(lines) == 3
