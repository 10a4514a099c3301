import math

import numpy as np
import pytest

from birkhoff_lab import GrowthGauge, PiecewiseFn
from birkhoff_lab.birkhoff import (Analytic, birkhoff_series, block_sums, discrepancy_bruteforce, discrepancy_star,
                                   growth_report, hilbert_example, hilbert_fourier_side, hilbert_partial,
                                   koksma_check, sine_series_sup, trig_coboundary)
from birkhoff_lab.zoo import random_cusp_function

P = 127


def sine(x):
    return np.sin(2 * np.pi * x)


def test_telescoping_coboundary_on_fixture(quarter):
    f = trig_coboundary(0.25)
    s = birkhoff_series(f, quarter, 0, 2)
    assert abs(s.values[1]) < 1e-12


def test_coboundary_sums_stay_bounded(golden):
    s = birkhoff_series(trig_coboundary(float(golden)), golden, 0, 10**5)
    assert np.max(np.abs(s.values)) <= 2.0 + 1e-9
    blocks = block_sums(trig_coboundary(float(golden)), golden, 0, [0, 10, 1000, 50000])
    assert np.all(np.abs(blocks) <= 2.0 + 1e-9)


def test_zero_function_sums(golden):
    s = birkhoff_series(PiecewiseFn.zero(P), golden, 0, 1000)
    assert not s.values.any() and not block_sums(PiecewiseFn.zero(P), golden, 0, [0, 5, 9]).any()
    assert growth_report(s, GrowthGauge.power(0.5)).degenerate


def test_coboundary_growth_exponent_is_small(golden):
    s = birkhoff_series(trig_coboundary(float(golden)), golden, 0, 1 << 16)
    assert abs(growth_report(s, GrowthGauge.power(0.5)).nu_hat) < 0.1


def test_ratio_runmax(golden):
    f = Analytic(lambda x: math.sqrt(2) * np.cos(2 * np.pi * x), "c")
    s = birkhoff_series(f, golden, 0, 100, gauge=GrowthGauge.power(0.5))
    r = np.abs(s.values) / np.sqrt(np.arange(1, 101))
    assert np.allclose(s.ratio_runmax, np.maximum.accumulate(r))


def test_discrepancy_small_cases(golden):
    a = float(golden)
    assert discrepancy_star(golden, 1).star == pytest.approx(max(a, 1 - a))
    assert discrepancy_star(golden, 2).star == pytest.approx(0.3819660112501051)


@pytest.mark.parametrize("n", [3, 17, 100, 377])
def test_discrepancy_matches_bruteforce(golden, n):
    r = discrepancy_star(golden, n)
    assert r.star == pytest.approx(discrepancy_bruteforce(golden, n), abs=1e-14)
    assert r.star <= r.extreme <= 2 * r.star + 1e-15 and r.extreme <= 1


def test_koksma_zero(golden):
    r = koksma_check(PiecewiseFn.zero(P), 0.5, golden, 0, 100)
    assert r.holds and r.lhs == 0 and r.rhs == 0


def test_koksma_single_step(golden, rng):
    f = random_cusp_function(rng, 0.5)
    r = koksma_check(f, 0.5, golden, 0, 1)
    assert r.holds


def test_hilbert_closed_form():
    assert hilbert_example(0.5)(np.array([0.25]))[0] == pytest.approx(-0.8)
    assert hilbert_example(0.5)(np.array([0.0, 0.5])) == pytest.approx([0, 0], abs=1e-15)


def test_hilbert_direct_equals_fourier(golden):
    d = hilbert_partial(hilbert_example(0.5), golden, 0, 10**4).partial
    f = hilbert_fourier_side(0.5, golden, 10**4)
    assert np.max(np.abs(d - f)) < 1e-6
    assert len(hilbert_fourier_side(0.5, golden, 0)) == 0


def test_leibniz_series(quarter):
    t = hilbert_partial(Analytic(sine, "sin"), quarter, 0, 10**5)
    assert abs(t.partial[-1] - math.pi / 4) < 1e-4


def test_sine_series_sup_small_grid():
    sup, *_ = sine_series_sup(grid=200, N=2000)
    assert 1.5 < sup <= 2.0
