import math

import numpy as np
import pytest

from birkhoff_lab.birkhoff import Analytic
from birkhoff_lab.errors import HorizonBudget, PreconditionError
from birkhoff_lab.stochastic import (MCResult, coefficient_profile, confirm_seed, dyadic_decay, gram_deviation,
                                     key_lemma_demo, lil_horizon, lil_probability, menshov_check,
                                     orthonormality_check)
from birkhoff_lab.zoo import build_rademacher_step

COS = Analytic(lambda x: math.sqrt(2) * np.cos(2 * np.pi * x), "sqrt2cos")
ZERO = Analytic(lambda x: np.zeros_like(x), "zero")


def test_proportion_interval():
    r = MCResult.proportion(90, 100, seed=0)
    assert r.estimate == 0.9
    assert r.half_width == pytest.approx(1.96 * math.sqrt(0.09 / 100))
    assert r.lower < 0.9 < r.upper


def test_menshov_single_term():
    r = menshov_check(1, [1.0], trials=1000, seed=0)
    assert r.mean == 1.0 and r.bound == 4.0 and r.holds


def test_menshov_flat_sixteen():
    r = menshov_check(16, coefficient_profile("flat", 16), trials=2000, seed=1)
    assert r.bound == 576.0 and r.holds
    # E max_n W_n^2 for a 16-step walk is about 24
    assert 18 < r.mean < 30


def test_menshov_harmonic_bound():
    c = coefficient_profile("harmonic", 64)
    r = menshov_check(64, c, trials=1000, seed=2)
    assert r.bound == pytest.approx(64 * float(np.sum(c * c))) and r.holds


def test_menshov_rejects_bad_input():
    with pytest.raises(PreconditionError):
        menshov_check(4, [1.0, 1.0], trials=1000)
    with pytest.raises(PreconditionError):
        coefficient_profile("steep", 4)


def test_results_are_deterministic_across_threads():
    a = menshov_check(16, coefficient_profile("random", 16), trials=9000, seed=5, threads=1)
    b = menshov_check(16, coefficient_profile("random", 16), trials=9000, seed=5, threads=3)
    assert a == b


def test_lil_probability_monotone_in_horizon():
    p1 = lil_probability(16, 32, 4000, seed=3)
    p2 = lil_probability(16, 512, 4000, seed=3)
    assert p2.estimate >= p1.estimate


def test_lil_weak_demand_is_met_early():
    h = lil_horizon(0.9, 16, trials=2000, seed=0)
    assert h.N <= 64 and h.confirm.estimate > 0.1


def test_lil_horizon_budget():
    with pytest.raises(HorizonBudget):
        lil_horizon(0.001, 16, trials=1000, seed=0, limit=64)


def test_confirm_seed_differs():
    assert confirm_seed(0) != 0 and confirm_seed(0) == confirm_seed(0)


def test_gram_matrix_small():
    G = orthonormality_check(COS, k_max=4, samples=200000, seed=0)
    assert np.allclose(np.diag(G), 1, atol=0.02)
    assert gram_deviation(G) < 3 / math.sqrt(200000) * 3


def test_gram_requires_normalized():
    with pytest.raises(PreconditionError):
        orthonormality_check(Analytic(lambda x: np.cos(2 * np.pi * x), "c"), k_max=2, samples=1000)


def test_dyadic_decay_zero_function():
    t = dyadic_decay(ZERO, 0.8, k_max=8, samples=1000, seed=0)
    assert not np.any(t.estimate)


def test_dyadic_decay_shape():
    t = dyadic_decay(COS, 0.8, k_max=10, samples=2000, seed=0)
    rows = t.rows()
    assert [r["k"] for r in rows] == list(t.k)
    assert np.all(np.diff(t.partial_sums()) >= 0)


def test_key_lemma_zero_amplitude():
    _, spec = build_rademacher_step(256, 16, 0.0, seed=0)
    r = key_lemma_demo(spec, 16, samples=200, seed=0)
    assert r.overall.estimate == 0.0


def test_key_lemma_small():
    _, spec = build_rademacher_step(512, 32, 1.0, seed=0)
    r = key_lemma_demo(spec, 16, samples=300, seed=0)
    assert r.overall.samples == 300
    assert r.in_good.samples + r.control.samples == 300
