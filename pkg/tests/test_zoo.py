import math
from fractions import Fraction

import numpy as np
import pytest

from birkhoff_lab import GrowthGauge, PiecewiseFn
from birkhoff_lab.birkhoff import birkhoff_sums
from birkhoff_lab.errors import (CaseSearchExhausted, InsufficientK, LevelTooSmall, PreconditionError,
                                 SmallDenominator)
from birkhoff_lab.fixed import FixedArray
from birkhoff_lab.zoo import (build_holder, build_noncoboundary, build_plateau, build_rademacher_step,
                              hilbert_example_eval, hilbert_example_mean, minimal_m, orbit_partial_sums,
                              random_cusp_function, smooth_step, step_function, trig_coboundary_transfer,
                              unit_coefficient)
from birkhoff_lab.zoo.holder import admissible_nu_prime, level_report
from birkhoff_lab.zoo.noncoboundary import count_in_window, floor_sum

P = 127
M = 1 << P


# -- step functions and coboundaries ----------------------------------------

def test_smooth_step_of_sign_function():
    g = step_function(P, [0, M // 2], [1.0, -1.0])
    f, rec = smooth_step(g, 0.01)
    assert f.continuity_defect() == 0.0
    assert abs(f.mean()) <= 2.0 ** (-P + 16)
    assert rec.changed_measure <= Fraction(1, 100)
    assert f.eval(0.25) == 1.0 and f.eval(0.75) == -1.0


def test_smooth_step_of_zero():
    f, rec = smooth_step(step_function(P, [0], [0.0]), 0.1)
    assert f.sup_norm() == 0.0 and rec.bump is None


def test_transfer_simple_cosine(golden):
    r = trig_coboundary_transfer({1: 0.5, -1: 0.5}, golden)
    a = float(golden)
    expect = 0.5 / abs(complex(math.cos(2 * math.pi * a), math.sin(2 * math.pi * a)) - 1)
    assert abs(r.g_coeffs[1]) == pytest.approx(expect)
    assert r.identity_error < 1e-12


def test_transfer_zero_and_errors(golden, quarter):
    r = trig_coboundary_transfer({}, golden)
    assert r.g_coeffs == {} and r.bound == 0
    with pytest.raises(PreconditionError):
        trig_coboundary_transfer({0: 1.0}, golden)
    with pytest.raises(SmallDenominator):
        trig_coboundary_transfer({4: 1.0}, quarter)


def test_hilbert_example_values():
    assert hilbert_example_eval(0.5, 0.0) == 0.0
    assert hilbert_example_eval(0.5, 0.25) == pytest.approx(-0.8)
    assert abs(hilbert_example_mean(0.9)) < 1e-12


# -- plateau ----------------------------------------------------------------

def test_minimal_m():
    assert minimal_m(0.1, GrowthGauge.power(0.5), 1.0) == 101
    assert minimal_m(0.5, GrowthGauge.power(0.5), 1.0) == 5


@pytest.fixture(scope="module")
def plateau(golden):
    return build_plateau(golden, 0.5, GrowthGauge.power(0.5))


def test_plateau_sums_on_good_set(plateau, golden, rng):
    f, spec, m = plateau
    x = spec.good_set.sample(100, rng)
    S = birkhoff_sums(f, golden, x, m)
    assert np.allclose(np.abs(S), m * 0.5, atol=1e-9 * m)
    assert f.continuity_defect() == 0.0 and abs(f.mean()) < 1e-15
    assert f.sup_norm() == 0.5


def test_plateau_sums_never_exceed(plateau, golden, rng):
    f, spec, m = plateau
    x = FixedArray.from_float(rng.random(2000))
    assert np.all(np.abs(birkhoff_sums(f, golden, x, m)) <= m * 0.5 + 1e-12)


def test_plateau_level_too_small(golden):
    with pytest.raises(LevelTooSmall):
        build_plateau(golden, 0.1, GrowthGauge.power(0.5), n=5)


# -- Hölder -----------------------------------------------------------------

def test_unit_coefficient():
    for xi in (0.1, 0.25, 0.5, 1.0):
        c = unit_coefficient(xi)
        assert c <= 2 ** (xi - 1) and c == pytest.approx(2 ** (xi - 1), rel=1e-14)


def test_delta_zero_closed_form():
    assert math.sqrt(0.25 / 0.5) == pytest.approx(0.70711, abs=1e-5)
    lo, hi = admissible_nu_prime(0.25, 0.25, 0.75, 1.0, "two")
    assert lo == 0.25 and hi == pytest.approx(min(0.75, 1 - 0.25 / 0.75**2))


def test_golden_falls_in_case_two(golden):
    # tau_n -> 1 for bounded quotients, below sqrt((1-nu)/xi) = sqrt(3)
    rep = level_report(golden, 20, 0.25, 0.25, 0.3, 2.0, 0.63, 0.05, "two", unit_coefficient(0.25), None)
    assert rep.tau_n < math.sqrt(3)


@pytest.fixture(scope="module")
def holder(golden):
    return build_holder(golden, 0.25, 0.25, A=2.0, n=12, require=False)


def test_holder_function_properties(holder):
    f, spec = holder
    assert f.lip_seminorm(0.25) <= 1.0
    assert f.sup_norm() <= 1.0
    assert abs(f.mean()) < 1e-15 and f.continuity_defect() == 0.0


def test_holder_sums_reach_analytic_bound(holder, golden, rng):
    f, spec = holder
    for fam, key in enumerate(("E0", "E1")):
        x = spec.good[key].sample(50, rng)
        S = birkhoff_sums(f, golden, x, spec.m[fam])
        assert np.all(np.abs(S) >= spec.sum_lower_bound(fam) * (1 - 1e-12))


def test_holder_cover_contains_complement(holder):
    from birkhoff_lab.covers import union_of
    _, spec = holder
    assert spec.good_set.complement().issubset(union_of(spec.cover, P))


def test_holder_search_reports_exhaustion(golden):
    with pytest.raises(CaseSearchExhausted):
        build_holder(golden, 0.25, 0.25, A=2.0)


def test_random_cusp_functions_are_zero_mean(rng):
    for _ in range(10):
        f = random_cusp_function(rng, 0.4)
        assert abs(f.mean()) < 1e-14 and f.continuity_defect() == 0.0


# -- Rademacher step --------------------------------------------------------

def test_rademacher_good_shifts():
    g, spec = build_rademacher_step(64, 4, 1.0, seed=3)
    assert not spec.good_shifts.contains_point(0)
    assert float(spec.measure_good()) >= spec.guaranteed_measure() - 1e-15
    assert abs(g.mean()) == 0.0


def test_rademacher_needs_room():
    with pytest.raises(InsufficientK):
        build_rademacher_step(8, 4, 1.0, seed=0)


def test_rademacher_values_match_function(rng):
    g, spec = build_rademacher_step(32, 2, 0.7, seed=1)
    x = rng.random(500)
    assert np.array_equal(spec.values(x), g.eval(x))


# -- non-coboundary ---------------------------------------------------------

def test_floor_sum_bruteforce(rng):
    for _ in range(300):
        n, m = int(rng.integers(0, 60)), int(rng.integers(1, 40))
        a, b = int(rng.integers(0, 100)), int(rng.integers(0, 100))
        assert floor_sum(n, m, a, b) == sum((a * i + b) // m for i in range(n))


def test_count_in_window_bruteforce(rng):
    for _ in range(300):
        Q = int(rng.integers(1, 300))
        a, b, W = int(rng.integers(0, 1000)), int(rng.integers(0, 1000)), int(rng.integers(0, Q + 1))
        lo = int(rng.integers(0, 40))
        hi = lo + int(rng.integers(0, 200))
        assert count_in_window(lo, hi, a, b, Q, W) == sum(1 for j in range(lo, hi) if (a * j + b) % Q <= W)


@pytest.fixture(scope="module")
def noncob(golden):
    return build_noncoboundary(golden, 0.25, 3)


def test_noncoboundary_stage_contracts(noncob):
    f, spec = noncob
    for st in spec.stages:
        assert st.measure < Fraction(1, 100 ** (st.k + 2))
        assert st.m * float(st.h) ** 0.25 > 0.99 * st.k
        assert float(st.block_sum) > 0.9 * st.k
    assert f.continuity_defect() == 0.0 and abs(f.mean()) < 1e-12


def test_noncoboundary_resolved_blocks(noncob, golden):
    f, spec = noncob
    for st in spec.stages[:spec.resolved_depth]:
        S = orbit_partial_sums(f, golden, st.hi)
        direct = S[st.hi - 1] - S[st.lo - 1]
        assert direct == pytest.approx(float(st.block_sum), rel=1e-9)
