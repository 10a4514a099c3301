import json
from fractions import Fraction

import numpy as np
import pytest

from birkhoff_lab import ArcSet, GrowthGauge, PiecewiseFn
from birkhoff_lab.circle import AFFINE, CONST, CUSP_L, CUSP_R, orbit, point_from_hex, point_to_hex
from birkhoff_lab.errors import InvariantViolation
from birkhoff_lab.fixed import FixedArray
from birkhoff_lab.zoo import random_cusp_function, unit_coefficient

P = 127
M = 1 << P


def arcs(*pairs):
    return ArcSet.from_floats(pairs, P)


# -- arcs -------------------------------------------------------------------

def test_complement_of_quarter():
    c = arcs((0, 0.25)).complement()
    assert c.measure() == Fraction(3, 4)
    assert c.intervals() == [(M // 4, M)]


def test_intersection():
    i = arcs((0, 0.5)).intersect(arcs((0.25, 0.75)))
    assert i.intervals() == [(M // 4, M // 2)]


def test_wraparound_union_measure():
    u = arcs((0.9, 0.2)).union(arcs((0.1, 0.3)))
    assert abs(float(u.measure()) - 0.4) < 1e-15
    assert u.count_arcs() == 1


def test_set_algebra_identities(rng):
    def random_set():
        pts = np.sort(rng.random(8))
        return arcs(*zip(pts[::2], pts[1::2]))
    for _ in range(20):
        A, B = random_set(), random_set()
        assert A.union(B).measure() + A.intersect(B).measure() == A.measure() + B.measure()
        assert A.difference(B).isdisjoint(B)
        assert A.complement().complement().equals(A)
        assert A.intersect(B).issubset(A)


def test_contains_and_json():
    A = arcs((0.9, 0.1), (0.4, 0.5))
    x = FixedArray.from_float(np.array([0.95, 0.05, 0.45, 0.2, 0.5]))
    assert list(A.contains(x)) == [True, True, True, False, False]
    assert ArcSet.from_json(json.loads(json.dumps(A.to_json()))).equals(A)


# -- orbits -----------------------------------------------------------------

def test_orbit_quarter(quarter):
    assert list(orbit(0, quarter, 4).to_float()) == [0, 0.25, 0.5, 0.75]
    assert list(orbit(0, quarter, 2, stride=2).to_float()) == [0, 0.5]


def test_orbit_golden(golden):
    pts = orbit(0, golden, 2).to_float()
    assert pts[0] == 0 and abs(pts[1] - 0.6180339887498949) < 1e-15


def test_hex_round_trip(rng):
    v = int(rng.integers(0, 1 << 62)) << 64
    assert point_from_hex(point_to_hex(v, P), P) == v


# -- piecewise functions ----------------------------------------------------

def tent(height=1.0, base=0.25):
    b = int(base * M)
    return PiecewiseFn.from_segments(P, [(0, AFFINE, 0.0, height), (b // 2, AFFINE, height, 0.0), (b, CONST, 0.0)])


def test_cusp_value():
    f = PiecewiseFn.from_segments(P, [(0, CUSP_L, 1.0, 0, 0.5), (M // 4, CONST, 0.0)])
    assert f.eval(0.04) == pytest.approx(0.2, abs=1e-15)


def test_tent_mean_is_triangle_area():
    assert tent(0.6, 0.25).mean() == pytest.approx(0.6 * 0.25 / 2, rel=1e-15)


def test_zero_function():
    z = PiecewiseFn.zero(P)
    assert (z.mean(), z.sup_norm(), z.lip_seminorm(0.5)) == (0.0, 0.0, 0.0)
    assert z.eval(0.3) == 0.0


def test_tent_lipschitz_constants():
    t = tent()
    assert t.lip_seminorm(1.0) == pytest.approx(8.0)
    assert t.lip_seminorm(0.5) == pytest.approx(8 * (1 / 8) ** 0.5)


def test_touching_tents_have_unit_seminorm():
    xi = 0.25
    c = unit_coefficient(xi)
    h = M // 64
    f = PiecewiseFn.from_segments(P, [(0, CUSP_L, c, 0, xi), (h, CUSP_R, c, 0, xi),
                                      (2 * h, CUSP_L, -c, 0, xi), (3 * h, CUSP_R, -c, 0, xi),
                                      (4 * h, CONST, 0.0)])
    lip = f.lip_seminorm(xi)
    assert lip <= 1.0 and lip > 0.999


def sampled_lip(f, xi, rng, n=200000):
    x = rng.random(n)
    y = (x + rng.random(n) ** 4 * rng.choice([-1, 1], n)) % 1.0
    fx, fy = f.eval(x), f.eval(y)
    d = np.abs(x - y)
    d = np.minimum(d, 1 - d)
    ok = d > 1e-12
    return float(np.max(np.abs(fx - fy)[ok] / d[ok] ** xi))


@pytest.mark.parametrize("xi", [0.25, 0.5, 0.8])
def test_seminorm_dominates_sampled_quotients(xi, rng):
    for _ in range(5):
        f = random_cusp_function(rng, xi)
        assert sampled_lip(f, xi, rng) <= f.lip_seminorm(xi) * (1 + 1e-9)


def test_mean_matches_quadrature(rng):
    f = random_cusp_function(rng, 0.5)
    grid = (np.arange(1 << 20) + 0.5) / (1 << 20)
    assert f.mean() == pytest.approx(float(np.mean(f.eval(grid))), abs=1e-4)


def test_json_round_trip(rng):
    f = random_cusp_function(rng, 0.3)
    g = PiecewiseFn.from_json(json.loads(f.dumps()))
    x = rng.random(1000)
    assert np.array_equal(f.eval(x), g.eval(x))


def test_breakpoints_too_close():
    with pytest.raises(InvariantViolation):
        PiecewiseFn.from_segments(P, [(0, CONST, 1.0), (3, CONST, 0.0)])


def test_gauge():
    g = GrowthGauge.parse("nu=0.5")
    assert float(g(16)) == pytest.approx(4.0)
    assert GrowthGauge.power(0.8).label
