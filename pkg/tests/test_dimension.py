import json
import math

import numpy as np
import pytest

from birkhoff_lab import GrowthGauge
from birkhoff_lab.birkhoff import trig_coboundary
from birkhoff_lab.dimension import (Cover, box_counts, construction_cover_audit, pre_measure,
                                    slow_set_sample)
from birkhoff_lab.errors import MeshViolation, PreconditionError
from birkhoff_lab.fixed import FixedArray
from birkhoff_lab.zoo import build_plateau


def test_pre_measure_examples():
    assert pre_measure(Cover.of([], delta=0.1), 0.5) == 0
    assert pre_measure(Cover.of([0.04]), 0.5) == pytest.approx(0.2)
    assert pre_measure(Cover.of([0.1, 0.01]), 0.5) == pytest.approx(0.41623, abs=1e-5)


def test_mesh_violation():
    with pytest.raises(MeshViolation):
        pre_measure(Cover.of([0.5, 0.1], delta=0.2), 0.5)
    with pytest.raises(PreconditionError):
        Cover.of([0.0])


def test_cover_json_round_trip():
    c = Cover.of([0.1, 0.2], delta=0.3, positions=[0.0, 0.5])
    assert Cover.from_json(json.loads(json.dumps(c.to_json()))) == c


@pytest.fixture(scope="module")
def plateau(golden):
    return build_plateau(golden, 0.5, GrowthGauge.power(0.5))


def test_audit_passes_for_builder_level(plateau):
    _, spec, _ = plateau
    rep = construction_cover_audit(spec, 0.5, 0.5, 0.5)
    assert rep.passed and rep.complement_covered
    assert rep.pre_measure <= rep.proof_pre_measure


def test_audit_zero_budget_never_passes(plateau):
    _, spec, _ = plateau
    assert not construction_cover_audit(spec, 0.5, 0.5, 0.0).passed


def test_audit_mesh(plateau):
    _, spec, _ = plateau
    with pytest.raises(MeshViolation):
        construction_cover_audit(spec, 0.5, 1e-12, 0.5)


def test_box_counts():
    slow = np.zeros(16, bool)
    slow[[0, 1, 8]] = True
    assert box_counts(slow, [1, 2, 4]) == [2, 2, 3]


def test_coboundary_slow_set_is_everything(golden):
    r = slow_set_sample(trig_coboundary(float(golden)), golden, GrowthGauge.power(0.5), 2.0, 1, 128,
                        grid_size=1 << 10)
    assert r.slow.all() and r.dimension == pytest.approx(1.0, abs=1e-9)
    assert float(r.arcset().measure()) == 1.0


def test_empty_slow_set_is_undefined(golden):
    r = slow_set_sample(trig_coboundary(float(golden)), golden, GrowthGauge.power(0.5), 0.0, 1, 64,
                        grid_size=1 << 10)
    assert r.undefined and r.to_dict()["undefined"]


def test_threshold_is_monotone(golden):
    f = trig_coboundary(float(golden))
    r = slow_set_sample(f, golden, GrowthGauge.power(0.5), 0.5, 4, 256, grid_size=1 << 10)
    lower = r.with_threshold(0.25)
    assert np.all(lower.slow <= r.slow)


def test_plateau_cells_in_good_set_are_fast(plateau, golden):
    f, spec, m = plateau
    B = 0.5 * 0.5 * m / math.sqrt(m)
    r = slow_set_sample(f, golden, GrowthGauge.power(0.5), B, m, m, grid_size=1 << 14)
    centres = FixedArray.from_ints([(int(i) << 113) + (1 << 112) for i in np.nonzero(r.slow)[0]], 127)
    assert r.slow.any() and not spec.good_set.contains(centres).any()
