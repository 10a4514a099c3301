import numpy as np
import pytest

from birkhoff_lab import build_partition, fixed_convergents
from birkhoff_lab.errors import BudgetExceeded
from birkhoff_lab.fixed import FixedArray

P = 127
M = 1 << P


def check_exact(part):
    intervals = []
    for level in (part.n, part.n + 1):
        starts, d = part.family(level)
        intervals += [(s, d) for s in starts.to_ints(P)]
    intervals.sort()
    assert sum(d for _, d in intervals) == M
    for (s0, d0), (s1, _) in zip(intervals, intervals[1:]):
        assert s0 + d0 == s1
    return len(intervals)


@pytest.mark.parametrize("n", [1, 2, 5, 9, 14])
def test_partition_tiles_circle(golden, n):
    part = build_partition(golden, n)
    q = fixed_convergents(golden, n + 2)
    assert check_exact(part) == q[n].q + q[n - 1].q


def test_locate_agrees_with_scan(golden, rng):
    part = build_partition(golden, 5)
    rows = sorted((s, lvl, j, d) for lvl, j, s, d in part.rows())
    xs = [int(v) for v in rng.integers(0, 1 << 62, 300)]
    xs = [v << 65 for v in xs]
    fam, idx = part.locate(FixedArray.from_ints(xs, P))
    for v, f, j in zip(xs, fam, idx):
        s, lvl, jj, d = max(r for r in rows if r[0] <= v)
        assert (f, j) == (lvl, jj) and v < s + d


def test_locate_base_and_rotation(golden):
    part = build_partition(golden, 4)
    starts, _ = part.family(4)
    s0 = starts.to_ints(P)[0]
    assert part.locate_point(s0) == (4, 0)
    assert part.locate_point((s0 + golden.value) % M) == (4, 1)


def test_arc_budget(golden):
    with pytest.raises(BudgetExceeded):
        build_partition(golden, 30, max_arcs=1000)
