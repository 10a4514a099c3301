import bisect

import numpy as np
import pytest

from birkhoff_lab.errors import PrecisionExhausted, PreconditionError
from birkhoff_lab.fixed import FixedArray, check_precision, locate, multiples, orbit_words

P = 127
M = 1 << P


def words(rng, n, P=P):
    return [int(rng.integers(0, 1 << 62)) << 65 | int(rng.integers(0, 1 << 62)) for _ in range(n)]


def test_round_trip(rng):
    vals = [v % M for v in words(rng, 200)] + [0, M - 1, 1]
    assert FixedArray.from_ints(vals, P).to_ints(P) == vals


@pytest.mark.parametrize("bits", [8, 53, 64, 100, 127])
def test_add_and_subtract_wrap(rng, bits):
    m = 1 << bits
    a = [v % m for v in words(rng, 100)] + [m - 1]
    b = [v % m for v in words(rng, 100)] + [1]
    A, B = FixedArray.from_ints(a, bits), FixedArray.from_ints(b, bits)
    assert (A + B).to_ints(bits) == [(x + y) % m for x, y in zip(a, b)]
    assert (A - B).to_ints(bits) == [(x - y) % m for x, y in zip(a, b)]


def test_multiples_match_big_integers(rng):
    a = words(rng, 1)[0] % M
    k = np.array([0, 1, 2, 3, 10**6, 2**31, 2**32 - 1], dtype=np.uint64)
    assert multiples(k, a, P).to_ints(P) == [(int(j) * a) % M for j in k]


def test_orbit_words(rng):
    x, step = words(rng, 2)
    assert orbit_words(x % M, step % M, 50, P).to_ints(P) == [(x + j * step) % M for j in range(50)]


def test_locate_matches_bisect(rng):
    breaks = sorted(set(v % M for v in words(rng, 64)) | {0})
    queries = [v % M for v in words(rng, 500)] + breaks
    got = locate(FixedArray.from_ints(breaks, P), FixedArray.from_ints(queries, P))
    want = [bisect.bisect_right(breaks, q) - 1 for q in queries]
    assert list(got) == want


def test_ordering(rng):
    vals = [v % M for v in words(rng, 100)]
    A = FixedArray.from_ints(vals, P)
    assert [vals[i] for i in A.argsort()] == sorted(vals)


@pytest.mark.parametrize("bad", [0, 7, 128])
def test_precision_bounds(bad):
    with pytest.raises(PreconditionError):
        check_precision(bad)
