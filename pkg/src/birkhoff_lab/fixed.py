"""Vectorised fixed-point arithmetic on the circle.

A point of T = R/Z held at ``P`` bits is the integer ``v`` in ``[0, 2**P)``
standing for ``v / 2**P``.  For numpy work every value is shifted to a common
127-bit grid and split in two ``uint64`` limbs::

    w  = v << (127 - P)
    hi = w >> 63            # 64 bits
    lo = w & (2**63 - 1)    # 63 bits

Addition and integer multiples then wrap modulo 1 for free (``hi`` overflows
modulo 2**64), so orbits ``x + k*alpha`` are exact for any ``P <= 127``.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError

GRID_BITS = 127
LO_BITS = 63
LO_MASK = (1 << LO_BITS) - 1
MAX_PRECISION = GRID_BITS

_U63 = np.uint64(LO_BITS)
_ULO = np.uint64(LO_MASK)
_U32 = np.uint64(32)
_U31 = np.uint64(31)
_M32 = np.uint64((1 << 32) - 1)
_M31 = np.uint64((1 << 31) - 1)
_MAX_MULTIPLIER = 1 << 32


def check_precision(P: int) -> int:
    if not 8 <= P <= MAX_PRECISION:
        raise PreconditionError(f"precision P must lie in [8, {MAX_PRECISION}], got {P}")
    return P


def split(v: int, P: int) -> tuple[int, int]:
    w = (v % (1 << P)) << (GRID_BITS - P)
    return w >> LO_BITS, w & LO_MASK


class FixedArray:
    """Array of circle points on the 127-bit grid (two ``uint64`` limbs)."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo):
        self.hi = np.asarray(hi, dtype=np.uint64)
        self.lo = np.asarray(lo, dtype=np.uint64)

    @classmethod
    def from_ints(cls, values, P: int) -> "FixedArray":
        check_precision(P)
        w = np.array([int(v) % (1 << P) for v in values], dtype=object)
        if w.size == 0:
            return cls(np.zeros(0, np.uint64), np.zeros(0, np.uint64))
        w = w << (GRID_BITS - P)
        return cls((w >> LO_BITS).astype(np.uint64), (w & LO_MASK).astype(np.uint64))

    @classmethod
    def full(cls, v: int, P: int, n: int) -> "FixedArray":
        hi, lo = split(v, P)
        return cls(np.full(n, hi, np.uint64), np.full(n, lo, np.uint64))

    def to_ints(self, P: int) -> list[int]:
        w = (self.hi.astype(object) << LO_BITS) | self.lo.astype(object)
        return [int(x) >> (GRID_BITS - P) for x in w]

    def to_float(self) -> np.ndarray:
        return self.hi.astype(np.float64) * 2.0**-64 + self.lo.astype(np.float64) * 2.0**-127

    def __len__(self):
        return self.hi.shape[0]

    def __getitem__(self, idx) -> "FixedArray":
        return FixedArray(self.hi[idx], self.lo[idx])

    def copy(self) -> "FixedArray":
        return FixedArray(self.hi.copy(), self.lo.copy())

    def __add__(self, other: "FixedArray") -> "FixedArray":
        lo = self.lo + other.lo
        hi = self.hi + other.hi + (lo >> _U63)
        return FixedArray(hi, lo & _ULO)

    def __sub__(self, other: "FixedArray") -> "FixedArray":
        borrow = (self.lo < other.lo).astype(np.uint64)
        lo = (self.lo - other.lo) & _ULO
        hi = self.hi - other.hi - borrow
        return FixedArray(hi, lo)

    def add_int(self, v: int, P: int) -> "FixedArray":
        return self + FixedArray.full(v, P, len(self))

    def less(self, other: "FixedArray") -> np.ndarray:
        return (self.hi < other.hi) | ((self.hi == other.hi) & (self.lo < other.lo))

    def equal(self, other: "FixedArray") -> np.ndarray:
        return (self.hi == other.hi) & (self.lo == other.lo)

    def argsort(self) -> np.ndarray:
        return np.lexsort((self.lo, self.hi))

    @classmethod
    def from_float(cls, x) -> "FixedArray":
        """Exact grid image of floats in ``[0, 1)`` (bits below 2**-127 dropped)."""
        x = np.asarray(x, dtype=np.float64) % 1.0
        y = x * 2.0**64
        hi = np.floor(y)
        lo = np.floor((y - hi) * 2.0**63)
        return cls(hi.astype(np.uint64), lo.astype(np.uint64))

    def sum_units(self) -> int:
        """Exact sum of the grid values as a Python integer (not reduced mod 1)."""
        total = 0
        for limb, shift in ((self.hi, LO_BITS), (self.lo, 0)):
            for i in range(0, len(limb), 1 << 28):
                part = limb[i:i + (1 << 28)]
                total += (int((part >> _U32).sum()) << (32 + shift)) + (int((part & _M32).sum()) << shift)
        return total

    def where(self, mask, other: "FixedArray") -> "FixedArray":
        return FixedArray(np.where(mask, self.hi, other.hi), np.where(mask, self.lo, other.lo))

    @staticmethod
    def concat(parts) -> "FixedArray":
        parts = list(parts)
        return FixedArray(np.concatenate([p.hi for p in parts]), np.concatenate([p.lo for p in parts]))


def unit(P: int) -> FixedArray:
    """One unit in the last place at precision ``P`` (a length-1 array)."""
    return FixedArray.full(1, P, 1)


def grid_max() -> FixedArray:
    return FixedArray(np.array([2**64 - 1], np.uint64), np.array([LO_MASK], np.uint64))


def multiples(k: np.ndarray, a: int, P: int) -> FixedArray:
    """Exact ``k * a / 2**P mod 1`` for an integer array ``0 <= k < 2**32``."""
    k = np.asarray(k, dtype=np.uint64)
    if k.size and int(k.max()) >= _MAX_MULTIPLIER:
        raise PreconditionError("multiplier exceeds 2**32; use integer arithmetic instead")
    a_hi, a_lo = split(a, P)
    lh, ll = np.uint64(a_lo >> 32), np.uint64(a_lo & 0xFFFFFFFF)
    b = k * ll
    c = k * lh + (b >> _U32)
    lo = ((c & _M31) << _U32) | (b & _M32)
    hi = k * np.uint64(a_hi) + (c >> _U31)
    return FixedArray(hi, lo)


def orbit_words(x: int, step: int, n: int, P: int, start: int = 0) -> FixedArray:
    """Points ``x + (start + k) * step`` for ``k < n``, exact on the grid."""
    k = np.arange(start, start + n, dtype=np.uint64)
    return multiples(k, step, P).add_int(x, P)


def locate(breaks: FixedArray, q: FixedArray) -> np.ndarray:
    """Index of the last break ``<= q`` (``-1`` if ``q`` precedes every break).

    ``breaks`` must be sorted and strictly increasing.
    """
    idx = np.searchsorted(breaks.hi, q.hi, side="right").astype(np.int64) - 1
    # ties on the high limb: step back while the break is still above q
    while True:
        ok = idx >= 0
        bad = np.zeros(idx.shape, bool)
        j = idx[ok]
        bad[ok] = (breaks.hi[j] == q.hi[ok]) & (breaks.lo[j] > q.lo[ok])
        if not bad.any():
            return idx
        idx[bad] -= 1


def to_float_int(v: int, P: int) -> float:
    return v / float(1 << P) if P < 1000 else float(v >> (P - 64)) * 2.0**-64
