"""Tower partitions of the circle built from two consecutive convergents.

Level ``n`` consists of the rotated copies ``Delta_j^(n) = Delta_0^(n) + j*alpha``
for ``j < q_{n+1}`` together with ``Delta_j^(n+1)`` for ``j < q_n``.  The base
arc is ``[0, {q_n alpha})`` for even ``n`` and ``[{q_n alpha}, 1)`` for odd ``n``.

All combinatorics use the convergents of the rounded rotation number, so the
partition is exact at ``P`` bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cf import Convergent, RotationNumber, fixed_convergents, source_agreement_depth
from .circle import ArcSet
from .errors import BudgetExceeded, InsufficientDepth, PartitionGap
from .fixed import FixedArray, locate as _locate, multiples

DEFAULT_MAX_ARCS = 10**7


def level_convergents(alpha: RotationNumber, n: int) -> tuple[Convergent, Convergent]:
    """``(c_n, c_{n+1})`` of the rounded value, with ``c_0 = 0/1``."""
    if n < 0:
        raise InsufficientDepth("level must be non-negative")
    conv = fixed_convergents(alpha)
    table = [Convergent(0, 0, 1, alpha.rounded)] + conv
    if n + 1 >= len(table):
        raise InsufficientDepth(f"{alpha.precision}-bit rounding has no convergent {n + 1}")
    return table[n], table[n + 1]


def base_arc(alpha: RotationNumber, n: int, q: int) -> tuple[int, int]:
    """``(start, length)`` of ``Delta_0^(n)`` in units of ``2**-P``."""
    M = alpha.modulus
    r = (q * alpha.value) % M
    return (0, r) if n % 2 == 0 else (r, M - r)


@dataclass(frozen=True)
class TowerPartition:
    alpha: RotationNumber
    n: int
    q_n: int
    q_next: int
    base: tuple[int, int]
    base_next: tuple[int, int]
    starts: FixedArray = field(repr=False)       # Delta_j^(n), j < q_{n+1}
    starts_next: FixedArray = field(repr=False)  # Delta_j^(n+1), j < q_n
    order: np.ndarray = field(repr=False)        # sort order of all starts
    agrees_with_source: bool = True

    @property
    def precision(self) -> int:
        return self.alpha.precision

    @property
    def d_n(self) -> int:
        return self.base[1]

    @property
    def d_next(self) -> int:
        return self.base_next[1]

    def d_float(self) -> tuple[float, float]:
        M = float(self.alpha.modulus)
        return self.d_n / M, self.d_next / M

    @property
    def arc_count(self) -> int:
        return self.q_next + self.q_n

    @property
    def q_even(self) -> tuple[int, int]:
        """``(q~_n, q~_{n+1})`` with ``q~ = 2*floor(q/2)``."""
        return 2 * (self.q_n // 2), 2 * (self.q_next // 2)

    def family(self, level: int) -> tuple[FixedArray, int]:
        """Starts and common length of the family at ``level`` (``n`` or ``n+1``)."""
        if level == self.n:
            return self.starts, self.d_n
        if level == self.n + 1:
            return self.starts_next, self.d_next
        raise ValueError(f"level must be {self.n} or {self.n + 1}")

    def arcs(self, level: int, j=None) -> ArcSet:
        """Arcs of one family as an :class:`ArcSet` (optionally a subset of indices)."""
        starts, length = self.family(level)
        if j is not None:
            starts = starts[np.asarray(j)]
        P = self.precision
        lasts = starts.add_int(length - 1, P)
        return ArcSet.from_words(starts, lasts, P)

    def even_view(self, level: int) -> FixedArray:
        """Starts of the first ``q~`` arcs of the family at ``level``."""
        starts, _ = self.family(level)
        q = 2 * (len(starts) // 2)
        return starts[:q]

    def locate(self, x: FixedArray) -> tuple[np.ndarray, np.ndarray]:
        """Family level and index ``j`` of the arc containing each point."""
        allstarts = FixedArray.concat([self.starts, self.starts_next])[self.order]
        idx = _locate(allstarts, x)
        idx[idx < 0] = len(self.order) - 1  # unreachable: 0 is always a start
        src = self.order[idx]
        fam = np.where(src < self.q_next, self.n, self.n + 1)
        j = np.where(src < self.q_next, src, src - self.q_next)
        return fam, j

    def locate_point(self, v: int) -> tuple[int, int]:
        fam, j = self.locate(FixedArray.from_ints([v], self.precision))
        return int(fam[0]), int(j[0])

    def rows(self):
        """Yield ``(family, j, start, length)`` integer rows."""
        P = self.precision
        for level in (self.n, self.n + 1):
            starts, length = self.family(level)
            for j, s in enumerate(starts.to_ints(P)):
                yield level, j, s, length


def build_partition(alpha: RotationNumber, n: int, max_arcs: int = DEFAULT_MAX_ARCS) -> TowerPartition:
    """Build and verify the level-``n`` tower partition."""
    c_n, c_next = level_convergents(alpha, n)
    q, q1 = c_n.q, c_next.q
    if q + q1 > max_arcs:
        raise BudgetExceeded(f"level {n} needs {q + q1} arcs, budget is {max_arcs}")
    P, M = alpha.precision, alpha.modulus
    b0 = base_arc(alpha, n, q)
    b1 = base_arc(alpha, n + 1, q1)
    starts = multiples(np.arange(q1, dtype=np.uint64), alpha.value, P).add_int(b0[0], P)
    starts_next = multiples(np.arange(q, dtype=np.uint64), alpha.value, P).add_int(b1[0], P)
    allstarts = FixedArray.concat([starts, starts_next])
    order = allstarts.argsort()
    _verify(allstarts, order, q1, b0[1], b1[1], P, M)
    agrees = source_agreement_depth(alpha) >= n + 1 if not alpha.rational else False
    return TowerPartition(alpha, n, q, q1, b0, b1, starts, starts_next, order, agrees)


def _verify(allstarts: FixedArray, order: np.ndarray, q1: int, d_n: int, d_next: int, P: int, M: int) -> None:
    q = len(order) - q1
    if q1 * d_n + q * d_next != M:
        raise PartitionGap(f"total measure {q1 * d_n + q * d_next} != 2**{P}")
    if not (2 * q1 * d_n >= M and q1 * d_n <= M):
        raise PartitionGap("d_n violates 1/(2 q_{n+1}) <= d_n <= 1/q_{n+1}")
    # sorted consecutive starts must differ by exactly the length of the arc
    # before them; together with the total this proves an exact tiling
    s = allstarts[order]
    nxt = FixedArray.concat([s[1:], s[:1]])
    gaps = nxt - s
    want = FixedArray.from_ints([d_n, d_next], P)
    pick = (order >= q1).astype(np.int64)
    if len(order) == 1:
        return
    if not gaps.equal(want[pick]).all():
        raise PartitionGap("arcs overlap or leave a gap")
