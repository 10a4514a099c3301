"""Random step functions built from ``K`` equal arcs with Rademacher signs.

Arc ``A_k = [k/K, (k+1)/K)`` is split into halves ``B_k`` and ``B'_k``; the
function is ``+eps*X_k`` on ``B_k`` and ``-eps*X_k`` on ``B'_k``.  For a shift
``u`` with ``||j u|| > 1/K`` for ``1 <= j <= N`` the orbit ``x, x+u, ...,
x+(N-1)u`` visits ``N`` distinct arcs, so the signs it collects are
independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..circle import CONST, ArcSet, PiecewiseFn
from ..errors import InsufficientK, PreconditionError
from ..fixed import FixedArray, check_precision


@dataclass
class RademacherStepSpec:
    K: int
    N: int
    eps: float
    seed: int
    precision: int
    signs: np.ndarray = field(repr=False)
    good_shifts: ArcSet = field(repr=False)   # E_O

    @property
    def half_width(self) -> Fraction:
        return Fraction(1, 2 * self.K)

    def measure_good(self) -> Fraction:
        return self.good_shifts.measure()

    def guaranteed_measure(self) -> float:
        """Lower bound ``1 - 2N/K`` (each ``j <= N`` removes at most ``2/K``)."""
        return 1 - 2 * self.N / self.K

    def arc_index(self, x: np.ndarray) -> np.ndarray:
        return np.floor(np.asarray(x) * self.K).astype(np.int64) % self.K

    def values(self, x: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at float points."""
        y = np.asarray(x) * self.K
        k = np.floor(y).astype(np.int64) % self.K
        first_half = (y - np.floor(y)) < 0.5
        return np.where(first_half, 1.0, -1.0) * self.eps * self.signs[k]

    def to_json(self) -> dict:
        return {"kind": "rademacher", "K": self.K, "N": self.N, "eps": self.eps, "seed": self.seed,
                "precision": self.precision, "signs": self.signs.tolist(),
                "good_shift_measure": float(self.measure_good()),
                "guaranteed_measure": self.guaranteed_measure(),
                "good_shifts": self.good_shifts.to_json()}


def bad_shift_set(K: int, N: int, P: int) -> ArcSet:
    """Grid points ``u`` with ``||j u|| <= 1/K`` for some ``1 <= j <= N``."""
    M = 1 << P
    r = Fraction(M, K)
    starts, lasts = [], []
    for j in range(1, N + 1):
        for p in range(j):
            # j*u within M/K of p*M  <=>  u in [ceil((pM - M/K)/j), floor((pM + M/K)/j)]
            lo = -((-(p * M - r)) // j)
            hi = (p * M + r) // j
            starts.append(int(lo) % M)
            lasts.append(int(hi) % M)
    return ArcSet.from_words(FixedArray.from_ints(starts, P), FixedArray.from_ints(lasts, P), P)


def build_rademacher_step(K: int, N: int, eps: float, seed: int, precision: int = 127,
                          measure_budget: float | None = None) -> tuple[PiecewiseFn, RademacherStepSpec]:
    check_precision(precision)
    if K < 2 or N < 1:
        raise PreconditionError("need K >= 2 and N >= 1")
    if 2 * N >= K:
        raise InsufficientK(f"K={K} too small for N={N}: the good shift set may be empty")
    if measure_budget is not None and 2 * N / K > measure_budget:
        raise InsufficientK(f"K={K} only guarantees measure {1 - 2 * N / K:.4g} of good shifts")
    rng = np.random.default_rng(seed)
    signs = rng.choice(np.array([-1, 1], np.int8), size=K)
    P, M = precision, 1 << precision
    starts = [(k * M) // (2 * K) for k in range(2 * K)]
    vals = np.repeat(signs.astype(float) * eps, 2) * np.tile([1.0, -1.0], K)
    g = PiecewiseFn(P, FixedArray.from_ints(starts, P), [CONST] * (2 * K), vals)
    good = bad_shift_set(K, N, P).complement()
    return g, RademacherStepSpec(K, N, eps, seed, P, signs, good)
