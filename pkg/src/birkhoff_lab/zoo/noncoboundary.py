"""A Hölder function whose block sums along one orbit grow without bound.

Stage ``k`` places a bump on ``[j*alpha - h_k, j*alpha + 3*h_k]`` for every
``j`` in an index set ``J_k`` inside ``[n_k, n_{k+1})``.  The bump is
piecewise affine through the nodes ``0, h**xi, 0, -h**xi, 0``.  The heights
``h_k = (k/n_{k+1})**(1/xi)`` make each block sum ``sum_{j in J_k} f(j*alpha)``
equal ``m_k * k / n_{k+1}``, which is about ``k``.

``J_k`` is maximal: it holds every index whose interval misses all earlier
stages.  Deeper stages are far below the fixed-point grid, so the selection
runs in exact rational arithmetic.
 * Two stages cannot meet when the best approximation bound
   ``min_{0<d<N} ||d*alpha||`` exceeds the sum of their reaches.
 * Otherwise the collisions with a small explicit stage are counted with
   floor sums.
Only stages wide enough for the grid become segments of the returned
:class:`PiecewiseFn`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..cf import RotationNumber, fixed_convergents
from ..circle import AFFINE, CONST, ArcSet, PiecewiseFn
from ..errors import DepthUnreachable, InvariantViolation, PreconditionError
from ..fixed import FixedArray, multiples

SEPARATION = Fraction(5, 10000)
# a stage is kept as segments when h_k spans at least this many grid units
MIN_RESOLVED_UNITS = 1 << 20
# earlier stages with at most this many bumps are checked index by index
EXPLICIT_LIMIT = 10**4


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """``sum_{i<n} floor((a*i + b)/m)`` for ``n, m > 0`` and ``a, b >= 0``."""
    total = 0
    while True:
        if a >= m:
            total += (n - 1) * n // 2 * (a // m)
            a %= m
        if b >= m:
            total += n * (b // m)
            b %= m
        y = a * n + b
        if y < m:
            return total
        n, b, m, a = y // m, y % m, a, m


def count_in_window(lo: int, hi: int, a: int, b: int, Q: int, W: int) -> int:
    """Number of ``j`` in ``[lo, hi)`` with ``(a*j + b) mod Q`` in ``[0, W]``."""
    if hi <= lo:
        return 0
    if W >= Q - 1:
        return hi - lo
    a %= Q
    b0 = (a * lo + b) % Q + Q
    n = hi - lo
    return floor_sum(n, Q, a, b0) - floor_sum(n, Q, a, b0 - W - 1)


@dataclass
class Stage:
    k: int
    lo: int                      # n_k
    hi: int                      # n_{k+1}
    h: Fraction                  # exact, or rounded outward when 1/xi is not an integer
    height: Fraction             # h**xi = k/n_{k+1}
    m: int
    excluded: int
    resolved: bool
    explicit: list[int] | None = field(default=None, repr=False)  # excluded indices, when known

    @property
    def block_sum(self) -> Fraction:
        return self.m * self.height

    @property
    def measure(self) -> Fraction:
        return 4 * self.h * self.m

    def indices(self) -> np.ndarray:
        if self.explicit is None:
            raise PreconditionError(f"stage {self.k} has no explicit index list")
        j = np.arange(self.lo, self.hi, dtype=np.int64)
        return np.setdiff1d(j, np.asarray(self.explicit, np.int64)) if self.explicit else j

    def to_dict(self) -> dict:
        return {"k": self.k, "n_k": self.lo, "n_k1": self.hi, "h": float(self.h),
                "height": str(self.height), "m": self.m, "excluded": self.excluded,
                "measure": float(self.measure), "block_sum": float(self.block_sum),
                "resolved": self.resolved}


@dataclass
class NonCoboundarySpec:
    alpha_label: str
    precision: int
    xi: float
    K: int
    stages: list[Stage]
    exact_heights: bool

    @property
    def n(self) -> list[int]:
        return [self.stages[0].lo] + [s.hi for s in self.stages]

    @property
    def resolved_depth(self) -> int:
        return sum(1 for s in self.stages if s.resolved)

    def to_json(self) -> dict:
        return {"kind": "noncoboundary", "alpha": self.alpha_label, "precision": self.precision,
                "xi": self.xi, "K": self.K, "n": [str(v) for v in self.n],
                "exact_heights": self.exact_heights, "resolved_depth": self.resolved_depth,
                "stages": [s.to_dict() for s in self.stages]}


class _Geometry:
    """Convergent data of the rounded rotation number."""

    def __init__(self, alpha: RotationNumber):
        self.A, self.M = alpha.value, alpha.modulus
        conv = fixed_convergents(alpha)
        self.q = [c.q for c in conv]
        self.dist = [Fraction(abs(c.q * self.A - c.p * self.M), self.M) for c in conv]

    def min_distance(self, N: int) -> Fraction:
        """``min_{0<d<N} ||d*alpha||`` (best approximation by convergents)."""
        best = [i for i, q in enumerate(self.q) if q < N]
        if not best:
            raise PreconditionError("need N >= 2")
        return self.dist[best[-1]]


def _height(k: int, n: int, xi: float) -> tuple[Fraction, bool]:
    r = 1 / xi
    if abs(r - round(r)) < 1e-12:
        return Fraction(k, n) ** round(r), True
    # outward rounding keeps every disjointness statement conservative
    return Fraction((k / n) ** r) * (1 + Fraction(1, 2**40)), False


def _collisions(geo: _Geometry, lo: int, hi: int, h: Fraction, earlier: Stage) -> int:
    """Indices in ``[lo, hi)`` whose interval meets a bump of ``earlier``."""
    # intervals meet iff (j - j')*alpha mod 1 lies in [-h' - 3h, 3h' + h]
    hp = earlier.h
    shift, width = hp + 3 * h, 4 * (hp + h)
    Q = math.lcm(geo.M, shift.denominator, width.denominator)
    a = geo.A * (Q // geo.M)
    s, W = shift.numerator * (Q // shift.denominator), width.numerator * (Q // width.denominator)
    return sum(count_in_window(lo, hi, a, (-jp * a + s) % Q, Q, W) for jp in earlier.indices().tolist())


def build_noncoboundary(alpha: RotationNumber, xi: float = 0.25, K: int = 6,
                        resolve_units: int = MIN_RESOLVED_UNITS,
                        resolve_max_bumps: int = 2 * 10**6) -> tuple[PiecewiseFn, NonCoboundarySpec]:
    """Greedy construction up to depth ``K``.

    ``n_{k+1}`` is the smallest convergent denominator of the rounded
    rotation number that keeps the scales separated and leaves ``m_k``
    above ``0.99*n_{k+1}`` with stage measure below ``100**-(k+2)``.
    """
    if not 0 < xi < 1:
        raise PreconditionError("xi must lie in (0, 1)")
    if K < 1:
        raise PreconditionError("depth K must be positive")
    if alpha.rational:
        raise PreconditionError("the construction needs an irrational rotation")
    geo = _Geometry(alpha)
    stages: list[Stage] = []
    n_k, exact = 1, True
    for k in range(1, K + 1):
        stage = None
        for q in geo.q:
            if q <= n_k:
                continue
            stage = _try_stage(geo, k, n_k, q, xi, stages, resolve_units, resolve_max_bumps)
            if stage is not None:
                break
        if stage is None:
            raise DepthUnreachable(k, f"no convergent denominator of the {alpha.precision}-bit "
                                      f"rounding admits stage {k}")
        exact &= _height(k, stage.hi, xi)[1]
        stages.append(stage)
        n_k = stage.hi
    spec = NonCoboundarySpec(alpha.label, alpha.precision, xi, K, stages, exact)
    return _materialize(alpha, spec), spec


def _try_stage(geo, k, n_k, q, xi, stages, resolve_units, resolve_max_bumps) -> Stage | None:
    if stages and not Fraction(k, q) < SEPARATION * stages[-1].height:
        return None
    h, _ = _height(k, q, xi)
    reach = geo.min_distance(q)
    if not reach > 8 * h:           # bumps of one stage must not meet
        return None
    excluded, explicit = 0, []
    for st in stages:
        if reach > 4 * (h + st.h):
            continue
        if st.m > EXPLICIT_LIMIT or st.explicit is None:
            return None
        # windows around distinct earlier bumps must not overlap, so counts add up
        if not geo.min_distance(st.hi) > 8 * (h + st.h):
            return None
        hits = _collisions(geo, n_k, q, h, st)
        if hits:
            excluded, explicit = excluded + hits, None
    m = q - n_k - excluded
    if not 100 * m > 99 * q:
        return None
    if not 4 * h * m < Fraction(1, 100 ** (k + 2)):
        return None
    resolved = h * geo.M >= resolve_units and m <= resolve_max_bumps and explicit is not None
    return Stage(k, n_k, q, h, Fraction(k, q), m, excluded, resolved, explicit)


def _materialize(alpha: RotationNumber, spec: NonCoboundarySpec) -> PiecewiseFn:
    P, M = alpha.precision, alpha.modulus
    breaks, kinds, va, vb = [], [], [], []
    for st in spec.stages:
        if not st.resolved:
            continue
        j = st.indices()
        c = multiples(j.astype(np.uint64), alpha.value, P)
        hu = round(st.h * M)
        H = float(st.height)
        z = np.zeros(len(j))
        for off, kind, left, right in ((-1, AFFINE, 0.0, H), (0, AFFINE, H, 0.0), (1, AFFINE, 0.0, -H),
                                       (2, AFFINE, -H, 0.0), (3, CONST, 0.0, 0.0)):
            breaks.append(c.add_int(off * hu, P))
            kinds.append(np.full(len(j), kind))
            va.append(z + left)
            vb.append(z + right)
    if not breaks:
        return PiecewiseFn.zero(P)
    f = PiecewiseFn(P, FixedArray.concat(breaks), np.concatenate(kinds), np.concatenate(va),
                    np.concatenate(vb))
    _check_disjoint(alpha, spec)
    return f


def _check_disjoint(alpha: RotationNumber, spec: NonCoboundarySpec) -> None:
    """Exact check that the resolved bumps are pairwise disjoint on the grid."""
    P, M = alpha.precision, alpha.modulus
    starts, lasts, total = [], [], 0
    for st in spec.stages:
        if not st.resolved:
            continue
        c = multiples(st.indices().astype(np.uint64), alpha.value, P)
        hu = round(st.h * M)
        starts.append(c.add_int(-hu, P))
        lasts.append(c.add_int(3 * hu, P))
        total += st.m * (4 * hu + 1)
    arcs = ArcSet.from_words(FixedArray.concat(starts), FixedArray.concat(lasts), P)
    if arcs.measure_units() != total:
        raise InvariantViolation("resolved bumps overlap")


def orbit_partial_sums(f: PiecewiseFn, alpha: RotationNumber, n: int) -> np.ndarray:
    """``S_1 f(0), ..., S_n f(0)`` for the resolved part of the function."""
    P = alpha.precision
    pts = multiples(np.arange(n, dtype=np.uint64), alpha.value, P)
    return np.cumsum(f.eval_words(pts).astype(np.longdouble)).astype(np.float64)
