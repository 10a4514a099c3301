"""Pre-measures of explicit covers, cover audits and a box-counting heuristic.

``pre_measure`` sums ``|I|**s`` over a cover, which bounds the ``s``-dimensional
Hausdorff pre-measure of whatever the cover contains from above.  The box
counting in :func:`slow_set_sample` is an exploration aid only.  It says
nothing rigorous about Hausdorff dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .birkhoff import evaluate
from .cf import RotationNumber
from .circle import ArcSet, GrowthGauge
from .covers import union_of
from .errors import BudgetExceeded, CoverMismatch, MeshViolation, PreconditionError
from .fixed import FixedArray, multiples

MAX_GRID = 1 << 24
MAX_HORIZON = 10**6
MAX_WORK = 2 * 10**10


@dataclass(frozen=True)
class Cover:
    lengths: tuple[float, ...]
    delta: float
    positions: tuple[float, ...] | None = None

    def __post_init__(self):
        if any(not v > 0 for v in self.lengths):
            raise PreconditionError("cover lengths must be positive")
        if self.positions is not None and len(self.positions) != len(self.lengths):
            raise PreconditionError("one position per length")

    @classmethod
    def of(cls, lengths, delta: float | None = None, positions=None) -> "Cover":
        lengths = tuple(float(v) for v in lengths)
        delta = max(lengths, default=0.0) if delta is None else float(delta)
        return cls(lengths, delta, None if positions is None else tuple(float(p) for p in positions))

    @property
    def mesh(self) -> float:
        return max(self.lengths, default=0.0)

    def to_json(self) -> dict:
        d = {"lengths": list(self.lengths), "delta": self.delta}
        if self.positions is not None:
            d["positions"] = list(self.positions)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Cover":
        return cls.of(d["lengths"], d.get("delta"), d.get("positions"))


def pre_measure(cover: Cover, s: float) -> float:
    if not 0 < s <= 1:
        raise PreconditionError("s must lie in (0, 1]")
    if cover.mesh > cover.delta:
        raise MeshViolation(f"cover piece of length {cover.mesh:g} exceeds delta = {cover.delta:g}")
    return math.fsum(v**s for v in cover.lengths)


def class_pre_measure(count: int, length: float, s: float) -> float:
    return count * length**s


@dataclass
class AuditReport:
    classes: list[dict]
    pre_measure: float           # the cover actually built
    proof_pre_measure: float     # with every class at its promised count
    s: float
    delta: float
    budget: float
    complement_covered: bool

    @property
    def passed(self) -> bool:
        counts_ok = all(c["count"] <= c["proof_count"] for c in self.classes)
        return self.complement_covered and counts_ok and self.pre_measure < self.budget

    def to_dict(self) -> dict:
        return {"classes": self.classes, "pre_measure": self.pre_measure,
                "proof_pre_measure": self.proof_pre_measure, "s": self.s, "delta": self.delta,
                "budget": self.budget, "complement_covered": self.complement_covered,
                "pass": self.passed}


def construction_cover_audit(spec, s: float, delta: float, budget: float) -> AuditReport:
    """Audit the cover stored with a plateau or Hölder spec.

    The union of the cover classes must contain the complement of the good
    set exactly, and no class may hold more intervals than promised.
    """
    if not 0 < s <= 1:
        raise PreconditionError("s must lie in (0, 1]")
    P = spec.precision
    classes = [c for c in spec.cover]
    for c in classes:
        if c.count and c.length_float > delta:
            raise MeshViolation(f"class {c.name!r} has length {c.length_float:g} > delta = {delta:g}")
    complement = spec.good_set.complement()
    covered = complement.issubset(union_of(classes, P))
    if not covered:
        missing = complement.difference(union_of(classes, P))
        raise CoverMismatch(f"cover misses a set of measure {float(missing.measure()):.3g}")
    rows = []
    for c in classes:
        rows.append({**c.summary(), "pre_measure": class_pre_measure(c.count, c.length_float, s),
                     "proof_pre_measure": class_pre_measure(c.proof_count, c.length_float, s)})
    actual = math.fsum(r["pre_measure"] for r in rows)
    proof = math.fsum(r["proof_pre_measure"] for r in rows)
    return AuditReport(rows, actual, proof, s, delta, budget, covered)


# ---------------------------------------------------------------------------
# slow points on a grid


@dataclass
class SlowSetResult:
    grid_size: int
    B: float
    M: int
    N: int
    slow: np.ndarray = field(repr=False)      # one flag per grid cell
    ratio: np.ndarray = field(repr=False)     # max_{M<=n<=N} |S_n f| / psi(n) at the cell centre
    scales: tuple[int, ...]
    counts: tuple[int, ...]
    dimension: float | None
    residual: float | None

    @property
    def undefined(self) -> bool:
        return self.dimension is None

    def arcset(self, precision: int = 127) -> ArcSet:
        """Union of the slow cells."""
        idx = np.nonzero(self.slow)[0]
        if len(idx) == 0:
            return ArcSet.empty(precision)
        shift = precision - int(math.log2(self.grid_size))
        starts = FixedArray.from_ints([int(i) << shift for i in idx], precision)
        lasts = starts.add_int((1 << shift) - 1, precision)
        return ArcSet.from_words(starts, lasts, precision)

    def with_threshold(self, B: float) -> "SlowSetResult":
        """Same grid and sums, different threshold."""
        return _finish(self.grid_size, B, self.M, self.N, self.ratio, self.scales)

    def to_dict(self) -> dict:
        return {"grid_size": self.grid_size, "B": self.B, "M": self.M, "N": self.N,
                "slow_fraction": float(self.slow.mean()), "scales": list(self.scales),
                "counts": list(self.counts), "dimension": self.dimension, "residual": self.residual,
                "undefined": self.undefined}


def box_counts(slow: np.ndarray, scales) -> list[int]:
    G = len(slow)
    out = []
    for j in scales:
        boxes = 1 << j
        if boxes > G:
            raise PreconditionError(f"scale 2**-{j} is finer than the grid")
        out.append(int(slow.reshape(boxes, G // boxes).any(axis=1).sum()))
    return out


def _finish(G, B, M, N, ratio, scales) -> SlowSetResult:
    slow = ratio <= B
    counts = box_counts(slow, scales)
    dim = res = None
    if all(c > 0 for c in counts) and len(scales) >= 2:
        j = np.asarray(scales, float)
        y = np.log2(np.asarray(counts, float))
        coef, resid, *_ = np.polyfit(j, y, 1, full=True)
        dim = float(coef[0])
        res = float(math.sqrt(resid[0] / len(j))) if len(resid) else 0.0
    return SlowSetResult(G, B, M, N, slow, ratio, tuple(scales), tuple(counts), dim, res)


def slow_set_sample(f, alpha: RotationNumber, gauge: GrowthGauge, B: float, M: int, N: int,
                    grid_size: int = 1 << 16, scales=None, chunk: int = 256) -> SlowSetResult:
    """Flag grid cells whose centre keeps ``|S_n f| <= B * psi(n)`` for ``M <= n <= N``."""
    if grid_size & (grid_size - 1) or not 2 <= grid_size <= MAX_GRID:
        raise PreconditionError("grid_size must be a power of two up to 2**24")
    if not 1 <= M <= N or N > MAX_HORIZON:
        raise PreconditionError("need 1 <= M <= N <= 10**6")
    if grid_size * N > MAX_WORK:
        raise BudgetExceeded(f"grid_size * N = {grid_size * N} exceeds {MAX_WORK}")
    g_bits = int(math.log2(grid_size))
    scales = tuple(range(min(6, g_bits), min(16, g_bits) + 1)) if scales is None else tuple(scales)
    P = alpha.precision
    shift = P - g_bits
    centres = FixedArray.from_ints([(i << shift) + (1 << (shift - 1)) for i in range(grid_size)], P)
    psi = np.array([float(gauge(n)) for n in range(M, N + 1)])
    S = np.zeros(grid_size, np.longdouble)
    ratio = np.zeros(grid_size)
    for start in range(0, N, chunk):
        steps = multiples(np.arange(start, min(N, start + chunk), dtype=np.uint64), alpha.value, P)
        for t in range(len(steps)):
            n = start + t + 1
            S += evaluate(f, centres + steps[t:t + 1])
            if n >= M:
                np.maximum(ratio, np.abs(S.astype(np.float64)) / psi[n - M], out=ratio)
    return _finish(grid_size, B, M, N, ratio, scales)
