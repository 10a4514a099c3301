"""Birkhoff sums along rotation orbits and their diagnostics.

Functions accepted here are either :class:`~birkhoff_lab.circle.PiecewiseFn`
objects (evaluated exactly on grid points) or plain vectorised callables
``f(x: ndarray[float]) -> ndarray`` such as :class:`Analytic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cf import RotationNumber
from .circle import GrowthGauge, iter_orbit, orbit_chunk
from .errors import BudgetExceeded, PreconditionError
from .fixed import FixedArray

MAX_SERIES = 10**8
MAX_DISCREPANCY = 10**7
CHUNK = 1 << 20


class Analytic:
    """Wrap a vectorised float function of ``x in [0, 1)`` as an evaluator."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], name: str = "analytic"):
        self.func = func
        self.name = name

    def eval_words(self, x: FixedArray) -> np.ndarray:
        return np.asarray(self.func(x.to_float()), dtype=np.float64)

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=np.float64))

    def __repr__(self):
        return f"Analytic({self.name})"


def evaluate(f, x: FixedArray) -> np.ndarray:
    if hasattr(f, "eval_words"):
        return f.eval_words(x)
    return np.asarray(f(x.to_float()), dtype=np.float64)


def trig_coboundary(alpha: float, g=None) -> Analytic:
    """``g(x + alpha) - g(x)`` for ``g = sin(2 pi x)`` unless another ``g`` is given."""
    g = g or (lambda x: np.sin(2 * np.pi * x))
    return Analytic(lambda x: g((x + alpha) % 1.0) - g(x), "coboundary")


# ---------------------------------------------------------------------------
# series


@dataclass
class BirkhoffSeries:
    """``S_1 .. S_N`` of ``f`` along ``x + k*stride*alpha``.

    Partial sums are accumulated in extended precision; for ``|f| <= 1`` the
    accumulated rounding stays below ``N * 2**-50``.
    """

    alpha_label: str
    x: int
    stride: int
    values: np.ndarray
    runmax: np.ndarray
    gauge: GrowthGauge | None = None
    ratio_runmax: np.ndarray | None = None

    @property
    def N(self) -> int:
        return len(self.values)

    def S(self, n: int) -> float:
        return 0.0 if n == 0 else float(self.values[n - 1])

    def increments(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.values]))


def _check_budget(N: int, limit: int = MAX_SERIES):
    if N < 1:
        raise PreconditionError("N must be at least 1")
    if N > limit:
        raise BudgetExceeded(f"{N} evaluations exceed the budget of {limit}")


def orbit_values(f, alpha: RotationNumber, x: int, N: int, stride: int = 1, start: int = 0) -> np.ndarray:
    """``f(x + k*stride*alpha)`` for ``start <= k < start + N``."""
    P = alpha.precision
    step = (stride * alpha.value) % alpha.modulus
    base = (x + start * step) % alpha.modulus
    return np.concatenate([evaluate(f, pts) for _, pts in iter_orbit(base, step, N, P, CHUNK)])


def birkhoff_series(f, alpha: RotationNumber, x: int, N: int, stride: int = 1,
                    gauge: GrowthGauge | None = None) -> BirkhoffSeries:
    _check_budget(N)
    if stride < 1:
        raise PreconditionError("stride must be positive")
    vals = orbit_values(f, alpha, x, N, stride)
    S = np.cumsum(vals.astype(np.longdouble)).astype(np.float64)
    runmax = np.maximum.accumulate(np.abs(S))
    ratio = None
    if gauge is not None:
        n = np.arange(1, N + 1)
        ratio = np.maximum.accumulate(np.abs(S) / gauge(n))
    return BirkhoffSeries(alpha.label, x, stride, S, runmax, gauge, ratio)


def birkhoff_sums(f, alpha: RotationNumber, xs: FixedArray, m: int, stride: int = 1) -> np.ndarray:
    """``S_m f(x)`` for many starting points at once."""
    _check_budget(m * max(len(xs), 1))
    P = alpha.precision
    step = (stride * alpha.value) % alpha.modulus
    total = np.zeros(len(xs), np.longdouble)
    block = max(1, CHUNK // max(len(xs), 1))
    for k0 in range(0, m, block):
        offs = orbit_chunk(0, step, k0, min(block, m - k0), P)
        pts = FixedArray(xs.hi[:, None], xs.lo[:, None]) + FixedArray(offs.hi[None, :], offs.lo[None, :])
        flat = FixedArray(pts.hi.ravel(), pts.lo.ravel())
        vals = evaluate(f, flat).reshape(pts.hi.shape)
        total += vals.astype(np.longdouble).sum(axis=1)
    return total.astype(np.float64)


# ---------------------------------------------------------------------------
# discrepancy


@dataclass(frozen=True)
class DiscrepancyReport:
    """Discrepancy of ``alpha, 2 alpha, ..., n alpha``.

    ``star`` is anchored at 0 (intervals ``[0, u)``); ``extreme`` is the
    supremum over all arcs and is translation invariant, which is what the
    Hölder bound for orbits started at an arbitrary ``x`` needs.
    """

    n: int
    star: float
    index: int
    extreme: float

    @property
    def value(self) -> float:
        return self.star


def _sorted_orbit(alpha: RotationNumber, n: int) -> tuple[np.ndarray, np.ndarray]:
    pts = orbit_chunk(0, alpha.value, 1, n, alpha.precision)
    order = pts.argsort()
    return pts[order].to_float(), order + 1


def discrepancy_star(alpha: RotationNumber, n: int) -> DiscrepancyReport:
    _check_budget(n, MAX_DISCREPANCY)
    u, idx = _sorted_orbit(alpha, n)
    i = np.arange(1, n + 1)
    above = i / n - u
    below = u - (i - 1) / n
    best = np.maximum(above, below)
    k = int(np.argmax(best))
    extreme = 1.0 / n + float(above.max()) - float(above.min())
    return DiscrepancyReport(n, float(best[k]), int(idx[k]), min(extreme, 1.0))


def discrepancy_bruteforce(alpha: RotationNumber, n: int) -> float:
    """Anchored discrepancy by scanning every interval ``[0, u)`` endpoint (quadratic)."""
    u = np.sort(orbit_chunk(0, alpha.value, 1, n, alpha.precision).to_float())
    best = 0.0
    for c in u:
        inside_open = np.count_nonzero(u < c)
        inside_closed = np.count_nonzero(u <= c)
        best = max(best, abs(inside_open / n - c), abs(inside_closed / n - c))
    return best


@dataclass(frozen=True)
class KoksmaResult:
    lhs: float
    rhs: float
    holds: bool
    lip: float
    discrepancy: float


def koksma_check(f, xi: float, alpha: RotationNumber, x: int, n: int, disc: DiscrepancyReport | None = None,
                 slack: float = 1e-9) -> KoksmaResult:
    """Compare ``|S_n f(x)|`` with ``n * Lip_xi(f) * D_n**xi``.

    ``D_n`` is the arc (extreme) discrepancy; it dominates the anchored one
    and makes the bound valid for every starting point.
    """
    lip = f.lip_seminorm(xi)
    disc = disc or discrepancy_star(alpha, n)
    lhs = abs(float(birkhoff_sums(f, alpha, FixedArray.from_ints([x], alpha.precision), n)[0]))
    rhs = n * lip * disc.extreme**xi
    holds = lhs <= rhs * (1 + slack) + n * 2.0**-50
    return KoksmaResult(lhs, rhs, holds, lip, disc.extreme)


# ---------------------------------------------------------------------------
# block sums and the Hilbert transform


def block_sums(f, alpha: RotationNumber, x: int, breakpoints: Sequence[int]) -> np.ndarray:
    bp = [int(b) for b in breakpoints]
    if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])) or not bp or bp[0] < 0:
        raise PreconditionError("breakpoints must be increasing and non-negative")
    if bp[-1] == 0:
        return np.zeros(0)
    series = birkhoff_series(f, alpha, x, bp[-1])
    S = np.concatenate([[0.0], series.values])
    blocks = np.array([S[b1] - S[b0] for b0, b1 in zip(bp, bp[1:])])
    return blocks


@dataclass
class HilbertTrajectory:
    partial: np.ndarray  # partial[N'-1] = sum_{n <= N'} f(x + n alpha)/n
    running_sup: np.ndarray

    def record_index(self) -> int:
        """``N'`` at which the running supremum was last raised."""
        return int(np.argmax(self.running_sup == self.running_sup[-1])) + 1


def hilbert_partial(f, alpha: RotationNumber, x: int, N: int) -> HilbertTrajectory:
    _check_budget(N)
    vals = orbit_values(f, alpha, x, N, start=1)
    n = np.arange(1, N + 1, dtype=np.longdouble)
    partial = np.cumsum(vals.astype(np.longdouble) / n).astype(np.float64)
    return HilbertTrajectory(partial, np.maximum.accumulate(np.abs(partial)))


def hilbert_example(a: float) -> Analytic:
    """``f(x) = -2a sin(2 pi x) / (1 - 2a cos(2 pi x) + a**2)``."""
    if not 0 < a < 1:
        raise PreconditionError("a must lie in (0, 1)")

    def f(x):
        t = 2 * np.pi * np.asarray(x, dtype=np.float64)
        return -2 * a * np.sin(t) / (1 - 2 * a * np.cos(t) + a * a)

    return Analytic(f, f"hilbert(a={a})")


def hilbert_fourier_side(a: float, alpha: RotationNumber, N: int) -> np.ndarray:
    """Prefix values of ``-2 sum_k a**k Im G_N(k alpha)`` for ``N' = 1..N``.

    The geometric series in ``k`` stops once ``a**k < 2**-60``.
    """
    if not 0 < a < 1:
        raise PreconditionError("a must lie in (0, 1)")
    if N == 0:
        return np.zeros(0)
    _check_budget(N)
    kmax = max(1, math.ceil(60 * math.log(2) / -math.log(a)))
    n = np.arange(1, N + 1, dtype=np.float64)
    total = np.zeros(N, np.longdouble)
    for k in range(1, kmax + 1):
        w = a**k
        if w < 2.0**-60:
            break
        # n*k*alpha mod 1, exact on the grid
        u = orbit_chunk(0, (k * alpha.value) % alpha.modulus, 1, N, alpha.precision).to_float()
        total += (w * np.sin(2 * np.pi * u) / n).astype(np.longdouble)
    return (-2 * np.cumsum(total)).astype(np.float64)


def sine_series_sup(grid: int = 10**4, N: int = 10**5, block: int = 64) -> tuple[float, float, int]:
    """``max |sum_{n<=N'} sin(2 pi n t)/n|`` over ``t = i/grid`` and ``N' <= N``.

    Returns ``(sup, t, N')``.  Phases ``n*i mod grid`` are exact integers.
    """
    table = np.sin(2 * np.pi * np.arange(grid) / grid)
    inv = 1.0 / np.arange(1, N + 1)
    best, best_t, best_n = 0.0, 0.0, 0
    half = grid // 2 + 1  # t and 1 - t give opposite sums
    nchunk = 1 << 14
    for i0 in range(0, half, block):
        i = np.arange(i0, min(half, i0 + block), dtype=np.int64)[:, None]
        acc = np.zeros((len(i), 1))
        for n0 in range(0, N, nchunk):
            n = np.arange(n0 + 1, min(N, n0 + nchunk) + 1, dtype=np.int64)[None, :]
            terms = table[(n * i) % grid] * inv[n - 1]
            cs = np.cumsum(terms, axis=1) + acc
            acc = cs[:, -1:]
            a = np.abs(cs)
            k = np.unravel_index(np.argmax(a), a.shape)
            if a[k] > best:
                best, best_t, best_n = float(a[k]), float(i[k[0], 0]) / grid, int(n[0, k[1]])
    return best, best_t, best_n


# ---------------------------------------------------------------------------
# growth


@dataclass
class GrowthReport:
    nu_hat: float
    residual: float
    dyadic: list[tuple[int, float]]
    decades: list[tuple[int, float]]
    max_ratio: float
    argmax_ratio: int
    degenerate: bool = False
    flags: list[str] = field(default_factory=list)


def growth_report(series: BirkhoffSeries, gauge: GrowthGauge) -> GrowthReport:
    N = series.N
    if N < 16:
        raise PreconditionError("growth report needs at least 16 terms")
    S = np.abs(series.values)
    n = np.arange(1, N + 1)
    ratio = S / gauge(n)
    k = int(np.argmax(ratio))
    dyadic = []
    j = 0
    while (1 << j) <= N:
        lo, hi = 1 << j, min(N, (1 << (j + 1)) - 1)
        dyadic.append((hi, float(series.runmax[hi - 1])))
        j += 1
    decades = []
    d = 0
    while 10**d <= N:
        lo, hi = 10**d, min(N, 10 ** (d + 1) - 1)
        decades.append((lo, float(S[lo - 1:hi].max())))
        d += 1
    if not np.any(S > 0):
        return GrowthReport(math.nan, math.nan, dyadic, decades, 0.0, 1, True, ["DegenerateSeries"])
    pts = [(m, v) for m, v in dyadic if v > 0]
    if len(pts) < 2:
        return GrowthReport(math.nan, math.nan, dyadic, decades, float(ratio[k]), k + 1, True,
                            ["DegenerateSeries"])
    lx = np.log([m for m, _ in pts])
    ly = np.log([v for _, v in pts])
    slope, icpt = np.polyfit(lx, ly, 1)
    res = float(np.sqrt(np.mean((ly - (slope * lx + icpt)) ** 2)))
    return GrowthReport(float(slope), res, dyadic, decades, float(ratio[k]), k + 1)
