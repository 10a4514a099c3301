"""Smoothing of step functions, coboundary transfer and the Hilbert example."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..birkhoff import Analytic, hilbert_example
from ..cf import RotationNumber
from ..circle import AFFINE, CONST, PiecewiseFn
from ..errors import InvariantViolation, NoRoomForBump, PreconditionError, SmallDenominator
from ..fixed import FixedArray


def step_function(P: int, starts: list[int], values: list[float]) -> PiecewiseFn:
    """Piecewise-constant function taking ``values[i]`` from ``starts[i]`` on."""
    return PiecewiseFn(P, FixedArray.from_ints(starts, P), [CONST] * len(values), values)


@dataclass(frozen=True)
class SmoothStepRecord:
    ramp_width: int       # units of 2**-P
    jumps: int
    changed_measure: Fraction
    bump: tuple[int, int, float] | None  # (start, width, height) if a bump was needed


def smooth_step(g: PiecewiseFn, delta: float) -> tuple[PiecewiseFn, SmoothStepRecord]:
    """Continuous version of a step function ``g``.

    Every jump is replaced by one affine ramp centred on it, so the exact
    mean is unchanged.  Should ``g`` carry a (rounding-size) mean of its own,
    a triangular bump in the longest constant piece absorbs it.
    """
    if np.any(g.kind != CONST):
        raise PreconditionError("smooth_step expects a piecewise-constant function")
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    P, M = g.precision, 1 << g.precision
    starts = g.breaks.to_ints(P)
    vals = g.a.tolist()
    n = len(vals)
    lengths = g._length_units()
    jumps = [i for i in range(n) if n > 1 and vals[i] != vals[i - 1]]
    if not jumps:
        f = PiecewiseFn(P, g.breaks, g.kind, g.a)
        return _absorb_mean(f, delta, SmoothStepRecord(0, 0, Fraction(0), None))
    # ramps of total measure <= delta/2, each at most a third of its neighbours
    w = min(int(Fraction(delta) * M / (2 * len(jumps))), min(lengths) // 3)
    w -= w % 2
    if w < 32:
        raise PreconditionError("delta too small for the precision")
    half = w // 2
    jump_set = set(jumps)
    segs = []
    for i in range(n):
        left = half if i in jump_set else 0
        if i in jump_set:
            segs.append(((starts[i] - half) % M, AFFINE, vals[i - 1], vals[i]))
        segs.append(((starts[i] + left) % M, CONST, vals[i], 0.0))
    f = PiecewiseFn.from_segments(P, segs)
    rec = SmoothStepRecord(w, len(jumps), Fraction(w * len(jumps), M), None)
    return _absorb_mean(f, delta, rec)


def _absorb_mean(f: PiecewiseFn, delta: float, rec: SmoothStepRecord):
    exact, cusp = f.mean_parts()
    mu = float(exact) + cusp
    if mu == 0.0:
        return f, rec
    P, M = f.precision, 1 << f.precision
    lengths = f._length_units()
    const = [i for i in range(len(f)) if f.kind[i] == CONST]
    if not const:
        raise NoRoomForBump("no constant piece to host the correction bump")
    i = max(const, key=lambda j: lengths[j])
    if Fraction(lengths[i], M) <= Fraction(delta):
        raise NoRoomForBump("no constant piece longer than delta; reduce delta")
    W = int(Fraction(delta) * M / 2)
    W -= W % 2
    c = float(f.a[i])
    h = -2 * mu / (W / M)
    s0 = f.breaks.to_ints(P)[i] + (lengths[i] - W) // 2
    segs = [(b, int(k), float(a), float(bb), float(e))
            for b, k, a, bb, e in zip(f.breaks.to_ints(P), f.kind, f.a, f.b, f.e)]
    segs += [(s0, AFFINE, c, c + h), (s0 + W // 2, AFFINE, c + h, c), ((s0 + W) % M, CONST, c)]
    out = PiecewiseFn.from_segments(P, segs)
    changed = rec.changed_measure + Fraction(W, M)
    return out, SmoothStepRecord(rec.ramp_width, rec.jumps, changed, (s0, W, h))


# ---------------------------------------------------------------------------


@dataclass
class TransferResult:
    """``h = g o R_alpha - g`` solved coefficientwise for a trigonometric ``h``."""

    h_coeffs: dict[int, complex]
    g_coeffs: dict[int, complex]
    alpha_label: str
    alpha: float
    bound: float                 # 2 * sum |g^(k)|, dominates every |S_n h|
    min_distance: float          # min over frequencies of ||k alpha||
    identity_error: float

    def h(self, x) -> np.ndarray:
        return _trig_eval(self.h_coeffs, x)

    def g(self, x) -> np.ndarray:
        return _trig_eval(self.g_coeffs, x)

    def evaluator(self) -> Analytic:
        return Analytic(self.h, "trig")


def _trig_eval(coeffs: dict[int, complex], x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape, complex)
    for k, c in coeffs.items():
        out += c * np.exp(2j * np.pi * k * x)
    return out.real


def trig_coboundary_transfer(h_hat, alpha: RotationNumber, samples: int = 1000,
                             seed: int = 0, tol: float = 1e-9) -> TransferResult:
    """Solve ``g(x + alpha) - g(x) = h(x)`` for a zero-mean trigonometric polynomial.

    ``h_hat`` maps frequency ``k`` to the coefficient of ``exp(2 pi i k x)``;
    a sequence of ``(k, c)`` pairs is accepted too.
    """
    coeffs = {int(k): complex(c) for k, c in (h_hat.items() if isinstance(h_hat, dict) else h_hat)}
    if coeffs.get(0, 0) != 0:
        raise PreconditionError("h must have zero mean (h^(0) = 0)")
    if coeffs and max(abs(k) for k in coeffs) > 10**4:
        raise PreconditionError("degree above 10**4")
    M = alpha.modulus
    g = {}
    min_d = math.inf
    for k, c in coeffs.items():
        if k == 0 or c == 0:
            continue
        r = (k * alpha.value) % M
        dist = min(r, M - r) / M
        min_d = min(min_d, dist)
        if dist < 1e-12:
            raise SmallDenominator(k, dist)
        phase = 2 * math.pi * (r / M)
        g[k] = c / (complex(math.cos(phase), math.sin(phase)) - 1)
    bound = 2 * math.fsum(abs(c) for c in g.values())
    rng = np.random.default_rng(seed)
    x = rng.random(samples)
    a = float(alpha)
    err = float(np.max(np.abs(_trig_eval(coeffs, x) - (_trig_eval(g, (x + a) % 1.0) - _trig_eval(g, x))))) \
        if coeffs else 0.0
    res = TransferResult(coeffs, g, alpha.label, a, bound, min_d, err)
    if err > tol * max(1.0, bound):
        raise InvariantViolation(f"transfer identity off by {err:g}")
    return res


# ---------------------------------------------------------------------------


def hilbert_example_eval(a: float, x):
    """Closed form ``-2a sin(2 pi x) / (1 - 2a cos(2 pi x) + a**2)``."""
    return hilbert_example(a)(x)


def hilbert_example_mean(a: float, points: int = 4096) -> float:
    """Mean by the periodic trapezoid rule (spectrally accurate here)."""
    x = np.arange(points) / points
    return float(np.mean(hilbert_example(a)(x)))
