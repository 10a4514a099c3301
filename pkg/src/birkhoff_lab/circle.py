"""Points, arc sets and piecewise functions on the circle T = R/Z.

Circle points are integers modulo ``2**P``.  Arc sets and breakpoints are
held as :class:`~birkhoff_lab.fixed.FixedArray` limbs so that sets with
millions of arcs stay cheap, while every set operation remains exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cf import RotationNumber
from .errors import InvariantViolation, PreconditionError, UnsupportedExponent
from .fixed import FixedArray, check_precision, locate, multiples, split

# ---------------------------------------------------------------------------
# points


def point_from_float(x: float, P: int) -> int:
    return int(Fraction(x % 1.0) * (1 << P)) % (1 << P)


def point_to_hex(v: int, P: int) -> str:
    return format(v % (1 << P), "#x")


def point_from_hex(text: str, P: int) -> int:
    return int(text, 16) % (1 << P)


def orbit(x: int, alpha: RotationNumber, n: int, stride: int = 1) -> FixedArray:
    """Orbit ``x + k*stride*alpha`` for ``k < n``, exact at the precision of ``alpha``."""
    if n < 1 or stride < 1:
        raise PreconditionError("orbit needs n >= 1 and stride >= 1")
    P = alpha.precision
    return orbit_chunk(x, (stride * alpha.value) % (1 << P), 0, n, P)


def orbit_chunk(x: int, step: int, start: int, n: int, P: int) -> FixedArray:
    """Points ``x + k*step`` for ``start <= k < start + n`` (any ``start``)."""
    base = (x + start * step) % (1 << P)
    out = []
    for k0 in range(0, n, 1 << 30):
        k = np.arange(k0, min(n, k0 + (1 << 30)), dtype=np.uint64)
        out.append(multiples(k, step, P).add_int(base, P))
    return out[0] if len(out) == 1 else FixedArray.concat(out)


def iter_orbit(x: int, step: int, n: int, P: int, chunk: int = 1 << 20):
    """Yield ``(k0, points)`` blocks covering ``k < n``."""
    for k0 in range(0, n, chunk):
        yield k0, orbit_chunk(x, step, k0, min(chunk, n - k0), P)


# ---------------------------------------------------------------------------
# arcs


@dataclass(frozen=True)
class Arc:
    """Half-open arc ``[start, start + length)``; integers in units of ``2**-P``."""

    start: int
    length: int
    precision: int

    def __post_init__(self):
        if not 0 < self.length <= (1 << self.precision):
            raise PreconditionError("arc length must lie in (0, 1]")

    @property
    def end(self) -> int:
        return (self.start + self.length) % (1 << self.precision)

    def as_floats(self) -> tuple[float, float]:
        M = float(1 << self.precision)
        return self.start / M, self.length / M


class ArcSet:
    """Finite union of half-open arcs of T.

    Internally each piece is a linear run ``[start, last]`` of grid points
    (``last`` inclusive), so the full circle never needs the value 1.  After
    :meth:`normalize` pieces are sorted, disjoint and non-adjacent.
    """

    __slots__ = ("precision", "starts", "lasts", "normalized")

    def __init__(self, precision: int, starts: FixedArray, lasts: FixedArray, normalized: bool = False):
        self.precision = check_precision(precision)
        self.starts = starts
        self.lasts = lasts
        self.normalized = normalized

    # -- construction -------------------------------------------------
    @classmethod
    def empty(cls, P: int) -> "ArcSet":
        z = np.zeros(0, np.uint64)
        return cls(P, FixedArray(z, z), FixedArray(z, z), True)

    @classmethod
    def full(cls, P: int) -> "ArcSet":
        M = 1 << P
        return cls(P, FixedArray.full(0, P, 1), FixedArray.full(M - 1, P, 1), True)

    @classmethod
    def from_arcs(cls, arcs: Iterable[tuple[int, int]], P: int) -> "ArcSet":
        """Arcs given as ``(start, length)`` integer pairs; lengths may be 0."""
        M = 1 << P
        starts, lasts = [], []
        for s, length in arcs:
            if length < 0 or length > M:
                raise PreconditionError("arc length must lie in [0, 1]")
            if length:
                starts.append(s % M)
                lasts.append((s + length - 1) % M)
        return cls.from_words(FixedArray.from_ints(starts, P), FixedArray.from_ints(lasts, P), P)

    @classmethod
    def from_floats(cls, arcs: Iterable[tuple[float, float]], P: int) -> "ArcSet":
        """Arcs given as ``(start, end)`` floats, end exclusive, may wrap."""
        M = 1 << P
        out = []
        for a, b in arcs:
            s, e = point_from_float(a, P), point_from_float(b, P)
            out.append((s, (e - s) % M or (M if b - a >= 1 else 0)))
        return cls.from_arcs(out, P)

    @classmethod
    def from_words(cls, starts: FixedArray, lasts: FixedArray, P: int) -> "ArcSet":
        """Vectorised constructor; pieces with ``last < start`` wrap through 0."""
        return cls(P, starts, lasts, False).normalize()

    @classmethod
    def from_start_end(cls, starts: FixedArray, ends: FixedArray, P: int) -> "ArcSet":
        """Non-empty arcs ``[start, end)`` with ``end != start``; wrapping allowed."""
        u = FixedArray.full(1, P, 1)
        return cls.from_words(starts, ends - u, P)

    # -- basic views --------------------------------------------------
    def __len__(self) -> int:
        return len(self.starts)

    @property
    def modulus(self) -> int:
        return 1 << self.precision

    def _unit(self) -> FixedArray:
        return FixedArray.full(1, self.precision, 1)

    def _max(self) -> FixedArray:
        return FixedArray.full(self.modulus - 1, self.precision, 1)

    def intervals(self) -> list[tuple[int, int]]:
        """Linear pieces as ``(start, end)`` integer pairs, ``end`` exclusive."""
        s = self.starts.to_ints(self.precision)
        l = self.lasts.to_ints(self.precision)
        return [(a, b + 1) for a, b in zip(s, l)]

    def arcs(self) -> list[Arc]:
        """Circular arcs, with a piece ending at 1 joined to one starting at 0."""
        iv = self.normalize().intervals()
        M = self.modulus
        if len(iv) >= 2 and iv[0][0] == 0 and iv[-1][1] == M:
            first = iv.pop(0)
            s, _ = iv.pop()
            iv.append((s, M + first[1]))
        return [Arc(s, e - s, self.precision) for s, e in iv]

    def count_arcs(self) -> int:
        n = self.normalize()
        if len(n) < 2:
            return len(n)
        wrap = int(n.starts.hi[0]) == 0 and int(n.starts.lo[0]) == 0 and bool(
            n.lasts[-1:].equal(self._max())[0])
        return len(n) - int(wrap)

    def lengths_units(self) -> np.ndarray:
        """Piece lengths as Python ints (object array)."""
        d = (self.lasts - self.starts).to_ints(self.precision)
        return np.array([x + 1 for x in d], dtype=object)

    def lengths(self) -> np.ndarray:
        """Piece lengths as floats (exact up to float rounding)."""
        d = self.lasts - self.starts
        return d.to_float() + 2.0**-self.precision

    def measure_units(self) -> int:
        n = self.normalize()
        shift = 127 - self.precision
        return ((n.lasts - n.starts).sum_units() >> shift) + len(n)

    def measure(self) -> Fraction:
        return Fraction(self.measure_units(), self.modulus)

    # -- algebra ------------------------------------------------------
    def normalize(self) -> "ArcSet":
        if self.normalized:
            return self
        P = self.precision
        s, l = self.starts, self.lasts
        wrap = l.less(s)
        if wrap.any():
            n_w = int(wrap.sum())
            s = FixedArray.concat([s, FixedArray.full(0, P, n_w)])
            l = FixedArray.concat([l.where(~wrap, self._max()), l[wrap]])
        if len(s) == 0:
            return ArcSet.empty(P)
        order = s.argsort()
        s, l = s[order], l[order]
        # running maximum of the (lexicographic) last points via their ranks
        by_last = l.argsort()
        rank = np.empty(len(l), np.int64)
        rank[by_last] = np.arange(len(l))
        runmax = l[by_last[np.maximum.accumulate(rank)]]
        # a new piece starts where start - 1 > running max of previous lasts
        u = self._unit()
        prev = runmax[:-1]
        cur = s[1:]
        nonzero = (cur.hi != 0) | (cur.lo != 0)
        gap = np.zeros(len(cur), bool)
        gap[nonzero] = prev[nonzero].less(cur[nonzero] - u)
        first = np.concatenate([[True], gap])
        last_idx = np.concatenate([np.nonzero(gap)[0], [len(s) - 1]])
        return ArcSet(P, s[first], runmax[last_idx], True)

    def complement(self) -> "ArcSet":
        n = self.normalize()
        P = self.precision
        if len(n) == 0:
            return ArcSet.full(P)
        u = self._unit()
        gap_s = n.lasts + u  # wraps to 0 only if last is the maximum point
        gap_l = n.starts - u
        # gap before the first piece is [0, s_0 - 1]; gaps follow each piece
        gs = FixedArray.concat([FixedArray.full(0, P, 1), gap_s])
        gl = FixedArray.concat([gap_l, self._max()])
        keep = np.ones(len(gs), bool)
        keep[0] = bool((n.starts.hi[0] != 0) | (n.starts.lo[0] != 0))
        at_top = n.lasts[-1:].equal(self._max())[0]
        keep[-1] = not at_top
        return ArcSet(P, gs[keep], gl[keep], True)

    def union(self, other: "ArcSet") -> "ArcSet":
        self._check_compatible(other)
        return ArcSet(self.precision, FixedArray.concat([self.starts, other.starts]),
                      FixedArray.concat([self.lasts, other.lasts])).normalize()

    def intersect(self, other: "ArcSet") -> "ArcSet":
        return self.complement().union(other.complement()).complement()

    def difference(self, other: "ArcSet") -> "ArcSet":
        return self.intersect(other.complement())

    def issubset(self, other: "ArcSet") -> bool:
        return self.union(other).measure_units() == other.normalize().measure_units()

    def equals(self, other: "ArcSet") -> bool:
        a, b = self.normalize(), other.normalize()
        return len(a) == len(b) and bool(a.starts.equal(b.starts).all() and a.lasts.equal(b.lasts).all())

    def isdisjoint(self, other: "ArcSet") -> bool:
        return self.union(other).measure_units() == (
            self.normalize().measure_units() + other.normalize().measure_units())

    def _check_compatible(self, other: "ArcSet"):
        if other.precision != self.precision:
            raise PreconditionError("arc sets at different precisions")

    # -- membership ---------------------------------------------------
    def contains(self, x: FixedArray) -> np.ndarray:
        n = self.normalize()
        if len(n) == 0:
            return np.zeros(len(x), bool)
        idx = locate(n.starts, x)
        ok = idx >= 0
        out = np.zeros(len(x), bool)
        j = idx[ok]
        out[ok] = ~n.lasts[j].less(x[ok])
        return out

    def contains_point(self, v: int) -> bool:
        return bool(self.contains(FixedArray.from_ints([v], self.precision))[0])

    def sample(self, count: int, rng: np.random.Generator) -> FixedArray:
        """Uniform random points of the set (grid-exact)."""
        n = self.normalize()
        if len(n) == 0:
            raise PreconditionError("cannot sample from an empty set")
        lengths = n.lengths()
        pick = rng.choice(len(n), size=count, p=lengths / lengths.sum())
        frac = rng.random(count)
        # offset inside the piece: floor(frac * length) on the grid
        span = (n.lasts[pick] - n.starts[pick]).to_float()
        off = FixedArray.from_float(frac * span)
        pts = n.starts[pick] + off
        # guard against rounding past the last point
        over = n.lasts[pick].less(pts)
        return pts.where(~over, n.starts[pick])

    # -- io -----------------------------------------------------------
    def to_json(self) -> dict:
        P = self.precision
        return {"precision": P,
                "intervals": [[point_to_hex(a, P), format(b - a, "#x")] for a, b in self.normalize().intervals()]}

    @classmethod
    def from_json(cls, d: dict) -> "ArcSet":
        P = int(d["precision"])
        return cls.from_arcs([(int(a, 16), int(b, 16)) for a, b in d["intervals"]], P)

    def __repr__(self):
        return f"ArcSet(P={self.precision}, pieces={len(self)}, measure={float(self.measure()):.6g})"


# ---------------------------------------------------------------------------
# piecewise functions

CONST, AFFINE, CUSP_L, CUSP_R = 0, 1, 2, 3
KIND_NAMES = {CONST: "const", AFFINE: "affine", CUSP_L: "cusp"}


class PiecewiseFn:
    """Function on T given by tagged segments between sorted breakpoints.

    Segment ``i`` covers ``[b_i, b_{i+1})`` (the last one wraps to ``b_0``).
    Parameters per kind:

    * ``CONST``: ``a`` is the value.
    * ``AFFINE``: ``a`` and ``b`` are the values at the left and right ends.
    * ``CUSP_L`` / ``CUSP_R``: ``a * t**e`` with ``t`` the distance to the
      left / right end of the segment (the anchor).
    """

    __slots__ = ("precision", "breaks", "kind", "a", "b", "e", "_len", "_cache")

    def __init__(self, precision: int, breaks: FixedArray, kind, a, b=None, e=None, check: bool = True):
        self.precision = check_precision(precision)
        kind = np.asarray(kind, np.int8)
        n = len(kind)
        self.a = np.asarray(a, np.float64)
        self.b = np.zeros(n) if b is None else np.asarray(b, np.float64)
        self.e = np.ones(n) if e is None else np.asarray(e, np.float64)
        if len(breaks) != n or n == 0:
            raise PreconditionError("need one breakpoint per segment and at least one segment")
        order = breaks.argsort()
        if not np.array_equal(order, np.arange(n)):
            breaks = breaks[order]
            kind, self.a, self.b, self.e = kind[order], self.a[order], self.b[order], self.e[order]
        self.breaks = breaks
        self.kind = kind
        self._cache = {}
        if n == 1:
            self._len = np.ones(1)
        else:
            nxt = FixedArray.concat([breaks[1:], breaks[:1]])
            self._len = (nxt - breaks).to_float()
            self._len[-1] = self._len[-1] or 1.0
        if check:
            self._check()

    # -- construction helpers ------------------------------------------
    @classmethod
    def zero(cls, P: int) -> "PiecewiseFn":
        return cls(P, FixedArray.full(0, P, 1), [CONST], [0.0])

    @classmethod
    def from_segments(cls, P: int, segments: Sequence[tuple]) -> "PiecewiseFn":
        """Build from ``(start_int, kind, a, b, e)`` tuples."""
        bp = FixedArray.from_ints([s[0] for s in segments], P)
        return cls(P, bp, [s[1] for s in segments], [s[2] for s in segments],
                   [s[3] if len(s) > 3 else 0.0 for s in segments],
                   [s[4] if len(s) > 4 else 1.0 for s in segments])

    def _check(self):
        n = len(self.kind)
        if n > 1:
            d = FixedArray.concat([self.breaks[1:], self.breaks[:1]]) - self.breaks
            tol = 16 << (127 - self.precision)
            close = (d.hi == 0) & (d.lo < np.uint64(tol))
            if close.any():
                raise InvariantViolation("breakpoints closer than 2**(-P+4); construction bug")
        cusp = self.kind >= CUSP_L
        if np.any(self.e[cusp] <= 0):
            raise PreconditionError("cusp exponents must be positive")

    # -- values ---------------------------------------------------------
    def __len__(self):
        return len(self.kind)

    def left_values(self) -> np.ndarray:
        k, a, b, e, L = self.kind, self.a, self.b, self.e, self._len
        return np.select([k == CONST, k == AFFINE, k == CUSP_L], [a, a, 0.0], a * L**e)

    def right_values(self) -> np.ndarray:
        k, a, b, e, L = self.kind, self.a, self.b, self.e, self._len
        return np.select([k == CONST, k == AFFINE, k == CUSP_L], [a, b, a * L**e], 0.0)

    def eval_words(self, x: FixedArray) -> np.ndarray:
        idx = locate(self.breaks, x)
        idx[idx < 0] = len(self.kind) - 1
        t = (x - self.breaks[idx]).to_float()
        return self._eval_at(idx, t, x)

    def _eval_at(self, idx, t, x) -> np.ndarray:
        k = self.kind[idx]
        a, b, e, L = self.a[idx], self.b[idx], self.e[idx], self._len[idx]
        out = np.where(k == CONST, a, 0.0)
        m = k == AFFINE
        if m.any():
            out[m] = a[m] + (b[m] - a[m]) * (t[m] / L[m])
        m = k == CUSP_L
        if m.any():
            out[m] = a[m] * t[m] ** e[m]
        m = k == CUSP_R
        if m.any():
            nxt_idx = (idx[m] + 1) % len(self.kind)
            r = (self.breaks[nxt_idx] - x[m]).to_float()
            if len(self.kind) == 1:
                r = np.where(r == 0.0, 1.0, r)
            out[m] = a[m] * r ** e[m]
        return out

    def eval(self, x) -> float | np.ndarray:
        """Evaluate at an integer point, a float, or arrays of either kind."""
        if isinstance(x, FixedArray):
            return self.eval_words(x)
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return float(self.eval_words(FixedArray.from_ints([int(x)], self.precision))[0])
        arr = np.asarray(x, dtype=np.float64)
        vals = self.eval_words(FixedArray.from_float(arr.ravel()))
        return float(vals[0]) if arr.ndim == 0 else vals.reshape(arr.shape)

    __call__ = eval

    def continuity_defect(self) -> float:
        """Largest jump across a breakpoint."""
        r = self.right_values()
        l = np.roll(self.left_values(), -1)
        return float(np.max(np.abs(r - l)))

    def check_continuous(self, tol: float | None = None) -> None:
        tol = 2.0 ** (-self.precision + 8) if tol is None else tol
        d = self.continuity_defect()
        if d > tol:
            raise InvariantViolation(f"jump of size {d:g} across a breakpoint")

    # -- exact functionals ----------------------------------------------
    def _length_units(self) -> list[int]:
        P = self.precision
        if len(self.kind) == 1:
            return [1 << P]
        d = FixedArray.concat([self.breaks[1:], self.breaks[:1]]) - self.breaks
        return d.to_ints(P)

    def mean_parts(self) -> tuple[Fraction, float]:
        """``(exact part from const/affine pieces, fsum of cusp integrals)``."""
        if "mean" in self._cache:
            return self._cache["mean"]
        P = self.precision
        k = self.kind
        poly = (k == CONST) | (k == AFFINE)
        # value*length summed per distinct value, so the big sums stay integer
        lin = np.nonzero(poly)[0]
        exact = Fraction(0)
        if len(lin):
            va = np.where(k[lin] == CONST, self.a[lin], self.a[lin])
            vb = np.where(k[lin] == CONST, self.a[lin], self.b[lin])
            keys = np.stack([va, vb], axis=1)
            uniq, inv = np.unique(keys, axis=0, return_inverse=True)
            inv = np.asarray(inv).ravel()
            d = self._diff_words()
            for g, (x0, x1) in enumerate(uniq):
                if x0 == 0.0 and x1 == 0.0:
                    continue
                sel = lin[inv == g]
                units = self._sum_lengths(d, sel)
                exact += (Fraction(x0) + Fraction(x1)) / 2 * Fraction(units, 1 << P)
        cm = k >= CUSP_L
        cusp = 0.0
        if cm.any():
            e = self.e[cm]
            terms = self.a[cm] * self._len[cm] ** (e + 1) / (e + 1)
            cusp = math.fsum(terms.tolist())
        self._cache["mean"] = (exact, cusp)
        return exact, cusp

    def _diff_words(self) -> FixedArray | None:
        if len(self.kind) == 1:
            return None
        return FixedArray.concat([self.breaks[1:], self.breaks[:1]]) - self.breaks

    def _sum_lengths(self, d, sel) -> int:
        if d is None:
            return 1 << self.precision
        return d[sel].sum_units() >> (127 - self.precision)

    def mean(self) -> float:
        exact, cusp = self.mean_parts()
        return math.fsum([float(exact), cusp])

    def sup_norm(self) -> float:
        if "sup" not in self._cache:
            self._cache["sup"] = float(np.max(np.maximum(np.abs(self.left_values()), np.abs(self.right_values()))))
        return self._cache["sup"]

    def segment_holder_constants(self, xi: float) -> np.ndarray:
        """Per-segment Hölder constants of exponent ``xi`` on the segment itself."""
        k, a, b, e, L = self.kind, self.a, self.b, self.e, self._len
        cm = k >= CUSP_L
        if np.any(e[cm] < xi - 1e-15):
            raise UnsupportedExponent(f"cusp exponent {float(np.min(e[cm])):g} below xi={xi:g}")
        out = np.zeros(len(k))
        m = k == AFFINE
        out[m] = np.abs(b[m] - a[m]) * L[m] ** -xi
        # t**e is e-Hölder with constant 1 for e <= 1 and Lipschitz with e*L**(e-1) above
        out[cm] = np.abs(a[cm]) * np.maximum(e[cm], 1.0) * L[cm] ** (e[cm] - xi)
        return out

    def lip_seminorm(self, xi: float) -> float:
        """Upper bound for the Hölder seminorm of exponent ``xi``.

        Segments are grouped into blocks between zeros of ``f``.  Inside a
        block the per-segment constants are chained with the conjugate
        exponent ``p = 1/(1-xi)``, or their maximum is used when ``|f|`` is
        unimodal on the block.  Points in different blocks are bounded
        through ``|f(x)| + |f(y)|`` using the zeros between them.
        """
        if not 0 < xi <= 1:
            raise PreconditionError("xi must lie in (0, 1]")
        key = ("lip", float(xi))
        if key not in self._cache:
            self._cache[key] = _lip_bound(self, xi)
        return self._cache[key]

    # -- io -----------------------------------------------------------
    def to_json(self) -> dict:
        P = self.precision
        segs = []
        for kk, a, b, e in zip(self.kind.tolist(), self.a.tolist(), self.b.tolist(), self.e.tolist()):
            if kk == CONST:
                segs.append({"kind": "const", "c": a.hex()})
            elif kk == AFFINE:
                segs.append({"kind": "affine", "left": a.hex(), "right": b.hex()})
            else:
                segs.append({"kind": "cusp", "coef": a.hex(), "exponent": e.hex(),
                             "anchor": "left" if kk == CUSP_L else "right"})
        return {"precision": P, "breakpoints": [point_to_hex(v, P) for v in self.breaks.to_ints(P)],
                "segments": segs}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, d: dict) -> "PiecewiseFn":
        P = int(d["precision"])
        bp = FixedArray.from_ints([int(h, 16) for h in d["breakpoints"]], P)
        kind, a, b, e = [], [], [], []
        for s in d["segments"]:
            if s["kind"] == "const":
                kind.append(CONST); a.append(float.fromhex(s["c"])); b.append(0.0); e.append(1.0)
            elif s["kind"] == "affine":
                kind.append(AFFINE); a.append(float.fromhex(s["left"])); b.append(float.fromhex(s["right"])); e.append(1.0)
            elif s["kind"] == "cusp":
                kind.append(CUSP_L if s.get("anchor", "left") == "left" else CUSP_R)
                a.append(float.fromhex(s["coef"])); b.append(0.0); e.append(float.fromhex(s["exponent"]))
            else:
                raise PreconditionError(f"unknown segment kind {s['kind']!r}")
        return cls(P, bp, kind, a, b, e)

    def __repr__(self):
        return f"PiecewiseFn(P={self.precision}, segments={len(self)})"


def _lip_bound(f: PiecewiseFn, xi: float) -> float:
    C = f.segment_holder_constants(xi)
    L = f._len.copy()
    vl, vr = f.left_values(), f.right_values()
    k = f.kind
    # split affine pieces that cross zero so that every block has one sign
    cross = (k == AFFINE) & (vl * vr < 0)
    if cross.any():
        idx = np.nonzero(cross)[0]
        frac = np.abs(vl[idx]) / (np.abs(vl[idx]) + np.abs(vr[idx]))
        slope = np.abs(vr[idx] - vl[idx]) / L[idx]
        rep = np.ones(len(k), np.int64)
        rep[idx] = 2
        pos = np.cumsum(rep) - rep
        L2, C2, vl2, vr2 = (np.repeat(x, rep) for x in (L, C, vl, vr))
        first, second = pos[idx], pos[idx] + 1
        L2[first], L2[second] = L[idx] * frac, L[idx] * (1 - frac)
        C2[first], C2[second] = slope * L2[first] ** (1 - xi), slope * L2[second] ** (1 - xi)
        vr2[first] = 0.0
        vl2[second] = 0.0
        L, C, vl, vr = L2, C2, vl2, vr2
    mid = np.where(np.abs(vl) >= np.abs(vr), vl, vr)
    sign = np.sign(mid)
    zero_seg = (vl == 0) & (vr == 0)
    sign[zero_seg] = 0
    # block boundaries: before segment i if the value there is zero
    boundary = (vl == 0) | zero_seg | np.roll(zero_seg, 1)
    if not boundary.any():
        p = math.inf if xi == 1 else 1 / (1 - xi)
        return _pnorm(C, p)
    # rotate so that segment 0 opens a block
    start = int(np.argmax(boundary))
    roll = lambda x: np.roll(x, -start)
    L, C, vl, vr, sign, boundary = map(roll, (L, C, vl, vr, sign, boundary))
    block = np.cumsum(boundary) - 1
    nb = int(block[-1]) + 1
    bsign = np.zeros(nb)
    np.maximum.at(bsign, block, sign)
    neg = np.zeros(nb)
    np.minimum.at(neg, block, sign)
    bsign = np.where(bsign != 0, bsign, neg)
    blen = np.bincount(block, weights=L, minlength=nb)
    # direction of |f| on each segment: +1 growing, -1 shrinking, 0 flat
    growth = np.sign(np.abs(vr) - np.abs(vl))
    p = math.inf if xi == 1 else 1 / (1 - xi)
    bconst = _block_constants(C, growth, block, nb, p)
    nonzero = bsign != 0
    within = float(bconst.max()) if nb else 0.0
    # adjacent blocks (circularly) share a zero
    nxt = np.roll(np.arange(nb), -1)
    c1, c2 = bconst, bconst[nxt]
    opp = (bsign * bsign[nxt]) < 0
    adj = np.where(opp, _pair(c1, c2, p), np.maximum(c1, c2))
    adj = float(adj.max()) if nb > 1 else within
    # far pairs: separated by at least one whole block on both sides
    far = 0.0
    if nb >= 3 and nonzero.sum() >= 2:
        cz = np.sort(bconst[nonzero])[-2:]
        amax = float(blen[nonzero].max()) / 2
        gmin = float(blen.min())
        far = float(_pair(cz[0], cz[1], p)) * (2 * amax / (2 * amax + gmin)) ** xi
    return max(within, adj, far)


def _pair(c1, c2, p):
    if p == math.inf:
        return np.maximum(c1, c2)
    c1, c2 = np.asarray(c1, float), np.asarray(c2, float)
    same = c1 == c2
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        top = np.maximum(c1, c2)
        ratio = np.where(top > 0, np.minimum(c1, c2) / np.where(top > 0, top, 1), 0.0)
        val = top * (1 + ratio**p) ** (1 / p)
    return np.where(same, c1 * 2.0 ** (1 / p), val)


def _pnorm(c, p) -> float:
    c = np.asarray(c, float)
    if p == math.inf or len(c) == 0:
        return float(c.max()) if len(c) else 0.0
    top = c.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((c / top) ** p) ** (1 / p))


def _block_constants(C, growth, block, nb, p) -> np.ndarray:
    """Hölder constant of each block.

    A block whose ``|f|`` first grows and then shrinks gets the larger of its
    two monotone-run constants; any other shape falls back to chaining all
    its segments.
    """
    if p == math.inf:
        out = np.zeros(nb)
        np.maximum.at(out, block, C)
        return out
    idx = np.arange(len(C))
    first = np.r_[0, np.nonzero(np.diff(block))[0] + 1]
    last_shrink = np.maximum.accumulate(np.where(growth < 0, idx, -1))
    after_shrink = last_shrink >= first[block]
    bad_block = np.zeros(nb, bool)
    bad_block[block[(growth > 0) & after_shrink]] = True
    Cp = C**p
    whole = np.bincount(block, weights=Cp, minlength=nb)
    up = np.bincount(block, weights=np.where(after_shrink, 0.0, Cp), minlength=nb)
    down = np.maximum(whole - up, 0.0)
    # a monotone run with one non-flat segment keeps its constant unrounded
    active = (C > 0).astype(float)
    in_up = ~after_shrink
    n_up = np.bincount(block, weights=active * in_up, minlength=nb)
    n_down = np.bincount(block, weights=active * ~in_up, minlength=nb)
    top_up, top_down = np.zeros(nb), np.zeros(nb)
    np.maximum.at(top_up, block, np.where(in_up, C, 0.0))
    np.maximum.at(top_down, block, np.where(in_up, 0.0, C))
    up = np.where(n_up <= 1, top_up, up ** (1 / p))
    down = np.where(n_down <= 1, top_down, down ** (1 / p))
    return np.where(bad_block, whole ** (1 / p), np.maximum(up, down))


# ---------------------------------------------------------------------------
# growth gauges


@dataclass(frozen=True)
class GrowthGauge:
    """``psi(n) = n**nu`` or a monotone table ``psi(1), psi(2), ...``."""

    nu: float | None = None
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if (self.nu is None) == (self.table is None):
            raise PreconditionError("give exactly one of nu or table")
        if self.nu is not None and not 0 < self.nu < 1:
            raise PreconditionError("power-law gauge needs nu in (0, 1)")
        if self.table is not None:
            t = np.asarray(self.table, float)
            if len(t) < 2 or np.any(np.diff(t) < 0) or t[0] <= 0:
                raise PreconditionError("gauge table must be positive and non-decreasing")
            if t[-1] / len(t) >= t[0]:
                raise PreconditionError("gauge table is not sublinear at its endpoints")

    @classmethod
    def power(cls, nu: float) -> "GrowthGauge":
        return cls(nu=nu)

    @classmethod
    def parse(cls, text: str) -> "GrowthGauge":
        key, _, val = text.partition("=")
        if key.strip() != "nu":
            raise PreconditionError(f"unsupported gauge {text!r}; use nu=<value>")
        return cls(nu=float(val))

    @property
    def horizon(self) -> float:
        return math.inf if self.table is None else len(self.table)

    def __call__(self, n):
        n = np.asarray(n, dtype=np.float64)
        if self.nu is not None:
            return n**self.nu
        if np.any(n > len(self.table)) or np.any(n < 1):
            raise PreconditionError("gauge table exhausted")
        return np.asarray(self.table)[n.astype(np.int64) - 1]

    def label(self) -> str:
        return f"nu={self.nu}" if self.nu is not None else f"table[{len(self.table)}]"
