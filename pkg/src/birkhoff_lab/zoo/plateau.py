"""Continuous functions whose Birkhoff sums sit on a plateau ``+-m*eps``.

On a tower partition every arc of index ``j`` in the first half of its
family carries ``+eps`` and every arc in the second half ``-eps``, with short
linear ramps of width ``eta`` at both ends.  A point in the interior of an
arc whose next ``m - 1`` successors stay in the same half sees the same value
``m`` times in a row, so ``S_m f(x) = +-m*eps`` there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..cf import RotationNumber
from ..circle import AFFINE, CONST, ArcSet, GrowthGauge, PiecewiseFn
from ..covers import CoverClass
from ..errors import BudgetExceeded, InsufficientDepth, LevelTooSmall, PreconditionError
from ..fixed import FixedArray
from ..towers import DEFAULT_MAX_ARCS, TowerPartition, build_partition, level_convergents

MAX_LEVEL = 200


def minimal_m(eps: float, gauge: GrowthGauge, C: float, limit: int = 10**8) -> int:
    """Smallest ``m`` with ``m * eps > C * psi(m)``."""
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    m = 1
    while m <= min(limit, gauge.horizon):
        if m * eps > C * float(gauge(m)):
            return m
        m += 1
    raise PreconditionError("no m with m*eps > C*psi(m) within the gauge range")


@dataclass
class PlateauSpec:
    alpha_label: str
    precision: int
    n: int
    eps: float
    eta: int                      # ramp width, units of 2**-P
    m: int
    q: tuple[int, int]            # (q_n, q_{n+1})
    q_even: tuple[int, int]       # (q~_n, q~_{n+1})
    d: tuple[int, int]            # (d_n, d_{n+1}), units
    good_set: ArcSet = field(repr=False)
    cover: list[CoverClass] = field(repr=False)
    s: float = 0.5
    budget: float = 0.5

    @property
    def eta_float(self) -> float:
        return self.eta / float(1 << self.precision)

    def d_float(self) -> tuple[float, float]:
        M = float(1 << self.precision)
        return self.d[0] / M, self.d[1] / M

    def proof_premeasure(self, s: float) -> float:
        """``(2m+2) d_n**s + (2m+2) d_{n+1}**s + 2(q~_{n+1} + q~_n) eta**s``."""
        dn, dn1 = self.d_float()
        return (2 * self.m + 2) * (dn**s + dn1**s) + 2 * sum(self.q_even) * self.eta_float**s

    def to_json(self) -> dict:
        return {"kind": "plateau", "alpha": self.alpha_label, "precision": self.precision, "n": self.n,
                "eps": self.eps, "eta": hex(self.eta), "m": self.m, "q": list(self.q),
                "q_even": list(self.q_even), "d": [hex(v) for v in self.d],
                "good_set_measure": float(self.good_set.measure()),
                "good_set": self.good_set.to_json(),
                "cover": [c.summary() for c in self.cover]}


def _family_segments(starts: FixedArray, d: int, eta: int, signs: np.ndarray, eps: float, P: int):
    signed = signs != 0
    a = starts[signed]
    sv = signs[signed] * eps
    k = int(signed.sum())
    breaks = [a, a.add_int(eta, P), a.add_int(d - eta, P), starts[~signed]]
    kind = [np.full(k, AFFINE), np.full(k, CONST), np.full(k, AFFINE), np.full(int((~signed).sum()), CONST)]
    va = [np.zeros(k), sv, sv, np.zeros(int((~signed).sum()))]
    vb = [sv, np.zeros(k), np.zeros(k), np.zeros(int((~signed).sum()))]
    return breaks, kind, va, vb


def _signs(q: int) -> np.ndarray:
    qe = 2 * (q // 2)
    s = np.zeros(q, np.int8)
    s[: qe // 2] = 1
    s[qe // 2: qe] = -1
    return s


def _good_indices(q: int, m: int) -> np.ndarray:
    qe = 2 * (q // 2)
    h = qe // 2
    return np.concatenate([np.arange(0, h - m), np.arange(h, qe - m)])


def _choose_eta(q_even: tuple[int, int], d_next: int, s: float, budget: float, M: int) -> int:
    # keep the ramp class below a quarter of the budget and eta < d_{n+1}/4
    cap = (budget / (8 * max(1, sum(q_even)))) ** (1 / s)
    eta = min(int(Fraction(cap) * M), d_next // 8)
    return max(eta, 0)


def _level_ok(alpha, n, m, s, budget, delta, eta=None):
    c_n, c_next = level_convergents(alpha, n)
    q, q1 = c_n.q, c_next.q
    qe, qe1 = 2 * (q // 2), 2 * (q1 // 2)
    if not 2 * m < min(qe, qe1) / 2:
        return None, "2m >= min(q~_n, q~_{n+1})/2"
    M = alpha.modulus
    d_n = abs(q * alpha.value - c_n.p * M)
    d_n1 = abs(q1 * alpha.value - c_next.p * M)
    if eta is None:
        eta = _choose_eta((qe, qe1), d_n1, s, budget, M)
    if eta < 16 or 4 * eta >= d_n1:
        return None, "ramp width incompatible with d_{n+1}"
    bound = (2 * m + 2) * ((d_n / M) ** s + (d_n1 / M) ** s) + 2 * (qe + qe1) * (eta / M) ** s
    if bound >= budget or max(d_n, d_n1) / M > delta:
        return None, f"cover bound {bound:.4g} not below {budget}"
    return eta, ""


def build_plateau(alpha: RotationNumber, eps: float, gauge: GrowthGauge, C: float = 1.0,
                  n: int | None = None, eta: float | None = None, s: float = 0.5,
                  budget: float = 0.5, delta: float = 0.5,
                  max_arcs: int = DEFAULT_MAX_ARCS) -> tuple[PiecewiseFn, PlateauSpec, int]:
    """Build the plateau function.

    With ``n=None`` the smallest level meeting both the length condition
    ``2m < min(q~_n, q~_{n+1})/2`` and the cover bound at exponent ``s`` is
    used.  ``eta`` (a float) defaults to the largest width that keeps the
    ramp class under a quarter of ``budget``.
    """
    P, M = alpha.precision, alpha.modulus
    m = minimal_m(eps, gauge, C)
    eta_units = None if eta is None else int(Fraction(eta) * M)
    if n is None:
        reason = ""
        for lvl in range(1, MAX_LEVEL):
            try:
                e_u, reason = _level_ok(alpha, lvl, m, s, budget, delta, eta_units)
            except InsufficientDepth:
                break
            if e_u is not None:
                n, eta_units = lvl, e_u
                break
        else:
            lvl = MAX_LEVEL
        if n is None:
            raise LevelTooSmall(f"no level up to {lvl} satisfies the plateau conditions ({reason})")
    else:
        e_u, reason = _level_ok(alpha, n, m, s, budget, delta, eta_units)
        if e_u is None:
            raise LevelTooSmall(f"level {n}: {reason}")
        eta_units = e_u
    part = build_partition(alpha, n, max_arcs=max_arcs)
    return _assemble(part, eps, eta_units, m, s, budget) + (m,)


def _assemble(part: TowerPartition, eps: float, eta: int, m: int, s: float, budget: float):
    P = part.precision
    pieces = []
    goods_s, goods_l, cover = [], [], []
    proof_q_even = part.q_even
    for level, q in ((part.n, part.q_next), (part.n + 1, part.q_n)):
        starts, d = part.family(level)
        signs = _signs(q)
        pieces.append(_family_segments(starts, d, eta, signs, eps, P))
        good = _good_indices(q, m)
        g = starts[good]
        goods_s.append(g.add_int(eta, P))
        goods_l.append(g.add_int(d - eta - 1, P))
        bad = np.setdiff1d(np.arange(q), good)
        cover.append(CoverClass(f"arcs of level {level}", P, d, starts[bad], 2 * m + 2))
    # ramps: both ends of every signed arc in the two families
    ramps = []
    for level, q in ((part.n, part.q_next), (part.n + 1, part.q_n)):
        starts, d = part.family(level)
        sg = starts[_signs(q) != 0]
        ramps += [sg, sg.add_int(d - eta, P)]
    cover.append(CoverClass("ramps", P, eta, FixedArray.concat(ramps), 2 * sum(proof_q_even)))
    breaks = FixedArray.concat([b for p in pieces for b in p[0]])
    kind = np.concatenate([k for p in pieces for k in p[1]])
    va = np.concatenate([v for p in pieces for v in p[2]])
    vb = np.concatenate([v for p in pieces for v in p[3]])
    f = PiecewiseFn(P, breaks, kind, va, vb)
    good_set = ArcSet.from_words(FixedArray.concat(goods_s), FixedArray.concat(goods_l), P)
    spec = PlateauSpec(part.alpha.label, P, part.n, eps, eta, m, (part.q_n, part.q_next), part.q_even,
                       (part.d_n, part.d_next), good_set, cover, s, budget)
    return f, spec
