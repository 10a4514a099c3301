"""Hölder functions with large Birkhoff sums on most of the circle.

Every arc ``[a, b)`` of a tower family carries a tent of cusps: ``c*(x-a)**xi``
on its left half and ``c*(b-x)**xi`` on its right half, signed ``+`` for the
first half of the indices and ``-`` for the second.  Since ``Delta_{j+k}`` is
``Delta_j`` shifted by ``k*alpha``, a point of ``Delta_j`` sits at the same
offset in each of the next arcs.  The ergodic sum over ``m`` steps is
therefore ``m`` times a single value, and that value is bounded below once the
point keeps away from the arc ends.

Two regimes are distinguished by the type exponent ``tau`` of ``alpha``.
When ``tau`` is large (case one) the short family is so thin that it can be
covered whole.  Otherwise (case two) the short family carries cusps of its
own and its bad part is covered like the long one.

Opposite-signed tents touch, so the ``xi``-Hölder seminorm of unit tents is
``2**(1 - xi)``.  The coefficient ``c`` is the largest float below
``2**(xi - 1)`` whose tent pair has a computed seminorm of at most one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..cf import RotationNumber, fixed_convergents, type_exponents
from ..circle import CONST, CUSP_L, CUSP_R, ArcSet, PiecewiseFn, _pair
from ..covers import CoverClass
from ..errors import BudgetExceeded, CaseSearchExhausted, InsufficientDepth, PreconditionError
from ..fixed import FixedArray
from ..towers import build_partition

DEFAULT_MAX_ARCS = 2 * 10**6
# zero sliver closing each tent, so both halves have the same length
SLIVER = 16


def unit_coefficient(xi: float) -> float:
    """Largest float ``c`` whose touching tents have seminorm at most one."""
    if not 0 < xi <= 1:
        raise PreconditionError("xi must lie in (0, 1]")
    if xi == 1:
        return 1.0    # linear tents: the seminorm is the slope
    p = 1 / (1 - xi)
    c = 2.0 ** (xi - 1)
    while float(_pair(c, c, p)) > 1.0:
        c = math.nextafter(c, 0.0)
    return c


def admissible_nu_prime(xi: float, nu: float, s: float, tau: float, case: str) -> tuple[float, float]:
    """Open interval of ``nu'`` values the construction accepts."""
    hi = min(1 - xi, 1 - xi / s**2)
    if case == "two":
        hi = min(hi, 1 - xi * tau**2)
    return nu, hi


@dataclass
class LevelReport:
    """Cheap, purely arithmetic check of one level."""

    n: int
    q: tuple[int, int]
    tau_n: float
    m: tuple[int, int | None]
    sum_margin: float            # min over families of m*c*trim**xi / (A*m**nu)
    premeasure: float
    arcs: int
    case_ok: bool
    mesh_ok: bool
    lengths_ok: bool

    def feasible(self, budget: float) -> bool:
        return (self.case_ok and self.mesh_ok and self.lengths_ok
                and self.sum_margin >= 1 and self.premeasure < budget)

    def to_dict(self) -> dict:
        return {"n": self.n, "q": list(self.q), "tau_n": self.tau_n, "m": list(self.m),
                "sum_margin": self.sum_margin, "premeasure": self.premeasure, "arcs": self.arcs,
                "case_ok": self.case_ok, "mesh_ok": self.mesh_ok, "lengths_ok": self.lengths_ok}


@dataclass
class HolderSpec:
    alpha_label: str
    precision: int
    n: int
    case: str
    xi: float
    nu: float
    nu_prime: float
    A: float
    s: float
    delta: float
    budget: float
    tau: float                   # estimate of the liminf of tau_n
    coef: float
    m: tuple[int, int | None]
    q: tuple[int, int]
    d: tuple[int, int]           # units of 2**-P
    trim: tuple[int, int | None]  # units of 2**-P
    good: dict = field(repr=False)          # "E0" (and "E1") -> ArcSet
    cover: list[CoverClass] = field(repr=False)
    levels: list[LevelReport] = field(repr=False, default_factory=list)

    @property
    def good_set(self) -> ArcSet:
        sets = list(self.good.values())
        out = sets[0]
        for extra in sets[1:]:
            out = out.union(extra)
        return out

    def proof_premeasure(self, s: float | None = None) -> float:
        s = self.s if s is None else s
        return math.fsum(c.proof_count * c.length_float**s for c in self.cover)

    def sum_lower_bound(self, family: int = 0) -> float:
        """``m * c * trim**xi``, the smallest ``|S_m f|`` on the good part of a family."""
        M = float(1 << self.precision)
        return self.m[family] * self.coef * ((self.trim[family] - SLIVER - 1) / M) ** self.xi

    def to_json(self) -> dict:
        return {"kind": "holder", "alpha": self.alpha_label, "precision": self.precision, "n": self.n,
                "case": self.case, "xi": self.xi, "nu": self.nu, "nu_prime": self.nu_prime, "A": self.A,
                "s": self.s, "delta": self.delta, "budget": self.budget, "tau": self.tau,
                "coef": float.hex(self.coef), "m": list(self.m), "q": list(self.q),
                "d": [hex(v) for v in self.d], "trim": [None if t is None else hex(t) for t in self.trim],
                "good": {k: v.to_json() for k, v in self.good.items()},
                "cover": [c.summary() for c in self.cover],
                "proof_premeasure": self.proof_premeasure()}


def _trim_units(d_units: int, gamma: float, M: int) -> int:
    t = (d_units / M) ** gamma
    return math.ceil(Fraction(t) * M) + SLIVER + 1


def level_report(alpha: RotationNumber, n: int, xi: float, nu: float, nu_prime: float, A: float,
                 s: float, delta: float, case: str, coef: float, table=None) -> LevelReport:
    """Evaluate every condition of the construction at level ``n`` without building it."""
    table = table if table is not None else _table(alpha)
    if n < 1 or n + 2 >= len(table):
        raise InsufficientDepth(f"level {n} is outside the convergent table")
    M = alpha.modulus
    q, q1, q2 = table[n][1], table[n + 1][1], table[n + 2][1]
    d = [abs(q * alpha.value - table[n][0] * M), abs(q1 * alpha.value - table[n + 1][0] * M)]
    tau_n = math.log(q2) / math.log(q) if q > 1 else math.inf
    delta0 = math.sqrt(xi / (1 - nu_prime))
    fams = [(q1, d[0], delta0)]
    case_ok = True
    if case == "two":
        case_ok = tau_n < math.sqrt((1 - nu_prime) / xi)
        fams.append((q, d[1], math.sqrt(tau_n) * delta0 if case_ok else math.nan))
    ms, margins, pre, lengths_ok = [], [], 0.0, True
    for count, dl, dlt in fams:
        if not case_ok and math.isnan(dlt):
            ms.append(None)
            continue
        m = math.floor(count ** dlt)
        trim = _trim_units(dl, 1 / dlt, M)
        ms.append(m)
        qe = 2 * (count // 2)
        lengths_ok &= 1 <= m < qe // 2 and 2 * trim < dl - SLIVER
        margins.append(m * coef * ((trim - SLIVER - 1) / M) ** xi / (A * m**nu) if m >= 1 else 0.0)
        pre += (2 * m + 2) * (dl / M) ** s + 2 * count * (trim / M) ** s
    if case == "one":
        pre += q * (d[1] / M) ** s
        ms.append(None)
    mesh_ok = max(d) / M <= delta
    return LevelReport(n, (q, q1), tau_n, tuple(ms), min(margins) if margins else 0.0, pre,
                       q + q1, case_ok, mesh_ok, lengths_ok)


def _table(alpha: RotationNumber) -> list[tuple[int, int]]:
    return [(0, 1)] + [(c.p, c.q) for c in fixed_convergents(alpha)]


def build_holder(alpha: RotationNumber, xi: float, nu: float, A: float = 1.0, s: float | None = None,
                 delta: float = 0.5, budget: float = 0.05, nu_prime: float | None = None,
                 n: int | None = None, n_max: int | None = None, tau: float | None = None,
                 coef: float | None = None, max_arcs: int = DEFAULT_MAX_ARCS,
                 require: bool = True) -> tuple[PiecewiseFn, HolderSpec]:
    """Build the cusp function for ``(xi, nu)``.

    ``s`` defaults to ``sqrt(xi/(1-nu)) + 0.05``.  Without ``n`` the smallest
    level meeting every condition is used; ``CaseSearchExhausted`` carries
    the per-level report when none does.  A given ``n`` with
    ``require=False`` is built regardless, and its report says which
    conditions hold.
    """
    if not (0 < xi < 1 and 0 < nu < 1 and xi + nu < 1):
        raise PreconditionError("need 0 < xi, nu and xi + nu < 1")
    if A <= 0 or not 0 < delta <= 1 or budget <= 0:
        raise PreconditionError("A, delta and budget must be positive (delta <= 1)")
    s_min = math.sqrt(xi / (1 - nu))
    s = s_min + 0.05 if s is None else s
    if not s_min < s <= 1:
        raise PreconditionError(f"s must lie in ({s_min:.6g}, 1]")
    tau = type_exponents(alpha, 40).liminf if tau is None else tau
    case = "one" if tau >= math.sqrt((1 - nu) / xi) else "two"
    lo, hi = admissible_nu_prime(xi, nu, s, tau, case)
    if nu_prime is None:
        if not lo < hi:
            raise PreconditionError(f"no admissible nu' for case {case} (interval ({lo:.4g}, {hi:.4g}))")
        nu_prime = (lo + hi) / 2
    elif not lo < nu_prime < hi:
        raise PreconditionError(f"nu' must lie in ({lo:.6g}, {hi:.6g})")
    coef = unit_coefficient(xi) if coef is None else coef
    table = _table(alpha)
    last = len(table) - 3 if n_max is None else min(n_max, len(table) - 3)
    args = (xi, nu, nu_prime, A, s, delta, case, coef, table)
    if n is None:
        levels = [level_report(alpha, k, *args) for k in range(1, last + 1)]
        ok = [r for r in levels if r.feasible(budget)]
        if not ok:
            raise CaseSearchExhausted(_exhausted_message(levels, budget, max_arcs))
        rep = ok[0]
        if rep.arcs > max_arcs:
            raise BudgetExceeded(f"first feasible level {rep.n} needs {rep.arcs} arcs, budget is {max_arcs}")
    else:
        rep = level_report(alpha, n, *args)
        levels = [rep]
        if require and not rep.feasible(budget):
            raise CaseSearchExhausted(f"level {n} fails: {rep.to_dict()}")
        if not rep.case_ok:
            raise PreconditionError(f"level {n} violates the case-two exponent condition")
    part = build_partition(alpha, rep.n, max_arcs=max_arcs)
    f, good, cover, trims = _assemble(part, rep, xi, nu_prime, case, coef, A)
    spec = HolderSpec(alpha.label, alpha.precision, rep.n, case, xi, nu, nu_prime, A, s, delta, budget,
                      tau, coef, rep.m, (part.q_n, part.q_next), (part.d_n, part.d_next), trims,
                      good, cover, levels)
    return f, spec


def _exhausted_message(levels: list[LevelReport], budget: float, max_arcs: int) -> str:
    def first(pred):
        hit = [r for r in levels if pred(r)]
        return f"from level {hit[0].n} ({hit[0].arcs} arcs)" if hit else "at no level"
    best = min(levels, key=lambda r: r.premeasure)
    return (f"no level up to {levels[-1].n} meets every condition; "
            f"sum bound holds {first(lambda r: r.sum_margin >= 1)}, "
            f"cover bound below {budget} holds {first(lambda r: r.premeasure < budget)} "
            f"(smallest pre-measure {best.premeasure:.4g} at level {best.n}); arc budget {max_arcs}")


def _tents(starts: FixedArray, d: int, signs: np.ndarray, coef: float, xi: float, P: int):
    half = (d - SLIVER - (d - SLIVER) % 2) // 2
    signed = signs != 0
    a = starts[signed]
    k = int(signed.sum())
    u = int((~signed).sum())
    sv = signs[signed] * coef
    breaks = [a, a.add_int(half, P), a.add_int(2 * half, P), starts[~signed]]
    kind = [np.full(k, CUSP_L), np.full(k, CUSP_R), np.full(k, CONST), np.full(u, CONST)]
    va = [sv, sv, np.zeros(k), np.zeros(u)]
    ex = [np.full(k, xi), np.full(k, xi), np.zeros(k), np.zeros(u)]
    return breaks, kind, va, ex, half


def _assemble(part, rep: LevelReport, xi: float, nu_prime: float, case: str, coef: float, A: float):
    from .plateau import _good_indices, _signs

    P, M = part.precision, part.alpha.modulus
    delta0 = math.sqrt(xi / (1 - nu_prime))
    fams = [(part.n, part.q_next, delta0)]
    if case == "two":
        fams.append((part.n + 1, part.q_n, math.sqrt(rep.tau_n) * delta0))
    pieces, good, cover, trims = [], {}, [], []
    for i, (level, count, dlt) in enumerate(fams):
        starts, d = part.family(level)
        signs = _signs(count)
        br, kd, va, ex, half = _tents(starts, d, signs, coef, xi, P)
        pieces.append((br, kd, va, ex))
        m = rep.m[i]
        trim = _trim_units(d, 1 / dlt, M)
        trims.append(trim)
        idx = _good_indices(count, m)
        g = starts[idx]
        good[f"E{i}"] = ArcSet.from_words(g.add_int(trim, P), g.add_int(d - trim - 1, P), P)
        bad = np.setdiff1d(np.arange(count), idx)
        cover.append(CoverClass(f"excluded arcs of level {level}", P, d, starts[bad], 2 * m + 2))
        sg = starts[signs != 0]
        cover.append(CoverClass(f"arc ends of level {level}", P, trim,
                                FixedArray.concat([sg, sg.add_int(d - trim, P)]), 2 * count))
    if case == "one":
        starts, d = part.family(part.n + 1)
        trims.append(None)
        cover.append(CoverClass(f"arcs of level {part.n + 1}", P, d, starts, part.q_n))
        z = len(starts)
        pieces.append(([starts], [np.full(z, CONST)], [np.zeros(z)], [np.zeros(z)]))
    breaks = FixedArray.concat([b for p in pieces for b in p[0]])
    kind = np.concatenate([k for p in pieces for k in p[1]])
    va = np.concatenate([v for p in pieces for v in p[2]])
    ex = np.concatenate([v for p in pieces for v in p[3]])
    f = PiecewiseFn(P, breaks, kind, va, np.zeros(len(va)), ex)
    return f, good, cover, tuple(trims)


def random_cusp_function(rng: np.random.Generator, xi: float, pairs: int = 4,
                         precision: int = 127) -> PiecewiseFn:
    """Random zero-mean Hölder function made of ``2*pairs`` tents.

    The circle is cut into equal arcs at a random offset.  Tents come in
    pairs of opposite sign sharing height and exponent (drawn from
    ``[xi, 1]``), which makes the mean exactly zero.
    """
    if not 0 < xi <= 1 or pairs < 1:
        raise PreconditionError("need 0 < xi <= 1 and at least one pair")
    P, M = precision, 1 << precision
    k = 2 * pairs
    width = M // k
    offset = int(rng.integers(0, 2**62)) % width
    heights = rng.uniform(0.1, 1.0, pairs)
    exps = rng.uniform(xi, 1.0, pairs)
    order = rng.permutation(k)
    segs = []
    half = (width - SLIVER - (width - SLIVER) % 2) // 2
    for slot, i in enumerate(order):
        h = heights[i // 2] * (1 if i % 2 == 0 else -1)
        e = float(exps[i // 2])
        a = (offset + slot * width) % M
        segs += [(a, CUSP_L, h, 0.0, e), ((a + half) % M, CUSP_R, h, 0.0, e),
                 ((a + 2 * half) % M, CONST, 0.0, 0.0, 0.0)]
    return PiecewiseFn.from_segments(P, segs)
