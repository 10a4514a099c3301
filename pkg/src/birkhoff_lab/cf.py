"""Continued fractions of rotation numbers.

A :class:`RotationNumber` carries its source (a quotient sequence with an
optional periodic tail, or a decimal string) together with the value rounded
to ``P`` bits.  Everything downstream rotates by that rounded value, so orbit
combinatorics are exact for the nearby dyadic rational ``value / 2**P``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterator, Sequence

from .errors import InsufficientDepth, PrecisionExhausted, PreconditionError, RationalInput
from .fixed import check_precision

DEFAULT_PRECISION = 127
DEFAULT_WINDOW = 5


def fraction_quotients(x: Fraction) -> list[int]:
    """Quotients ``a_1, a_2, ...`` of a rational in ``[0, 1)``."""
    num, den = x.numerator % x.denominator, x.denominator
    out = []
    while num:
        a, r = divmod(den, num)
        out.append(a)
        den, num = num, r
    return out


def _convergent_pairs(quotients: Sequence[int]) -> list[tuple[int, int]]:
    p0, q0, p1, q1 = 1, 0, 0, 1  # (p_{-1}, q_{-1}), (p_0, q_0) for a_0 = 0
    out = []
    for a in quotients:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


@dataclass(frozen=True)
class RotationNumber:
    """An irrational rotation number and its ``P``-bit rounding.

    Build instances with :meth:`golden`, :meth:`sqrt2m1`,
    :meth:`from_quotients`, :meth:`from_decimal` or :meth:`parse`.
    :meth:`from_fraction` exists for rational test fixtures only.
    """

    label: str
    precision: int
    value: int
    exact: Fraction = field(repr=False)
    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    decimal: str | None = None
    rational: bool = False

    def __post_init__(self):
        if not 0 < self.value < (1 << self.precision):
            raise PreconditionError("rotation number must lie strictly inside (0, 1) at this precision")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_quotients(cls, prefix: Sequence[int], period: Sequence[int] = (),
                       precision: int = DEFAULT_PRECISION, label: str | None = None) -> "RotationNumber":
        check_precision(precision)
        prefix, period = tuple(int(a) for a in prefix), tuple(int(a) for a in period)
        if not period:
            raise RationalInput("a finite quotient sequence is rational; supply a periodic tail")
        if any(a < 1 for a in prefix + period):
            raise PreconditionError("partial quotients must be positive integers")
        # unroll until 1/q_K**2 is far below one unit at P bits
        target = 1 << (precision + 8)
        quotients: list[int] = []
        it = _source_iter(prefix, period)
        p0, q0, p, q = 1, 0, 0, 1
        while q < target:
            a = next(it)
            quotients.append(a)
            p0, q0, p, q = p, q, a * p + p0, a * q + q0
        exact = Fraction(p, q)
        value = round(exact * (1 << precision))
        if label is None:
            label = "quotients:" + ",".join(map(str, prefix)) + (
                ("," if prefix else "") + "periodic:" + ",".join(map(str, period)))
        return cls(label, precision, value, exact, prefix, period)

    @classmethod
    def golden(cls, precision: int = DEFAULT_PRECISION) -> "RotationNumber":
        return cls.from_quotients((), (1,), precision, "golden")

    @classmethod
    def sqrt2m1(cls, precision: int = DEFAULT_PRECISION) -> "RotationNumber":
        return cls.from_quotients((), (2,), precision, "sqrt2m1")

    @classmethod
    def from_decimal(cls, text: str, precision: int = DEFAULT_PRECISION) -> "RotationNumber":
        check_precision(precision)
        text = text.strip()
        if not re.fullmatch(r"0?\.\d+", text):
            raise PreconditionError(f"decimal source must look like 0.ddd..., got {text!r}")
        exact = Fraction(text)
        value = round(exact * (1 << precision))
        return cls(f"decimal:{text}", precision, value, exact, decimal=text)

    @classmethod
    def from_fraction(cls, x: Fraction | str, precision: int = DEFAULT_PRECISION) -> "RotationNumber":
        """Rational fixture (e.g. ``1/4``); orbits work, quotient queries refuse."""
        check_precision(precision)
        x = Fraction(x)
        return cls(f"fraction:{x}", precision, round(x * (1 << precision)), x, rational=True)

    @classmethod
    def parse(cls, spec: str, precision: int = DEFAULT_PRECISION) -> "RotationNumber":
        """Parse ``golden``, ``sqrt2m1``, ``quotients:1,1,2,periodic:3,4``,
        ``decimal:0.618...`` or the fixture form ``fraction:1/4``."""
        spec = spec.strip()
        if spec == "golden":
            return cls.golden(precision)
        if spec == "sqrt2m1":
            return cls.sqrt2m1(precision)
        kind, _, rest = spec.partition(":")
        if kind == "decimal":
            return cls.from_decimal(rest, precision)
        if kind == "fraction":
            return cls.from_fraction(rest, precision)
        if kind == "quotients":
            head, _, tail = rest.partition("periodic:")
            try:
                prefix = [int(t) for t in head.split(",") if t.strip()]
                period = [int(t) for t in tail.split(",") if t.strip()]
            except ValueError as exc:
                raise PreconditionError(f"bad quotient list in {spec!r}") from exc
            return cls.from_quotients(prefix, period, precision)
        raise PreconditionError(f"unknown rotation spec {spec!r}")

    # -- views --------------------------------------------------------
    @property
    def modulus(self) -> int:
        return 1 << self.precision

    @property
    def rounded(self) -> Fraction:
        return Fraction(self.value, self.modulus)

    def __float__(self) -> float:
        return self.value / float(self.modulus)

    def with_precision(self, precision: int) -> "RotationNumber":
        if self.decimal is not None:
            return RotationNumber.from_decimal(self.decimal, precision)
        if self.rational:
            return RotationNumber.from_fraction(self.exact, precision)
        return RotationNumber.from_quotients(self.prefix, self.period, precision, self.label)

    def quotients(self, K: int) -> list[int]:
        return partial_quotients(self, K)

    def fixed_quotients(self) -> list[int]:
        """Complete expansion of the rounded value ``value / 2**P``."""
        return fraction_quotients(self.rounded)


def _source_iter(prefix, period) -> Iterator[int]:
    yield from prefix
    while True:
        yield from period


def _certified_decimal_quotients(text: str, K: int) -> list[int]:
    # the string is read as correctly rounded: alpha lies within half a unit
    # of its last digit, so only quotients shared by both ends are certain
    digits = len(text.split(".")[1])
    mid = Fraction(text)
    half = Fraction(1, 2 * 10**digits)
    lo, hi = fraction_quotients(mid - half), fraction_quotients(mid + half)
    out = []
    for k, (a, b) in enumerate(zip(lo, hi)):
        # the last shared digit is only certain if neither expansion ends there
        if a != b or k + 1 >= min(len(lo), len(hi)):
            break
        out.append(a)
    if len(out) < K:
        raise PrecisionExhausted(
            f"decimal source certifies only {len(out)} partial quotients, {K} requested")
    return out[:K]


def partial_quotients(alpha: RotationNumber | str, K: int) -> list[int]:
    """Return ``a_1, ..., a_K`` of the source expansion."""
    if isinstance(alpha, str):
        alpha = RotationNumber.parse(alpha)
    if K < 1:
        raise PreconditionError("K must be at least 1")
    if alpha.rational:
        raise RationalInput("rational rotation numbers have no infinite expansion")
    if alpha.decimal is not None:
        return _certified_decimal_quotients(alpha.decimal, K)
    return list(islice(_source_iter(alpha.prefix, alpha.period), K))


@dataclass(frozen=True)
class Convergent:
    k: int
    p: int
    q: int
    signed_error: Fraction  # q*alpha - p, exact for the source value

    @property
    def error(self) -> float:
        return float(self.signed_error)

    def to_dict(self) -> dict:
        return {"k": self.k, "p": str(self.p), "q": str(self.q), "error": repr(self.error)}


def _build_convergents(quotients: Sequence[int], x: Fraction) -> list[Convergent]:
    return [Convergent(k, p, q, q * x - p)
            for k, (p, q) in enumerate(_convergent_pairs(quotients), start=1)]


def convergents(alpha: RotationNumber | str, K: int) -> list[Convergent]:
    """Convergents ``p_k/q_k`` for ``k = 1..K``."""
    if isinstance(alpha, str):
        alpha = RotationNumber.parse(alpha)
    return _build_convergents(partial_quotients(alpha, K), alpha.exact)


def fixed_convergents(alpha: RotationNumber, K: int | None = None) -> list[Convergent]:
    """Convergents of the rounded value itself, errors exact for that value.

    These are the ones orbit combinatorics at ``P`` bits obey.  They agree
    with :func:`convergents` as long as the rounding preserves the quotients.
    """
    qs = alpha.fixed_quotients()
    # the final quotient closes the finite expansion (error exactly 0)
    usable = qs[:-1]
    if K is not None:
        if K > len(usable):
            raise PrecisionExhausted(
                f"{alpha.precision}-bit rounding resolves {len(usable)} convergents, {K} requested")
        usable = usable[:K]
    return _build_convergents(usable, alpha.rounded)


def source_agreement_depth(alpha: RotationNumber, K: int = 400) -> int:
    """Number of leading quotients the rounded value shares with the source."""
    fixed = alpha.fixed_quotients()[:-1]
    try:
        src = partial_quotients(alpha, min(K, len(fixed)))
    except PrecisionExhausted as exc:
        n = int(re.search(r"only (\d+)", str(exc)).group(1))
        src = partial_quotients(alpha, n) if n else []
    depth = 0
    for a, b in zip(fixed, src):
        if a != b:
            break
        depth += 1
    return depth


@dataclass(frozen=True)
class TypeExponents:
    """``tau_n = ln q_{n+2} / ln q_n`` for every recorded ``n``."""

    n: tuple[int, ...]
    tau: tuple[float, ...]
    window: int

    @property
    def liminf(self) -> float:
        return min(self.tau[-self.window:])

    def at(self, n: int) -> float:
        return self.tau[self.n.index(n)]

    def to_list(self) -> list[dict]:
        return [{"n": n, "tau": t} for n, t in zip(self.n, self.tau)]


def type_exponents_from(conv: Sequence[Convergent], window: int = DEFAULT_WINDOW) -> TypeExponents:
    ns, taus = [], []
    for i in range(len(conv) - 2):
        q, q2 = conv[i].q, conv[i + 2].q
        if q >= 2:
            ns.append(conv[i].k)
            taus.append(math.log(q2) / math.log(q))
    return TypeExponents(tuple(ns), tuple(taus), window)


def type_exponents(alpha: RotationNumber | str, K: int, window: int = DEFAULT_WINDOW) -> TypeExponents:
    """Type exponents for ``n = 1..K`` (entries with ``q_n < 2`` are skipped)."""
    if K < 3:
        raise InsufficientDepth("type exponents need K >= 3")
    if window < 1:
        raise PreconditionError("window must be positive")
    return type_exponents_from(convergents(alpha, K + 2), window)
