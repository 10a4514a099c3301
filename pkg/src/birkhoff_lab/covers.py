"""Interval classes making up the explicit covers of bad sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import ArcSet
from .fixed import FixedArray


@dataclass(frozen=True)
class CoverClass:
    """A family of equal-length arcs ``[start, start + length)``.

    ``proof_count`` is the count the construction promises for this class;
    the actual number of arcs must not exceed it.
    """

    name: str
    precision: int
    length: int  # units of 2**-P
    starts: FixedArray = field(repr=False)
    proof_count: int

    @property
    def count(self) -> int:
        return len(self.starts)

    @property
    def length_float(self) -> float:
        return self.length / float(1 << self.precision)

    def lengths(self) -> np.ndarray:
        return np.full(self.count, self.length_float)

    def arcset(self) -> ArcSet:
        if self.count == 0:
            return ArcSet.empty(self.precision)
        return ArcSet.from_words(self.starts, self.starts.add_int(self.length - 1, self.precision), self.precision)

    def summary(self) -> dict:
        return {"class": self.name, "count": self.count, "proof_count": self.proof_count,
                "length": self.length_float}


def union_of(classes, P: int) -> ArcSet:
    classes = [c for c in classes if c.count]
    if not classes:
        return ArcSet.empty(P)
    starts = FixedArray.concat([c.starts for c in classes])
    lasts = FixedArray.concat([c.starts.add_int(c.length - 1, P) for c in classes])
    return ArcSet.from_words(starts, lasts, P)
