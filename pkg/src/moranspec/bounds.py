"""Closed-form tail bounds backing series verdicts.

A verdict of CONVERGES is only ever issued against one of these dominating
bounds (geometric ratio < 1, or p-series with p > 1); DIVERGES may come from
a divergent lower bound of the same shapes. Finite inspection alone never
decides convergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


class TailBound:
    """Bound on the terms of a nonnegative series, valid for k >= start."""

    start: int = 1

    def value(self, k: int) -> float:
        raise NotImplementedError

    def tail_sum(self, after: int) -> float:
        """Upper bound on the sum of terms with k > after (may be inf)."""
        raise NotImplementedError

    @property
    def converges(self) -> bool:
        return math.isfinite(self.tail_sum(max(self.start, 1)))

    def eventually_below(self, x: float) -> Optional[int]:
        """Smallest inspectable k0 with value(k) <= x for all k >= k0, if provable."""
        return None

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class GeometricTail(TailBound):
    """term_k <= c * ratio**k for k >= start, with 0 <= ratio < 1."""

    c: float
    ratio: float
    start: int = 1

    def __post_init__(self):
        if not (0 <= self.ratio < 1) or self.c < 0:
            raise ValueError("geometric bound needs c >= 0 and 0 <= ratio < 1")

    def value(self, k: int) -> float:
        return self.c * self.ratio**k

    def tail_sum(self, after: int) -> float:
        after = max(after, self.start - 1)
        if self.ratio == 0:
            return 0.0
        return self.c * self.ratio ** (after + 1) / (1 - self.ratio)

    def eventually_below(self, x: float) -> Optional[int]:
        if x <= 0:
            return None
        k = self.start
        while self.value(k) > x:
            k += 1
            if k > self.start + 10_000:
                return None
        return k

    def describe(self) -> str:
        return f"geometric bound {self.c:g} * {self.ratio:g}^k (k >= {self.start})"


@dataclass(frozen=True)
class PSeriesTail(TailBound):
    """term_k <= c / (k + offset)**p for k >= start."""

    c: float
    p: float
    offset: int = 0
    start: int = 1

    def value(self, k: int) -> float:
        return self.c / (k + self.offset) ** self.p

    def tail_sum(self, after: int) -> float:
        after = max(after, self.start - 1)
        if self.p <= 1:
            return math.inf
        # integral comparison: sum_{k>K} (k+o)^-p <= (K+o)^(1-p)/(p-1)
        return self.c * (after + self.offset) ** (1 - self.p) / (self.p - 1)

    @property
    def diverges(self) -> bool:
        return self.p <= 1 and self.c > 0

    def eventually_below(self, x: float) -> Optional[int]:
        if x <= 0 or self.c == 0:
            return None if x <= 0 else self.start
        k = max(self.start, math.ceil((self.c / x) ** (1 / self.p) - self.offset))
        return max(k, self.start)

    def describe(self) -> str:
        base = f"k+{self.offset}" if self.offset else "k"
        return f"p-series bound {self.c:g} / ({base})^{self.p:g} (k >= {self.start})"


@dataclass(frozen=True)
class ConstantTail(TailBound):
    """term_k bounded by the constant c for every k >= start."""

    c: float
    start: int = 1

    def value(self, k: int) -> float:
        return self.c

    def tail_sum(self, after: int) -> float:
        return 0.0 if self.c == 0 else math.inf

    def eventually_below(self, x: float) -> Optional[int]:
        return self.start if self.c <= x else None

    def describe(self) -> str:
        return f"constant bound {self.c:g} (k >= {self.start})"


@dataclass(frozen=True)
class EventuallyZeroTail(TailBound):
    """term_k == 0 for all k >= beyond (nothing claimed earlier)."""

    beyond: int

    def value(self, k: int) -> float:
        return 0.0 if k >= self.beyond else math.inf

    def tail_sum(self, after: int) -> float:
        return 0.0 if after >= self.beyond - 1 else math.inf

    @property
    def converges(self) -> bool:
        # a finite head plus identically zero tail always converges
        return True

    def eventually_below(self, x: float) -> Optional[int]:
        return self.beyond if x >= 0 else None

    def describe(self) -> str:
        return f"terms vanish for k >= {self.beyond}"


@dataclass(frozen=True)
class CompositeTail(TailBound):
    """Sum of component bounds; dominates any term split the same way."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", max(p.start for p in self.parts))

    def value(self, k: int) -> float:
        return sum(p.value(k) for p in self.parts)

    def tail_sum(self, after: int) -> float:
        return sum(p.tail_sum(after) for p in self.parts)

    def eventually_below(self, x: float) -> Optional[int]:
        # crude but sound: each part below x / #parts
        share = x / len(self.parts)
        ks = [p.eventually_below(share) for p in self.parts]
        if any(k is None for k in ks):
            return None
        return max(ks)

    def describe(self) -> str:
        return " + ".join(p.describe() for p in self.parts)


def is_divergent_lower(bound: TailBound) -> bool:
    """True when the bound, read as a lower bound, forces divergence."""
    if isinstance(bound, ConstantTail):
        return bound.c > 0
    if isinstance(bound, PSeriesTail):
        return bound.p <= 1 and bound.c > 0
    if isinstance(bound, GeometricTail):
        return False
    if isinstance(bound, CompositeTail):
        return any(is_divergent_lower(p) for p in bound.parts)
    return False


def squared(bound: TailBound) -> Optional[TailBound]:
    """Bound dominating the squared terms, when the shape supports it."""
    if isinstance(bound, GeometricTail):
        return GeometricTail(bound.c**2, bound.ratio**2, bound.start)
    if isinstance(bound, PSeriesTail):
        return PSeriesTail(bound.c**2, 2 * bound.p, bound.offset, bound.start)
    if isinstance(bound, ConstantTail):
        return ConstantTail(bound.c**2, bound.start)
    if isinstance(bound, EventuallyZeroTail):
        return bound
    return None
