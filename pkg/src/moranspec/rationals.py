"""Rational points, exact norms, and directed-rounding helpers."""
from __future__ import annotations

import math
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence, Union

Point = tuple  # tuple[Fraction, ...], fixed dimension per measure

RationalLike = Union[int, Fraction, str]

# scale for outward-rounded square roots; 30 decimal digits of slack
_SQRT_SCALE = 10**30


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions, strings, and decimal-literal floats exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # use the printed decimal so 0.3 means 3/10, not its binary neighbour
        return Fraction(str(x))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def as_point(x, dimension: int | None = None) -> Point:
    """Normalize a scalar or coordinate sequence into a rational point."""
    if isinstance(x, (int, Fraction, str, float)):
        pt = (as_fraction(x),)
    else:
        pt = tuple(as_fraction(c) for c in x)
    if not pt:
        raise ValueError("a point needs at least one coordinate")
    if dimension is not None and len(pt) != dimension:
        raise ValueError(f"point {pt} has dimension {len(pt)}, expected {dimension}")
    return pt


def norm_sq(p: Sequence[Fraction]) -> Fraction:
    """Exact squared Euclidean norm."""
    return sum((c * c for c in p), Fraction(0))


def add_points(p: Point, q: Point) -> Point:
    return tuple(a + b for a, b in zip(p, q))


def sqrt_bounds(x: Fraction) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(x) <= hi with hi - lo <= 1e-30 * denominator slack."""
    if x < 0:
        raise ValueError("sqrt of a negative rational")
    if x == 0:
        return Fraction(0), Fraction(0)
    num, den = x.numerator, x.denominator
    # sqrt(num/den) = sqrt(num*den)/den
    r = isqrt(num * den * _SQRT_SCALE * _SQRT_SCALE)
    scale = den * _SQRT_SCALE
    return Fraction(r, scale), Fraction(r + 1, scale)


class Interval:
    """Closed rational interval used for quantities involving square roots.

    Exact values are the degenerate case lo == hi; all arithmetic rounds
    outward so an Interval always encloses the true real number.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Fraction, hi: Fraction | None = None):
        hi = lo if hi is None else hi
        if lo > hi:
            raise ValueError("interval endpoints out of order")
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, x) -> "Interval":
        f = as_fraction(x)
        return cls(f, f)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __repr__(self) -> str:
        if self.is_exact:
            return f"Interval({self.lo})"
        return f"Interval({self.lo}, {self.hi})"

    def entirely_below(self, x) -> bool:
        return self.hi < as_fraction(x)

    def entirely_at_least(self, x) -> bool:
        return self.lo >= as_fraction(x)

    def round_outward(self, digits: int = 40) -> "Interval":
        """Widen to endpoints with denominator 10^digits (keeps sizes bounded)."""
        scale = 10**digits
        lo = Fraction(math.floor(self.lo * scale), scale)
        hi = Fraction(math.ceil(self.hi * scale), scale)
        return Interval(lo, hi)


def abs_interval(p: Sequence[Fraction]) -> Interval:
    """Euclidean norm of a rational point, exact in dimension one."""
    if len(p) == 1:
        v = abs(p[0])
        return Interval(v, v)
    lo, hi = sqrt_bounds(norm_sq(p))
    return Interval(lo, hi)


def interval_sum(items: Iterable[Interval]) -> Interval:
    total = Interval.exact(0)
    for it in items:
        total = total + it
    return total


def integer_nthroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer, exactly."""
    if n < 0 or k < 1:
        raise ValueError("integer_nthroot needs n >= 0 and k >= 1")
    if n in (0, 1) or k == 1:
        return n
    if k == 2:
        return isqrt(n)
    # monotone Newton iteration started above the root (2^ceil(bits/k) >= n^(1/k))
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x
