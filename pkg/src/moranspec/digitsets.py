"""Integer digit sets and numeric evaluation of their masks.

The mask of a finite integer set B is m_B(xi) = (1/#B) sum_b exp(-2 pi i b xi).
Digit sets with one far-shifted element get a structured representation so the
shifted digit's phase can be reduced modulo the grid denominator instead of
being pushed through floating point (the shifts overflow doubles quickly).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


class DigitSet:
    size: int

    def __iter__(self) -> Iterator[int]:
        raise NotImplementedError

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self)

    def max_digit(self) -> int:
        raise NotImplementedError

    def residues(self, modulus: int) -> list[int]:
        return sorted(d % modulus for d in self)

    def outside_initial_segment(self, b: int) -> int:
        """Count of digits not in {0, ..., b-1} (the literal set, not residues)."""
        return sum(1 for d in self if d < 0 or d >= b)


@dataclass(frozen=True)
class ConsecutiveDigits(DigitSet):
    """The run {0, 1, ..., b-1}."""

    b: int

    def __post_init__(self):
        if self.b < 1:
            raise ValueError("need at least one digit")

    @property
    def size(self) -> int:
        return self.b

    def __iter__(self):
        return iter(range(self.b))

    def max_digit(self) -> int:
        return self.b - 1

    def residues(self, modulus: int) -> list[int]:
        return sorted(d % modulus for d in range(self.b))

    def outside_initial_segment(self, b: int) -> int:
        return max(0, self.b - b)


@dataclass(frozen=True)
class ShiftedConsecutiveDigits(DigitSet):
    """{0, ..., b-2} with the top digit moved out to b-1+shift (shift > 0)."""

    b: int
    shift: int

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("need at least two digits")
        if self.shift <= 0:
            raise ValueError("shift must be positive")

    @property
    def size(self) -> int:
        return self.b

    @property
    def top(self) -> int:
        return self.b - 1 + self.shift

    def __iter__(self):
        yield from range(self.b - 1)
        yield self.top

    def max_digit(self) -> int:
        return self.top

    def residues(self, modulus: int) -> list[int]:
        if modulus >= self.b - 1:
            base = list(range(self.b - 1))
        else:
            base = [d % modulus for d in range(self.b - 1)]
        base.append(self.top % modulus)
        return sorted(base)

    def outside_initial_segment(self, b: int) -> int:
        return max(0, (self.b - 1) - b) + (0 if self.top < b else 1)


@dataclass(frozen=True)
class ExplicitDigits(DigitSet):
    values: tuple

    def __post_init__(self):
        vals = tuple(sorted(int(v) for v in self.values))
        if len(set(vals)) != len(vals):
            raise ValueError("duplicate digits")
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def max_digit(self) -> int:
        return self.values[-1]


def digit_set(values) -> DigitSet:
    if isinstance(values, DigitSet):
        return values
    return ExplicitDigits(tuple(values))


# ---------------------------------------------------------------------------
# mask evaluation
# ---------------------------------------------------------------------------


def _dirichlet_sum(m: int, xi: np.ndarray) -> np.ndarray:
    """sum_{j=0}^{m-1} exp(-2 pi i j xi), robust at integer xi."""
    if m == 0:
        return np.zeros_like(xi, dtype=complex)
    s = np.sin(np.pi * xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.exp(-1j * np.pi * (m - 1) * xi) * (np.sin(np.pi * m * xi) / s)
    near_int = np.abs(s) < 1e-14
    if np.any(near_int):
        # at integers every term is 1
        vals = np.where(near_int, complex(m), vals)
    return vals


def mask_float(digits: DigitSet, xi) -> np.ndarray:
    """m_B evaluated with plain floating arithmetic (digits must be modest)."""
    xi = np.asarray(xi, dtype=float)
    if isinstance(digits, ConsecutiveDigits):
        return _dirichlet_sum(digits.b, xi) / digits.b
    vals = np.zeros(xi.shape, dtype=complex)
    for d in digits:
        if abs(d) > 2**50:
            raise OverflowError(
                "digit too large for the float path; use mask_on_rational_grid"
            )
        vals += np.exp(-2j * np.pi * d * xi)
    return vals / digits.size


def mask_on_rational_grid(
    digits: DigitSet, numerators: Sequence[int], denominator: int
) -> np.ndarray:
    """m_B at the rational points numerators/denominator, exact phases.

    Each digit's phase  d * p / q mod 1  is reduced with integer arithmetic, so
    digits far beyond float range (factorial-scale shifts) stay accurate.
    """
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    q = denominator
    p = [int(v) for v in numerators]
    p_abs_max = max((abs(v) for v in p), default=0)

    def digit_phases(d: int) -> np.ndarray:
        dm = d % q
        if dm == 0:
            return np.ones(len(p), dtype=complex)
        if dm * p_abs_max < 2**62 and q < 2**31:
            pp = np.asarray(p, dtype=np.int64)
            fr = (dm * pp) % q
            ang = (-2 * np.pi / q) * fr.astype(float)
            return np.cos(ang) + 1j * np.sin(ang)
        out = np.empty(len(p), dtype=complex)
        for i, pv in enumerate(p):
            fr = (dm * pv) % q
            ang = -2 * math.pi * fr / q
            out[i] = complex(math.cos(ang), math.sin(ang))
        return out

    def small_xi() -> np.ndarray:
        # q beyond float range means the phases underflow to exactly zero
        if q.bit_length() > 1000:
            return np.zeros(len(p), dtype=float)
        return np.asarray(p, dtype=float) / float(q)

    if isinstance(digits, ConsecutiveDigits):
        return _dirichlet_sum(digits.b, small_xi()) / digits.b
    if isinstance(digits, ShiftedConsecutiveDigits):
        total = _dirichlet_sum(digits.b - 1, small_xi())
        return (total + digit_phases(digits.top)) / digits.b
    total = np.zeros(len(p), dtype=complex)
    for d in digits:
        total = total + digit_phases(d)
    return total / digits.size


def mask_at_rational(digits: DigitSet, numerator: int, denominator: int) -> complex:
    return complex(mask_on_rational_grid(digits, [numerator], denominator)[0])


def symmetric_rational_grid(points: int, span_num: int = 2, span_den: int = 3):
    """Evenly spaced rationals covering [-span, span] with exact endpoints.

    Returns (numerators, denominator); defaults give the interval [-2/3, 2/3].
    """
    if points < 2:
        raise ValueError("need at least two grid points")
    den = span_den * (points - 1)
    nums = [-span_num * (points - 1) + 2 * span_num * j for j in range(points)]
    return nums, den
