"""Concrete Moran system families.

Three families cover the corpus:

  * consecutive systems: B_k = {0, ..., b_k - 1} with N_k a fixed multiple of
    b_k (compactly supported, all excess counts zero);
  * the unbounded square family: b_k = (k+1)^2, N_k = 2 b_k, top digit pushed
    out by N_1...N_k (spectral with non-compact support);
  * intermediate-dimension systems: b_1 = 2, b_k = k^2, with the dilation
    chosen blockwise from a growth family g_gamma so the support's Hausdorff
    and packing dimensions trend to prescribed targets alpha <= beta, and the
    top digit pushed out by (N_1...N_k) * k!.

Logarithms are natural throughout; any fixed base would do, one is fixed for
reproducibility.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from .bounds import CompositeTail, ConstantTail, GeometricTail, PSeriesTail
from .convergence import SeriesReport, _partial_sums, decide_verdict
from .rationals import as_fraction, integer_nthroot
from .systems import ExplicitRule, FormulaRule, MoranSystem


# ---------------------------------------------------------------------------
# growth family and block schedules
# ---------------------------------------------------------------------------


def log_ratio_scale(gamma, n: int) -> int:
    """A multiple of n whose size forces log n / log(result) -> gamma.

    gamma = 0 gives n^(1 + floor(ln n)); gamma in (0,1) gives
    floor(n^(1/gamma - 1)) * n; gamma = 1 gives 2n. Exact integer arithmetic
    throughout (the fractional power goes through an integer root).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    g = as_fraction(gamma)
    if not (0 <= g <= 1):
        raise ValueError("gamma must lie in [0, 1]")
    if g == 0:
        return n ** (1 + math.floor(math.log(n)))
    if g == 1:
        return 2 * n
    expo = 1 / g - 1  # positive rational
    p, q = expo.numerator, expo.denominator
    return integer_nthroot(n**p, q) * n


def log_of_scale(gamma, n: int) -> float:
    """ln(log_ratio_scale(gamma, n)) without materializing the integer when
    the power is large; exact floor handling for moderate sizes."""
    g = as_fraction(gamma)
    if g == 0:
        return (1 + math.floor(math.log(n))) * math.log(n)
    if g == 1:
        return math.log(2) + math.log(n)
    expo = 1 / g - 1
    p, q = expo.numerator, expo.denominator
    if n.bit_length() * p <= 256:
        return math.log(integer_nthroot(n**p, q)) + math.log(n)
    # the floor perturbs ln by at most 1/value, far below float resolution here
    return (float(p) / q + 1.0) * math.log(n)


def factorial_squared_schedule(j: int) -> int:
    """Block boundaries l_1 = 0, l_j = (j!)^2; the decay quotient
    l_j ln l_j / (l_{j+1} - l_j) = 2 ln(j!) / ((j+1)^2 - 1) tends to 0."""
    if j < 1:
        raise ValueError("blocks are indexed from 1")
    return 0 if j == 1 else math.factorial(j) ** 2


def _log_big(n: int) -> float:
    """Natural log of a positive integer of any size."""
    if n.bit_length() <= 900:
        return math.log(n)
    shift = n.bit_length() - 53
    return math.log(n >> shift) + shift * math.log(2)


def schedule_decay_quotient(schedule: Callable[[int], int], j: int) -> float:
    lj, lnext = schedule(j), schedule(j + 1)
    if lj == 0:
        return 0.0
    return float(Fraction(lj, lnext - lj)) * _log_big(lj)


_SCHEDULES = {"factorial-squared": factorial_squared_schedule}


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def consecutive_system(b="k+1", multiplier: int = 2) -> MoranSystem:
    """B_k = {0..b_k-1}, N_k = multiplier * b_k. `b` is "k+1", "(k+1)^2",
    "constant:<int>", or an integer."""
    if isinstance(b, int) or (isinstance(b, str) and b.startswith("constant:")):
        value = b if isinstance(b, int) else int(b.split(":", 1)[1])
        if value < 2:
            raise ValueError("constant digit count must be at least 2")
        size_fn = lambda k: value
        b_label = f"constant:{value}"
        inv_converges = False
    elif b == "k+1":
        size_fn = lambda k: k + 1
        b_label = b
        inv_converges = False  # harmonic
    elif b == "(k+1)^2":
        size_fn = lambda k: (k + 1) ** 2
        b_label = b
        inv_converges = True
    else:
        raise ValueError(f"unknown digit-count form {b!r}")
    if multiplier < 1:
        raise ValueError("multiplier must be at least 1")
    log_mult = math.log(multiplier)
    rule = FormulaRule(
        size_fn=size_fn,
        scale_fn=lambda k: multiplier * size_fn(k),
        label="consecutive",
        parameters={"b": b_label, "multiplier": multiplier},
        shift_multiplier=None,
        log_scale_fn=lambda k: log_mult + math.log(size_fn(k)),
        declared_bounds={
            # max atom: (b_k - 1)/(N_1..N_k) < 1/(N_1..N_{k-1}) <= 2^(1-k)
            "max_abs_upper": GeometricTail(c=2.0, ratio=0.5),
            "c_over_b_upper": ConstantTail(0.0),
            "support_ratio_upper": GeometricTail(c=2.0, ratio=0.5),
        },
        inverse_sizes_converge=inv_converges,
        c_over_b_limit=0.0,
    )
    return MoranSystem(rule)


def _shift_family_bounds(cb_offset: int):
    """Series bounds shared by the shifted-digit families with c_k = 1 and
    b_k quadratic in k: c_k/b_k <= 1/(k + cb_offset)^2."""
    cb = PSeriesTail(c=1.0, p=2.0, offset=cb_offset)
    existence = CompositeTail(parts=(GeometricTail(c=2.0, ratio=0.5), cb))

    def three_series(r: Fraction):
        # valid at the standard radius: near digits stay inside the unit ball,
        # the far digit always lands outside it
        if r != 1:
            return None
        mass = cb
        centroid = GeometricTail(c=2.0, ratio=0.5)
        moment = GeometricTail(c=4.0, ratio=0.25)
        return mass, centroid, moment

    return {
        "existence_term_upper": existence,
        "c_over_b_upper": cb,
        "three_series": three_series,
        "support_ratio_lower": ConstantTail(1.0),
        "max_abs_lower": ConstantTail(1.0),
    }


def unbounded_square_system() -> MoranSystem:
    """b_k = (k+1)^2, N_k = 2 b_k, digits {0..b_k-2, b_k-1 + N_1...N_k}.

    Nearly consecutive with one excess digit per level; the digit-to-scale
    ratio series from the support criterion has every term above 1, so the
    support is unbounded.
    """
    rule = FormulaRule(
        size_fn=lambda k: (k + 1) ** 2,
        scale_fn=lambda k: 2 * (k + 1) ** 2,
        label="example16",
        parameters={},
        shift_multiplier=lambda k: 1,
        log_scale_fn=lambda k: math.log(2) + 2 * math.log(k + 1),
        declared_bounds=_shift_family_bounds(cb_offset=1),
        inverse_sizes_converge=True,
        c_over_b_limit=math.pi**2 / 6 - 1,  # sum 1/(k+1)^2
    )
    return MoranSystem(rule)


class _IntermediateDimensionRule(FormulaRule):
    """Blockwise growth rule realizing prescribed dimension targets."""

    def __init__(self, alpha, beta, schedule_name: str):
        self.alpha = as_fraction(alpha)
        self.beta = as_fraction(beta)
        if not (0 <= self.alpha <= self.beta <= 1):
            raise ValueError("need 0 <= alpha <= beta <= 1")
        self.schedule_name = schedule_name
        schedule = _SCHEDULES[schedule_name]
        self._schedule = schedule
        self._boundaries = [schedule(j) for j in range(1, 40)]
        super().__init__(
            size_fn=self._size,
            scale_fn=self._scale,
            label="theorem17",
            parameters={
                "alpha": str(self.alpha),
                "beta": str(self.beta),
                "schedule": schedule_name,
            },
            shift_multiplier=math.factorial,
            declared_bounds=_shift_family_bounds(cb_offset=0),
            inverse_sizes_converge=True,
            c_over_b_limit=math.pi**2 / 6 - 0.5,  # 1/2 + sum_{k>=2} 1/k^2
        )

    def _size(self, k: int) -> int:
        return 2 if k == 1 else k * k

    def _block_index(self, k: int) -> int:
        # j with l_j < k <= l_{j+1}
        j = 1
        while self._boundaries[j] < k:
            j += 1
            if j >= len(self._boundaries):
                self._boundaries.append(self._schedule(len(self._boundaries) + 1))
        return j

    def _gamma(self, k: int) -> Fraction:
        return self.alpha if self._block_index(k) % 2 == 1 else self.beta

    def _scale(self, k: int) -> int:
        return log_ratio_scale(self._gamma(k), self._size(k))

    def log_scale(self, k: int) -> float:
        return log_of_scale(self._gamma(k), self._size(k))

    def quotient_logs(self, count: int):
        ks = np.arange(1, count + 1)
        logb = 2.0 * np.log(ks)
        logb[0] = math.log(2.0)
        logn = np.empty(count, dtype=float)
        edges = []
        j = 1
        while self._schedule(j) < count:
            edges.append((j, self._schedule(j), self._schedule(j + 1)))
            j += 1
        for j, lo, hi in edges:
            gamma = self.alpha if j % 2 == 1 else self.beta
            lo_i, hi_i = lo, min(hi, count)
            seg = ks[lo_i:hi_i]
            if len(seg) == 0:
                continue
            logn[lo_i:hi_i] = self._log_scale_segment(gamma, seg)
        logn[0] = self.log_scale(1)
        return logb, logn

    def _log_scale_segment(self, gamma: Fraction, ks: np.ndarray) -> np.ndarray:
        n = ks.astype(float) ** 2
        logn = 2.0 * np.log(ks.astype(float))
        if gamma == 0:
            return (1.0 + np.floor(logn)) * logn
        if gamma == 1:
            return math.log(2) + logn
        expo = 1 / gamma - 1
        p, q = expo.numerator, expo.denominator
        out = (float(p) / q + 1.0) * logn
        # exact floors where the integer is materializable cheaply
        small = ks <= 512
        if np.any(small):
            vals = [
                math.log(integer_nthroot(int(m) ** p, q)) + math.log(int(m))
                for m in (int(v) for v in ks[small] ** 2)
            ]
            out[small] = vals
        return out

    def block_ends(self, count: int):
        out = []
        j = 2
        while True:
            end = self._schedule(j)
            if end > count:
                break
            out.append((j - 1, end))  # block j-1 spans (l_{j-1}, l_j]
            j += 1
        return out


def intermediate_dimension_system(
    alpha, beta, schedule: str = "factorial-squared"
) -> MoranSystem:
    """The factorial-shift system whose packing quotients trend to beta on
    even blocks and hausdorff quotients to alpha on odd blocks."""
    if schedule not in _SCHEDULES:
        raise ValueError(f"unknown schedule {schedule!r}")
    return MoranSystem(_IntermediateDimensionRule(alpha, beta, schedule))


def jorgensen_pedersen_system() -> MoranSystem:
    """Scale 4 with digits {0, 2} at every level and spectrum digits {0, 1}."""
    rule = ExplicitRule(
        levels=[(4, 2, (0, 2), (0, 1))],
        periodic=True,
        label="jorgensen-pedersen",
    )
    return MoranSystem(rule)


def section5_form_system(b_values, N_values) -> MoranSystem:
    """Explicit factorial-shift system from finite b/N lists (for small cases)."""
    if len(b_values) != len(N_values):
        raise ValueError("need matching b and N lists")

    bs = [int(b) for b in b_values]
    ns = [int(N) for N in N_values]

    rule = FormulaRule(
        size_fn=lambda k: bs[k - 1],
        scale_fn=lambda k: ns[k - 1],
        label="factorial-shift-explicit",
        parameters={"b": bs, "N": ns},
        shift_multiplier=math.factorial,
        declared_bounds={"support_ratio_lower": ConstantTail(1.0)},
    )
    rule.horizon = len(bs)
    return MoranSystem(rule)


def unbounded_support_report(system: MoranSystem, horizon: int = 12) -> SeriesReport:
    """Partial sums of max(B_k) / (N_1...N_k): divergence witnesses a
    non-compact support, convergence a compact one."""
    terms = []
    for k in range(1, horizon + 1):
        q = system.scale_product(k)
        terms.append(Fraction(system.level(k).digits.max_digit(), q))
    upper, lower = system.rule.support_ratio_bounds()
    verdict, arg, wit = decide_verdict(terms, upper, lower)
    return SeriesReport(
        name="support-ratio",
        terms=terms,
        partial_sums=_partial_sums(terms),
        verdict=verdict,
        tail_argument=arg,
        witness_index=wit,
    )
