"""Support decomposition at factorial offsets and dimension trend estimates.

Systems whose level-k digit set is {0, ..., b_k - 2} with the top digit pushed
out by (N_1...N_k) * k! split their level measures into patches indexed by the
set S of levels that chose the far digit; each patch sits inside the unit
window starting at sum_{k in S} k!. Dimension estimates are the finite-horizon
quotient sequences

    packing:   log(b_1...b_k) / log(N_1...N_k)
    hausdorff: log(b_1...b_k) / (log(N_1...N_{k+1}) - log b_{k+1})

computed in log space from the rule's closed forms (no big-integer scale
products are materialized), with running tail inf/sup.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .digitsets import ShiftedConsecutiveDigits
from .systems import MoranSystem


@dataclass(frozen=True)
class SupportPatchIndex:
    """Levels that used the far-shifted digit; the patch offset is sum k!."""

    levels: frozenset

    @property
    def offset(self) -> int:
        return sum(math.factorial(k) for k in self.levels)

    def __repr__(self) -> str:
        return f"SupportPatchIndex({sorted(self.levels)})"


class NotShiftFormError(ValueError):
    """The system's digits are not the factorial-shift form."""


def _require_shift_form(system: MoranSystem, n: int) -> None:
    for k in range(1, n + 1):
        lev = system.level(k)
        d = lev.digits
        expected = system.scale_product(k) * math.factorial(k)
        if not isinstance(d, ShiftedConsecutiveDigits) or d.shift != expected:
            raise NotShiftFormError(
                f"level {k}: digits are not {{0..b-2, b-1 + (N_1..N_k) * k!}}"
            )


def support_partition(system: MoranSystem, n: int) -> dict:
    """Group the level-n atoms by which levels used the shifted digit.

    Returns {SupportPatchIndex: sorted list of atoms (Fractions)}. Groups are
    pairwise disjoint, exhaust the support, and each lies inside its factorial
    unit window [offset, offset + 1).
    """
    _require_shift_form(system, n)
    per_level = []
    for k in range(1, n + 1):
        lev = system.level(k)
        q = system.scale_product(k)
        small = [(Fraction(e, q), False) for e in range(lev.b - 1)]
        far = (Fraction(lev.b - 1, q) + math.factorial(k), True)
        per_level.append(small + [far])
    groups: dict[SupportPatchIndex, list] = {}
    for combo in product(*per_level):
        value = sum((v for v, _ in combo), Fraction(0))
        S = frozenset(k + 1 for k, (_, far) in enumerate(combo) if far)
        groups.setdefault(SupportPatchIndex(S), []).append(value)
    for idx, atoms in groups.items():
        atoms.sort()
        off = idx.offset
        if not (atoms[0] >= off and atoms[-1] < off + 1):
            raise AssertionError(
                f"patch {idx} leaves its unit window [{off}, {off + 1})"
            )
    return groups


def patch_measure_formula(system: MoranSystem, l0: int, n: int) -> Fraction:
    """Mass of a cylinder with the first l0 digits pinned and the remaining
    digits restricted to the b_k - 1 near digits:
    (1 / (b_1...b_l0)) * prod_{k=l0+1..n} (1 - 1/b_k), exactly."""
    if not (0 <= l0 <= n):
        raise ValueError(f"need 0 <= l0 <= n, got l0={l0}, n={n}")
    out = Fraction(1)
    for k in range(1, l0 + 1):
        out /= system.level(k).b
    for k in range(l0 + 1, n + 1):
        b = system.level(k).b
        out *= Fraction(b - 1, b)
    return out


def enumerate_patch_mass(
    system: MoranSystem, l0: int, n: int, prefix: Optional[Sequence[int]] = None
) -> Fraction:
    """Oracle for the patch mass: enumerate the level measure and sum the
    weights of atoms lying in the cylinder (prefix digits fixed, later digits
    restricted to the near set {0, ..., b_k - 2})."""
    from .measures import finite_level

    _require_shift_form(system, n)
    if prefix is None:
        prefix = [0] * l0
    if len(prefix) != l0:
        raise ValueError("prefix length must equal l0")
    base = Fraction(0)
    for k, digit_index in enumerate(prefix, start=1):
        lev = system.level(k)
        q = system.scale_product(k)
        if not (0 <= digit_index < lev.b):
            raise ValueError(f"prefix digit index {digit_index} out of range at level {k}")
        if digit_index == lev.b - 1:
            base += Fraction(lev.b - 1, q) + math.factorial(k)
        else:
            base += Fraction(digit_index, q)
    suffixes = [Fraction(0)]
    for k in range(l0 + 1, n + 1):
        lev = system.level(k)
        q = system.scale_product(k)
        suffixes = [s + Fraction(e, q) for s in suffixes for e in range(lev.b - 1)]
    cylinder = {base + s for s in suffixes}
    mu = finite_level(system, n)
    return sum((w for a, w in mu.atoms.items() if a[0] in cylinder), Fraction(0))


def group_mass_formula(system: MoranSystem, S: frozenset, n: int) -> Fraction:
    """Closed-form mass of a patch group: levels in S take their single far
    digit (weight 1/b_k), the rest spread over the b_k - 1 near digits."""
    out = Fraction(1)
    for k in range(1, n + 1):
        b = system.level(k).b
        out *= Fraction(1, b) if k in S else Fraction(b - 1, b)
    return out


# ---------------------------------------------------------------------------
# dimension quotients
# ---------------------------------------------------------------------------


@dataclass
class DimensionEstimate:
    variant: str  # "hausdorff" or "packing"
    quotients: np.ndarray
    tail_inf: np.ndarray
    tail_sup: np.ndarray
    liminf_estimate: float
    limsup_estimate: float
    block_end_values: Optional[list] = None

    def to_json_dict(self, max_points: int = 400) -> dict:
        idx = np.unique(np.linspace(0, len(self.quotients) - 1, max_points).astype(int))
        return {
            "variant": self.variant,
            "k": [int(i) + 1 for i in idx],
            "quotients": [float(self.quotients[i]) for i in idx],
            "liminf_estimate": self.liminf_estimate,
            "limsup_estimate": self.limsup_estimate,
            "block_end_values": self.block_end_values,
        }


class HypothesesViolation(ValueError):
    """sum 1/b_k is not known to converge, so the estimator refuses to run."""


def dimension_quotients(
    system: MoranSystem, horizon: int, enforce_hypotheses: bool = True
) -> tuple[DimensionEstimate, DimensionEstimate]:
    """(hausdorff, packing) quotient sequences for k = 1..horizon.

    Logs come from the rule (closed forms for rule systems); the hausdorff
    variant needs level horizon+1. With `enforce_hypotheses`, systems that do
    not declare sum 1/b_k < infinity are refused.
    """
    if enforce_hypotheses and system.rule.sum_inverse_sizes_converges() is not True:
        raise HypothesesViolation(
            "system does not declare sum 1/b_k < infinity; pass "
            "enforce_hypotheses=False to compute the bare quotients"
        )
    if system.horizon is not None and horizon + 1 > system.horizon:
        raise ValueError(
            f"need levels through {horizon + 1}, explicit data ends at {system.horizon}"
        )
    logb, logn = system.rule.quotient_logs(horizon + 1)
    if np.any(logb > logn + 1e-12):
        raise AssertionError("log b_k exceeded log N_k; invalid system")
    cb = np.cumsum(logb)
    cn = np.cumsum(logn)
    packing_q = cb[:horizon] / cn[:horizon]
    hausdorff_q = cb[:horizon] / (cn[1 : horizon + 1] - logb[1 : horizon + 1])

    def estimate(variant, q):
        tail_inf = np.minimum.accumulate(q[::-1])[::-1]
        tail_sup = np.maximum.accumulate(q[::-1])[::-1]
        window = max(1, horizon // 4)
        return DimensionEstimate(
            variant=variant,
            quotients=q,
            tail_inf=tail_inf,
            tail_sup=tail_sup,
            liminf_estimate=float(np.min(q[-window:])),
            limsup_estimate=float(np.max(q[-window:])),
            block_end_values=None,
        )

    hausdorff = estimate("hausdorff", hausdorff_q)
    packing = estimate("packing", packing_q)
    ends = system.rule.block_ends(horizon)
    if ends:
        hausdorff.block_end_values = [
            (j, k, float(hausdorff_q[k - 1])) for j, k in ends if k <= horizon
        ]
        packing.block_end_values = [
            (j, k, float(packing_q[k - 1])) for j, k in ends if k <= horizon
        ]
    return hausdorff, packing


@dataclass
class StolzCesaroBounds:
    tail_min: float
    tail_max: float
    quotient: float
    slack_low: float
    slack_high: float
    window: int

    @property
    def bracket_holds(self) -> bool:
        return (
            self.tail_min - self.slack_low - 1e-12
            <= self.quotient
            <= self.tail_max + self.slack_high + 1e-12
        )


def stolz_cesaro_bounds(
    alpha_terms: Sequence[float],
    beta_terms: Sequence[float],
    window: Optional[int] = None,
) -> StolzCesaroBounds:
    """Bracket the cumulative quotient (sum alpha)/(sum beta) by tail ratios.

    Over the trailing window, min and max of alpha_k/beta_k bound the window's
    contribution; the head adds a computable slack, giving
    tail_min - slack_low <= quotient <= tail_max + slack_high.
    """
    a = np.asarray(alpha_terms, dtype=float)
    b = np.asarray(beta_terms, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) == 0:
        raise ValueError("need equal-length nonempty term sequences")
    if np.any(b <= 0):
        raise ValueError("beta terms must be positive")
    n = len(a)
    w = window if window is not None else max(1, n // 2)
    w = min(max(w, 1), n)
    ratios = a[n - w :] / b[n - w :]
    tail_min, tail_max = float(np.min(ratios)), float(np.max(ratios))
    S_a, S_b = float(np.sum(a)), float(np.sum(b))
    head_a, head_b = float(np.sum(a[: n - w])), float(np.sum(b[: n - w]))
    q = S_a / S_b
    slack_high = max(0.0, (head_a - tail_max * head_b) / S_b)
    slack_low = max(0.0, (tail_min * head_b - head_a) / S_b)
    return StolzCesaroBounds(
        tail_min=tail_min,
        tail_max=tail_max,
        quotient=q,
        slack_low=slack_low,
        slack_high=slack_high,
        window=w,
    )
