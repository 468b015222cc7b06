"""Candidate spectra at finite level and their exact certification.

Level-n frequency sets are assembled digit by digit,

    Lambda_n = L_1 + N_1 L_2 + N_1 N_2 L_3 + ... + N_1...N_{n-1} L_n,

where each (N_k, B_k, L_k) must be an exactly verified Hadamard triple. The
transform of the level measure factors over the levels, so a difference of two
frequencies is certified orthogonal by finding one factor whose mask vanishes
exactly; results are memoized per factor by the difference's residue.

The equi-positivity side replays the uniform lower-bound argument for the
rescaled tail transforms:  |m_B(xi)| >= 1 - (b pi xi)^2 / 6 - 2c/b  per level,
multiplied over the tail with the closed-form constant
epsilon = exp(-8 pi^2 / 27 - 6 S), S an upper bound on sum c_k / b_k.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .cyclotomic import vanishing_root_sum
from .digitsets import mask_on_rational_grid, symmetric_rational_grid
from .hadamard import is_hadamard_triple, level_triple
from .measures import DiscreteMeasure, exact_fourier_zero, uniform_measure
from .systems import MoranSystem

TWO_THIRDS_GRID_POINTS = 10_000


class SpectrumPreconditionError(ValueError):
    """A level lacks a verified Hadamard triple, so no spectrum is generated."""


class SpectrumCollisionError(ArithmeticError):
    def __init__(self, lam, first, second):
        super().__init__(
            f"frequency {lam} has two digit decompositions {first} and {second}"
        )
        self.witnesses = (lam, first, second)


@dataclass
class SpectrumLevel:
    n: int
    lambdas: tuple
    digit_decomposition: dict
    level_digits: list

    def __len__(self) -> int:
        return len(self.lambdas)


def spectrum_level(system: MoranSystem, n: int) -> SpectrumLevel:
    """Generate Lambda_n with full digit decompositions, collision-checked.

    Every level 1..n must carry spectrum digits forming an exact Hadamard
    triple with (N_k, B_k): explicit ones if the system declares them, else
    the canonical multiples of N_k/b_k under the residue condition.
    """
    level_digits = []
    for k in range(1, n + 1):
        triple = level_triple(system, k)
        if triple is None:
            raise SpectrumPreconditionError(
                f"level {k}: digits are not consecutive mod N and no explicit "
                "spectrum digits are declared"
            )
        if not is_hadamard_triple(triple):
            raise SpectrumPreconditionError(
                f"level {k}: ({triple.N}, B, L) is not a Hadamard triple"
            )
        level_digits.append(triple.L)
    lambdas = {0: ()}
    scale = 1
    for k in range(1, n + 1):
        nxt: dict[int, tuple] = {}
        for lam, decomp in lambdas.items():
            for ell in level_digits[k - 1]:
                new = lam + scale * ell
                if new in nxt:
                    raise SpectrumCollisionError(new, nxt[new], decomp + (ell,))
                nxt[new] = decomp + (ell,)
        lambdas = nxt
        scale *= system.level(k).N
    ordered = tuple(sorted(lambdas))
    return SpectrumLevel(
        n=n,
        lambdas=ordered,
        digit_decomposition={lam: lambdas[lam] for lam in ordered},
        level_digits=level_digits,
    )


@dataclass
class OrthogonalityResult:
    orthogonal: bool
    pairs_checked: int
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.orthogonal


def verify_orthogonality(
    mu_n: DiscreteMeasure,
    spectrum: SpectrumLevel,
    system: Optional[MoranSystem] = None,
) -> OrthogonalityResult:
    """Certify mu_n-hat(lam - lam') == 0 exactly for every unordered pair.

    With the generating system available, each difference is tested factor by
    factor: the transform is the product of the level masks, and a product of
    complex numbers vanishes exactly when some factor does. Factor results
    depend only on the difference mod N_1...N_k and are memoized, which is what
    makes hundreds of thousands of exact pair tests cheap. Without the system
    the definition is applied literally through `exact_fourier_zero`.
    """
    lambdas = spectrum.lambdas
    pairs = 0
    if system is None:
        for l1, l2 in combinations(lambdas, 2):
            pairs += 1
            if not exact_fourier_zero(mu_n, l2 - l1):
                return OrthogonalityResult(False, pairs, witness=(l1, l2))
        return OrthogonalityResult(True, pairs)

    n = spectrum.n
    scale_products = [system.scale_product(k) for k in range(1, n + 1)]
    digit_tuples = [system.level(k).digits.as_tuple() for k in range(1, n + 1)]
    memo: list[dict[int, bool]] = [dict() for _ in range(n)]

    def factor_vanishes(idx: int, diff: int) -> bool:
        q = scale_products[idx]
        r = diff % q
        if r == 0:
            return False  # the mask is exactly 1 at integers of the level scale
        hit = memo[idx].get(r)
        if hit is None:
            weights: dict[int, int] = {}
            for b in digit_tuples[idx]:
                e = (b * r) % q
                weights[e] = weights.get(e, 0) + 1
            hit = vanishing_root_sum(weights, q)
            memo[idx][r] = hit
        return hit

    for l1, l2 in combinations(lambdas, 2):
        pairs += 1
        diff = l2 - l1
        if not any(factor_vanishes(k, diff) for k in range(n)):
            return OrthogonalityResult(False, pairs, witness=(l1, l2))
    return OrthogonalityResult(True, pairs)


def gram_matrix(mu_n: DiscreteMeasure, spectrum: SpectrumLevel) -> np.ndarray:
    """Numeric Gram matrix mu_n-hat(lam - lam'), for the floating oracle."""
    lam = np.array(spectrum.lambdas, dtype=float)
    pts = np.array([float(a[0]) for a in mu_n.atoms], dtype=float)
    wts = np.array([float(w) for w in mu_n.atoms.values()], dtype=float)
    diffs = (lam[:, None] - lam[None, :]).reshape(-1)
    res = np.empty(diffs.shape, dtype=complex)
    chunk = max(1, 2_000_000 // max(len(pts), 1))
    for i in range(0, len(diffs), chunk):
        seg = diffs[i : i + chunk]
        res[i : i + chunk] = np.exp(-2j * np.pi * np.outer(seg, pts)) @ wts
    return res.reshape(len(lam), len(lam))


def verify_parseval(
    mu_n: DiscreteMeasure,
    spectrum: SpectrumLevel,
    frequencies: Sequence[float],
) -> float:
    """max_j |Q(xi_j) - 1| for Q(xi) = sum_lam |mu_n-hat(xi + lam)|^2.

    Orthogonality plus matching cardinality already force basis status in the
    finite-dimensional L^2(mu_n); this is the redundant numeric cross-check.
    """
    if len(spectrum.lambdas) != len(mu_n):
        raise ValueError(
            f"cardinality mismatch: {len(spectrum.lambdas)} frequencies vs "
            f"{len(mu_n)} atoms"
        )
    return _completeness_deviation(mu_n, spectrum.lambdas, frequencies)


def _completeness_deviation(mu_n, lambdas, frequencies) -> float:
    pts = np.array([float(a[0]) for a in mu_n.atoms], dtype=float)
    wts = np.array([float(w) for w in mu_n.atoms.values()], dtype=float)
    lam = np.array(lambdas, dtype=float)
    worst = 0.0
    for xi in frequencies:
        freqs = xi + lam
        vals = np.exp(-2j * np.pi * np.outer(freqs, pts)) @ wts
        q = float(np.sum(np.abs(vals) ** 2))
        worst = max(worst, abs(q - 1.0))
    return worst


def seeded_frequencies(count: int, seed: int) -> list[float]:
    """Deterministic sample frequencies in [0, 1) for Parseval checks."""
    rng = random.Random(seed)
    return [rng.random() for _ in range(count)]


def completeness_defect(mu_n, lambdas, xi: float) -> float:
    """|Q(xi) - 1| for an arbitrary frequency set (defect witness helper)."""
    return _completeness_deviation(mu_n, tuple(lambdas), [xi])


# ---------------------------------------------------------------------------
# masks and equi-positivity
# ---------------------------------------------------------------------------


def mask_lower_bound(b: int, c, xi: float) -> float:
    """Lower bound 1 - (b pi xi)^2 / 6 - 2c/b for the mask of a digit set with
    b elements, c of them outside {0, ..., b-1}, congruent to 0..b-1 mod N."""
    if b < 2:
        raise ValueError("need b >= 2")
    return 1.0 - (b * math.pi * xi) ** 2 / 6.0 - 2.0 * float(c) / b


@dataclass
class EquiPositivityCertificate:
    epsilon: float
    delta: float
    n0: int
    partial_sum_ckbk: float
    series_upper: float
    horizon: int
    kx_policy: dict = field(
        default_factory=lambda: {"[0,1/2]": 0, "[1/2,1)": -1}
    )
    grid_min: Optional[float] = None

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "n0": self.n0,
            "partial_sum_ckbk": self.partial_sum_ckbk,
            "series_upper_bound": self.series_upper,
            "horizon": self.horizon,
            "kx_policy": self.kx_policy,
            "grid_min": self.grid_min,
        }


# 2 c_k / b_k must eventually stay below 7/9 - 2 pi^2 / 27
EXCESS_RATIO_THRESHOLD = 7.0 / 9.0 - 2.0 * math.pi**2 / 27.0


def equi_positivity_certificate(
    system: MoranSystem, horizon: int = 200
) -> EquiPositivityCertificate:
    """Constants of the uniform lower bound for the rescaled tail transforms.

    epsilon = exp(-8 pi^2 / 27 - 6 S) with S = partial sum of c_k/b_k through
    the horizon plus the rule's tail bound, so epsilon is a valid lower bound
    rather than an estimate. n0 is the first index past every violation of
    2 c_k / b_k < 7/9 - 2 pi^2/27, with the rule guaranteeing the inequality
    beyond the horizon. delta is 1/6 and k_x is 0 on [0,1/2], -1 on [1/2,1).
    """
    cb_bound = system.rule.c_over_b_upper()
    if cb_bound is None or not cb_bound.converges:
        raise ValueError(
            "no convergent tail bound for sum c_k/b_k; the certificate "
            "cannot be issued (UNKNOWN)"
        )
    partial = Fraction(0)
    n0 = 0
    for k in range(1, horizon + 1):
        lev = system.level(k)
        if not lev.residues_consecutive():
            raise ValueError(f"level {k} is not nearly consecutive")
        ratio = Fraction(lev.c, lev.b)
        partial += ratio
        if 2 * float(ratio) >= EXCESS_RATIO_THRESHOLD:
            n0 = k
    beyond = system.rule.c_over_b_below(EXCESS_RATIO_THRESHOLD)
    if beyond is None:
        raise ValueError(
            "rule cannot guarantee 2 c_k/b_k below the threshold beyond the horizon"
        )
    if beyond > horizon + 1:
        raise ValueError(
            f"rule only guarantees the threshold from level {beyond}; raise the horizon"
        )
    series_upper = float(partial) + cb_bound.tail_sum(horizon)
    epsilon = math.exp(-8 * math.pi**2 / 27 - 6 * series_upper)
    return EquiPositivityCertificate(
        epsilon=epsilon,
        delta=1.0 / 6.0,
        n0=n0,
        partial_sum_ckbk=float(partial),
        series_upper=series_upper,
        horizon=horizon,
    )


@dataclass
class TailBoundCheck:
    n: int
    factors: int
    bound_product: float
    tail_factor: float
    bound_value: float
    grid_min_direct: float
    epsilon: float
    ok: bool
    grid_points: int

    def to_json_dict(self) -> dict:
        return self.__dict__.copy()


def scaled_tail_measure(system: MoranSystem, n: int, m: int) -> DiscreteMeasure:
    """The rescaled tail convolution truncated to m factors, exactly:
    delta_{B_{n+1}/N_{n+1}} * ... * delta_{B_{n+m}/(N_{n+1}...N_{n+m})}."""
    if m < 1:
        raise ValueError("need at least one factor")
    from .measures import convolve_all

    qn = system.scale_product(n)
    factors = []
    for k in range(n + 1, n + m + 1):
        scale = system.scale_product(k) // qn
        factors.append(uniform_measure([(Fraction(d, scale),) for d in system.level(k).digits]))
    return convolve_all(factors)


def tail_transform_on_grid(
    system: MoranSystem,
    n: int,
    factors: int,
    grid_numerators: Sequence[int],
    grid_denominator: int,
) -> np.ndarray:
    """|nu_{>n} truncated to the given factor count| on the rational grid.

    Evaluated as the product of the level masks at xi / (N_{n+1}...N_{n+k});
    the far-shifted digits go through exact modular phase reduction.
    """
    qn = system.scale_product(n)
    total = np.ones(len(grid_numerators), dtype=complex)
    for k in range(n + 1, n + factors + 1):
        rel_scale = system.scale_product(k) // qn
        vals = mask_on_rational_grid(
            system.level(k).digits, grid_numerators, grid_denominator * rel_scale
        )
        total = total * vals
    return np.abs(total)


def tail_transform_bound_check(
    system: MoranSystem,
    n: int,
    factors: int = 15,
    grid_points: int = TWO_THIRDS_GRID_POINTS,
    certificate: Optional[EquiPositivityCertificate] = None,
) -> TailBoundCheck:
    """Replay the product lower-bound chain and cross-check it on a grid.

    bound = prod_{k=1..K} [1 - (2 pi^2/27) 4^(1-k) - 2 c_{n+k}/b_{n+k}] times
    the exponential bound for the omitted factors; requires n >= n0. The
    directly evaluated truncated transform must dominate the bound at every
    grid point of [-2/3, 2/3], and the bound must stay above epsilon. A
    failure is reported in `ok`, not raised.
    """
    cert = certificate or equi_positivity_certificate(system)
    if n < cert.n0:
        raise ValueError(f"need n >= n0 = {cert.n0}, got {n}")
    prod = 1.0
    for k in range(1, factors + 1):
        lev = system.level(n + k)
        term = 1.0 - (2 * math.pi**2 / 27) * 4.0 ** (1 - k) - 2.0 * lev.c / lev.b
        prod *= term
    cb_bound = system.rule.c_over_b_upper()
    geo_tail = (2 * math.pi**2 / 9) * 4.0**-factors * (4.0 / 3.0)
    cb_tail = 6.0 * cb_bound.tail_sum(n + factors)
    tail_factor = math.exp(-geo_tail - cb_tail)
    bound_value = prod * tail_factor
    nums, den = symmetric_rational_grid(grid_points)
    direct = tail_transform_on_grid(system, n, factors, nums, den)
    grid_min = float(np.min(direct))
    ok = bound_value >= cert.epsilon - 1e-15 and bool(np.all(direct >= bound_value - 1e-12))
    return TailBoundCheck(
        n=n,
        factors=factors,
        bound_product=prod,
        tail_factor=tail_factor,
        bound_value=bound_value,
        grid_min_direct=grid_min,
        epsilon=cert.epsilon,
        ok=ok,
        grid_points=grid_points,
    )


def mask_bound_margins(
    system: MoranSystem, k: int, grid_points: int = TWO_THIRDS_GRID_POINTS
) -> np.ndarray:
    """|m_{B_k}(xi)| - mask_lower_bound over the [-2/3, 2/3] grid."""
    nums, den = symmetric_rational_grid(grid_points)
    lev = system.level(k)
    vals = np.abs(mask_on_rational_grid(lev.digits, nums, den))
    xs = np.array(nums, dtype=float) / den
    bounds = 1.0 - (lev.b * np.pi * xs) ** 2 / 6.0 - 2.0 * lev.c / lev.b
    return vals - bounds
