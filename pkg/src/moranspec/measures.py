"""Finitely supported probability measures on rational points of R^d.

Atoms are exact rationals and weights sum to exactly 1, so convolution,
truncation, and the level measures of a Moran system are all computed without
rounding. Fourier values

    mu_hat(xi) = sum_a w_a exp(-2 pi i xi . a)

are evaluated in double precision (error about #atoms * 4 ulp after exact
phase reduction mod 1); the cyclotomic test in `exact_fourier_zero` is the
authority whenever a value must be certified to vanish.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cyclotomic import vanishing_root_sum
from .rationals import Point, as_fraction, as_point

_MODULUS_SLACK = 1e-12


class DimensionMismatchError(ValueError):
    pass


class AtomCollisionError(ArithmeticError):
    """A level measure merged atoms that the construction promises distinct."""


class DiscreteMeasure:
    """Immutable finite measure: map from rational points to positive weights.

    Instances should be treated as frozen; all operations return new measures.
    """

    __slots__ = ("dimension", "atoms")

    def __init__(self, dimension: int, atoms: Mapping[Point, Fraction]):
        if dimension < 1:
            raise ValueError("dimension must be at least 1")
        cleaned: dict[Point, Fraction] = {}
        total = Fraction(0)
        for pt, w in atoms.items():
            w = as_fraction(w)
            if w < 0:
                raise ValueError(f"negative weight at {pt}")
            if w == 0:
                continue
            if len(pt) != dimension:
                raise DimensionMismatchError(
                    f"atom {pt} has dimension {len(pt)}, measure has {dimension}"
                )
            cleaned[pt] = cleaned.get(pt, Fraction(0)) + w
            total += w
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        self.dimension = dimension
        self.atoms = cleaned

    def __len__(self) -> int:
        return len(self.atoms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiscreteMeasure)
            and self.dimension == other.dimension
            and self.atoms == other.atoms
        )

    def __hash__(self):
        return hash((self.dimension, frozenset(self.atoms.items())))

    def total_mass(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0))

    def points(self) -> list[Point]:
        return sorted(self.atoms)

    def weight(self, point) -> Fraction:
        return self.atoms.get(as_point(point, self.dimension), Fraction(0))

    def __repr__(self) -> str:
        return f"DiscreteMeasure(d={self.dimension}, atoms={len(self.atoms)})"


def dirac(point, dimension: int | None = None) -> DiscreteMeasure:
    pt = as_point(point, dimension)
    return DiscreteMeasure(len(pt), {pt: Fraction(1)})


def uniform_measure(points: Iterable, dimension: int | None = None) -> DiscreteMeasure:
    """Equal weight 1/#A on each point of A; duplicates are an error."""
    pts = [as_point(p, dimension) for p in points]
    if not pts:
        raise ValueError("uniform measure needs a nonempty point set")
    d = len(pts[0])
    for p in pts:
        if len(p) != d:
            raise DimensionMismatchError("mixed dimensions in point set")
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points in uniform measure input")
    w = Fraction(1, len(pts))
    return DiscreteMeasure(d, {p: w for p in pts})


def convolve(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Exact convolution: atoms x+y with weight products, merged by sum."""
    if mu.dimension != nu.dimension:
        raise DimensionMismatchError("convolution of measures of different dimension")
    out: dict[Point, Fraction] = {}
    for x, wx in mu.atoms.items():
        for y, wy in nu.atoms.items():
            s = tuple(a + b for a, b in zip(x, y))
            w = wx * wy
            if s in out:
                out[s] += w
            else:
                out[s] = w
    return DiscreteMeasure(mu.dimension, out)


def convolve_all(measures: Sequence[DiscreteMeasure]) -> DiscreteMeasure:
    if not measures:
        raise ValueError("nothing to convolve")
    return reduce(convolve, measures)


def _phase_fraction(xi: Sequence[Fraction], atom: Point) -> Fraction:
    """xi . a reduced mod 1, exactly."""
    dot = sum((c * a for c, a in zip(xi, atom)), Fraction(0))
    return dot - math.floor(dot)


def fourier_transform(mu: DiscreteMeasure, xi) -> complex:
    """mu_hat(xi) = sum_a w_a exp(-2 pi i xi . a).

    Rational frequencies go through exact mod-1 phase reduction, so huge atoms
    (unbounded-support levels) lose no accuracy; float frequencies use plain
    double arithmetic and are meant for bounded measures and plotting grids.
    """
    if isinstance(xi, float) or (
        isinstance(xi, (tuple, list)) and any(isinstance(c, float) for c in xi)
    ):
        coords = (xi,) if isinstance(xi, float) else tuple(xi)
        if len(coords) != mu.dimension:
            raise DimensionMismatchError("frequency dimension mismatch")
        total = 0j
        for a, w in mu.atoms.items():
            ang = -2 * math.pi * sum(float(c) * float(x) for c, x in zip(coords, a))
            total += float(w) * complex(math.cos(ang), math.sin(ang))
        return total
    pt = as_point(xi, mu.dimension)
    total = 0j
    exact_mass = Fraction(0)
    for a, w in mu.atoms.items():
        frac = _phase_fraction(pt, a)
        if frac == 0:
            exact_mass += w
        else:
            ang = -2 * math.pi * float(frac)
            total += float(w) * complex(math.cos(ang), math.sin(ang))
    # atoms with zero phase contribute their exact mass; at xi = 0 this gives 1
    return total + complex(float(exact_mass), 0.0)


def fourier_transform_grid(mu: DiscreteMeasure, xi: np.ndarray) -> np.ndarray:
    """Vectorized transform over a float frequency grid (dimension 1)."""
    if mu.dimension != 1:
        raise DimensionMismatchError("grid evaluation is one-dimensional")
    xi = np.asarray(xi, dtype=float)
    pts = np.array([float(a[0]) for a in mu.atoms], dtype=float)
    if np.any(np.abs(pts) > 2**50):
        raise OverflowError("atoms too large for the float grid; evaluate factor masks instead")
    wts = np.array([float(w) for w in mu.atoms.values()], dtype=float)
    phases = np.exp(-2j * np.pi * np.outer(xi, pts))
    return phases @ wts


def exact_fourier_zero(mu: DiscreteMeasure, xi) -> bool:
    """Certify mu_hat(xi) == 0 exactly (dimension 1, rational data).

    Writing every phase as a power of a primitive q-th root of unity turns
    mu_hat(xi) into an integer-coefficient evaluation at that root once the
    weights are cleared to a common denominator; vanishing is then exactly
    divisibility of the counting polynomial by the q-th cyclotomic polynomial.
    """
    if mu.dimension != 1:
        raise DimensionMismatchError("exact zero test is one-dimensional")
    x = as_fraction(xi[0] if isinstance(xi, (tuple, list)) else xi)
    fracs = []
    weight_den = 1
    for a, w in mu.atoms.items():
        t = x * a[0]
        fracs.append((t - math.floor(t), w))
        weight_den = weight_den * w.denominator // math.gcd(weight_den, w.denominator)
    q = 1
    for f, _ in fracs:
        q = q * f.denominator // math.gcd(q, f.denominator)
    weights: dict[int, int] = {}
    for f, w in fracs:
        e = int(f * q)
        weights[e] = weights.get(e, 0) + int(w * weight_den)
    return vanishing_root_sum(weights, q)


def finite_level(system, n: int) -> DiscreteMeasure:
    """mu_n = delta_{B_1/N_1} * ... * delta_{B_n/(N_1...N_n)} exactly.

    The constructions served here never merge atoms, so the atom count must be
    b_1 * ... * b_n; a merge is reported as an AtomCollisionError.
    """
    if n < 1:
        raise ValueError("level must be at least 1")
    mu = convolve_all(level_factors(system, n))
    expected = 1
    for k in range(1, n + 1):
        expected *= system.level(k).b
    if len(mu) != expected:
        raise AtomCollisionError(
            f"level {n}: {len(mu)} atoms after merging, expected {expected}; "
            "digit sums are not distinct for this system"
        )
    return mu


def level_factors(system, n: int) -> list[DiscreteMeasure]:
    """The n convolution factors delta_{B_k/(N_1...N_k)} of a level measure."""
    return [uniform_measure([(a,) for a in system.scaled_atoms(k)]) for k in range(1, n + 1)]
