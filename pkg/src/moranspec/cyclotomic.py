"""Exact vanishing test for integer combinations of roots of unity.

A sum  sum_e c_e * zeta_q^e  with integer coefficients vanishes exactly when
the q-th cyclotomic polynomial divides the counting polynomial sum c_e x^e,
because Phi_q is the minimal polynomial of zeta_q over the rationals.

Phi_q is assembled from its squarefree radical: Phi_q(x) = Phi_rad(x^(q/rad)),
and Phi_rad comes from dividing x^rad - 1 by Phi_e over the proper divisors e.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Dict, Tuple

# root orders above this are refused; practical truncation levels stay far below
MAX_ORDER = 10**6


class OrderTooLargeError(ValueError):
    """Common denominator of the frequency/atom products exceeds the cap."""


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    # exact division of dense integer polynomials, den monic-or-(+-1)-leading
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    lead = den[-1]
    quot = [0] * (dn - dd + 1)
    for i in range(dn, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q, r = divmod(c, lead)
        if r:
            raise ArithmeticError("non-exact polynomial division")
        quot[i - dd] = q
        for j, dc in enumerate(den):
            num[i - dd + j] -= q * dc
    if any(num):
        raise ArithmeticError("nonzero remainder in exact division")
    return quot


@lru_cache(maxsize=None)
def _cyclotomic_radical(r: int) -> Tuple[int, ...]:
    """Dense coefficients of Phi_r for squarefree r, by recursive division."""
    if r == 1:
        return (-1, 1)
    poly = [-1] + [0] * (r - 1) + [1]  # x^r - 1
    for e in _divisors(r):
        if e < r:
            poly = _poly_div_exact(poly, list(_cyclotomic_radical(e)))
    return tuple(poly)


@lru_cache(maxsize=None)
def cyclotomic_sparse(q: int) -> Tuple[Tuple[int, int], ...]:
    """Phi_q as sorted (exponent, coefficient) pairs, highest exponent last."""
    if q < 1:
        raise ValueError("order must be positive")
    if q > MAX_ORDER:
        raise OrderTooLargeError(f"root-of-unity order {q} exceeds cap {MAX_ORDER}")
    rad = 1
    for p in _prime_factors(q):
        rad *= p
    if q == 1:
        rad = 1
    stretch = q // rad
    base = _cyclotomic_radical(rad)
    return tuple((i * stretch, c) for i, c in enumerate(base) if c)


def euler_phi(q: int) -> int:
    out = q
    for p in _prime_factors(q):
        out -= out // p
    return out


def vanishing_root_sum(weights: Dict[int, int], q: int) -> bool:
    """Does  sum_e weights[e] * exp(-2 pi i e / q)  equal zero, exactly?

    Exponents are reduced mod q; a shared gcd with q is divided out first so
    the divisibility test runs at the true order of the roots involved.
    """
    if q < 1:
        raise ValueError("order must be positive")
    # fold exponents into [0, q)
    folded: Dict[int, int] = {}
    for e, c in weights.items():
        if c:
            e %= q
            folded[e] = folded.get(e, 0) + c
    folded = {e: c for e, c in folded.items() if c}
    if not folded:
        return True
    g = q
    for e in folded:
        g = math.gcd(g, e)
        if g == 1:
            break
    q //= g
    if q == 1:
        return sum(folded.values()) == 0
    if q > MAX_ORDER:
        raise OrderTooLargeError(f"reduced order {q} exceeds cap {MAX_ORDER}")
    coeffs = [0] * q
    for e, c in folded.items():
        coeffs[e // g] += c
    # remainder of the counting polynomial modulo monic Phi_q
    phi = cyclotomic_sparse(q)
    deg_phi = phi[-1][0]
    lower = phi[:-1]
    for i in range(q - 1, deg_phi - 1, -1):
        c = coeffs[i]
        if c:
            coeffs[i] = 0
            for e, pc in lower:
                coeffs[i - deg_phi + e] -= c * pc
    return not any(coeffs[:deg_phi])


def roots_of_unity_sum(weights: Dict[int, int], q: int) -> complex:
    """Floating evaluation of the same sum, for cross-checks."""
    total = 0j
    for e, c in weights.items():
        ang = -2 * math.pi * (e % q) / q
        total += c * complex(math.cos(ang), math.sin(ang))
    return total
