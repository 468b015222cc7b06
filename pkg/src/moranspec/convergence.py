"""Existence criteria for infinite convolutions, as auditable partial sums.

Every report carries the exact inspected terms, their partial sums, and a
verdict. The policy is deliberately conservative:

  * CONVERGES only against a machine-checkable dominating tail declared by the
    sequence's generation rule (geometric ratio < 1 or p-series with p > 1),
    validated term-by-term over the inspected horizon;
  * DIVERGES from a divergent comparison bound from below, or when the
    inspected terms visibly refuse to decay (witness index recorded);
  * otherwise UNKNOWN, because finite partial sums never decide convergence.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .bounds import TailBound, is_divergent_lower, squared
from .measures import DiscreteMeasure, uniform_measure
from .rationals import Interval, abs_interval, as_fraction, norm_sq
from .systems import as_atom_sequence

_BOUND_SLACK = 1e-9
_NO_DECAY_FLOOR = 1e-6


def truncate_measure(mu: DiscreteMeasure, r) -> DiscreteMeasure:
    """Keep atoms in the closed ball of radius r; fold the rest onto 0.

    Membership |a| <= r is decided exactly through |a|^2 <= r^2.
    """
    r = as_fraction(r)
    if r <= 0:
        raise ValueError("truncation radius must be positive")
    r2 = r * r
    origin = tuple(Fraction(0) for _ in range(mu.dimension))
    out: dict = {}
    for a, w in mu.atoms.items():
        target = a if norm_sq(a) <= r2 else origin
        out[target] = out.get(target, Fraction(0)) + w
    return DiscreteMeasure(mu.dimension, out)


@dataclass(frozen=True)
class TruncationStats:
    """Exact tail mass, centroid, and centered second moment of mu_{k,r}."""

    k: int
    tail_mass: Fraction
    centroid: tuple
    second_moment: Fraction

    def centroid_norm(self) -> Interval:
        return abs_interval(self.centroid)


def truncation_stats(sequence, r, k: int) -> TruncationStats:
    """Statistics of the radius-r truncation of delta_{A_k}."""
    seq = as_atom_sequence(sequence)
    r = as_fraction(r)
    atoms = seq.atoms(k)
    r2 = r * r
    d = len(atoms[0])
    n = len(atoms)
    w = Fraction(1, n)
    tail = Fraction(0)
    first_moment = [Fraction(0)] * d
    second_raw = Fraction(0)
    for a in atoms:
        if norm_sq(a) <= r2:
            for i in range(d):
                first_moment[i] += w * a[i]
            second_raw += w * norm_sq(a)
        else:
            tail += w  # the atom folds onto the origin, contributing nothing
    centroid = tuple(first_moment)
    second = second_raw - norm_sq(centroid)
    return TruncationStats(k=k, tail_mass=tail, centroid=centroid, second_moment=second)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

CONVERGES = "CONVERGES"
DIVERGES = "DIVERGES"
UNKNOWN = "UNKNOWN"


@dataclass
class SeriesReport:
    name: str
    terms: list
    partial_sums: list
    verdict: str
    tail_argument: str
    witness_index: Optional[int] = None
    dimension: int = 1

    def to_json_dict(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return float(x)
            if isinstance(x, Interval):
                return float(x)
            if isinstance(x, tuple):
                return [enc(c) for c in x]
            return x

        def enc_exact(x):
            if isinstance(x, Fraction):
                # huge exact values fall back to the float column
                if max(x.numerator.bit_length(), x.denominator.bit_length()) > 8000:
                    return None
                return str(x)
            if isinstance(x, Interval):
                return [enc_exact(x.lo), enc_exact(x.hi)]
            if isinstance(x, tuple):
                return [enc_exact(c) for c in x]
            return repr(x)

        return {
            "name": self.name,
            "terms": [enc(t) for t in self.terms],
            "partial_sums": [enc(s) for s in self.partial_sums],
            "terms_exact": [enc_exact(t) for t in self.terms],
            "verdict": self.verdict,
            "tail_argument": self.tail_argument,
            "witness_index": self.witness_index,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _term_float_bounds(term) -> tuple[float, float]:
    if isinstance(term, Interval):
        return float(term.lo), float(term.hi)
    if isinstance(term, tuple):  # vector term: use Euclidean norm bounds
        iv = abs_interval(term)
        return float(iv.lo), float(iv.hi)
    v = float(term)
    return v, v


def _window_refuses_decay(los: Sequence[float]) -> Optional[int]:
    """Witness index if the trailing window shows no approach to zero."""
    n = len(los)
    if n < 4:
        return None
    w = max(3, n // 4)
    window = los[-w:]
    lo = min(window)
    if lo >= _NO_DECAY_FLOOR and los[-1] >= 0.8 * max(window):
        return n - w + 1 + window.index(lo)
    return None


def decide_verdict(
    terms: Sequence,
    upper: Optional[TailBound],
    lower: Optional[TailBound],
    start_index: int = 1,
) -> tuple[str, str, Optional[int]]:
    """Apply the verdict policy to exact terms plus declared bounds."""
    n = len(terms)
    his, los = [], []
    for t in terms:
        lo, hi = _term_float_bounds(t)
        his.append(hi)
        los.append(lo)
    if upper is not None and upper.converges:
        for i, hi in enumerate(his, start=start_index):
            if i >= upper.start and hi > upper.value(i) * (1 + _BOUND_SLACK) + 1e-15:
                raise ValueError(
                    f"declared dominating bound fails at k={i}: term {hi} > {upper.value(i)}"
                )
        tail = upper.tail_sum(start_index + n - 1)
        return (
            CONVERGES,
            f"dominated by {upper.describe()}; remaining tail <= {tail:.6g}",
            None,
        )
    if lower is not None and is_divergent_lower(lower):
        for i, lo in enumerate(los, start=start_index):
            if i >= lower.start and lo < lower.value(i) * (1 - _BOUND_SLACK) - 1e-15:
                raise ValueError(
                    f"declared divergent lower bound fails at k={i}: term {lo} < {lower.value(i)}"
                )
        return (
            DIVERGES,
            f"bounded below by the divergent {lower.describe()}",
            None,
        )
    witness = _window_refuses_decay(los)
    if witness is not None:
        return (
            DIVERGES,
            "terms do not tend to 0 over the inspected horizon "
            f"(term at k={witness} is {los[witness - start_index]:.6g})",
            witness,
        )
    return UNKNOWN, f"no dominating tail bound available at horizon {n}", None


def _partial_sums(terms):
    out = []
    acc = None
    for t in terms:
        acc = t if acc is None else _add_terms(acc, t)
        out.append(acc)
    return out


def _add_terms(a, b):
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


def three_series_report(sequence, r=1, horizon: int = 20):
    """The three convergence series of the truncated factors, at radius r.

    Returns (tail-mass report, centroid report, second-moment report). The
    centroid series is vector valued; its report carries the exact vector
    terms and the verdict looks at componentwise decay.
    """
    seq = as_atom_sequence(sequence)
    r = as_fraction(r)
    stats = [truncation_stats(seq, r, k) for k in range(1, horizon + 1)]
    bounds = seq.three_series_bounds(r)
    mass_terms = [s.tail_mass for s in stats]
    centroid_terms = [s.centroid for s in stats]
    moment_terms = [s.second_moment for s in stats]

    v1, a1, w1 = decide_verdict(mass_terms, bounds[0], None)
    v2, a2, w2 = _vector_verdict(centroid_terms, bounds[1])
    v3, a3, w3 = decide_verdict(moment_terms, bounds[2], None)

    def mk(name, terms, v, arg, wit):
        return SeriesReport(
            name=name,
            terms=list(terms),
            partial_sums=_partial_sums(list(terms)),
            verdict=v,
            tail_argument=arg,
            witness_index=wit,
            dimension=seq.dimension,
        )

    return (
        mk(f"tail-mass series (r={r})", mass_terms, v1, a1, w1),
        mk(f"truncated-centroid series (r={r})", centroid_terms, v2, a2, w2),
        mk(f"truncated-second-moment series (r={r})", moment_terms, v3, a3, w3),
    )


def _vector_verdict(terms, upper: Optional[TailBound]):
    """Vector series: converge by norm bound, diverge by a non-decaying
    constant-sign component, otherwise UNKNOWN (oscillation is not decided)."""
    norms_hi = [float(abs_interval(t).hi) for t in terms]
    if upper is not None and upper.converges:
        for i, hi in enumerate(norms_hi, start=1):
            if i >= upper.start and hi > upper.value(i) * (1 + _BOUND_SLACK) + 1e-15:
                raise ValueError(f"centroid bound fails at k={i}")
        tail = upper.tail_sum(len(terms))
        return (
            CONVERGES,
            f"norms dominated by {upper.describe()}; remaining tail <= {tail:.6g}",
            None,
        )
    d = len(terms[0])
    for comp in range(d):
        vals = [float(t[comp]) for t in terms]
        signs = {math.copysign(1, v) for v in vals[-max(3, len(vals) // 4) :] if v != 0}
        if len(signs) == 1:
            witness = _window_refuses_decay([abs(v) for v in vals])
            if witness is not None:
                return (
                    DIVERGES,
                    f"component {comp} keeps a fixed sign and does not tend to 0 "
                    f"(k={witness})",
                    witness,
                )
    return UNKNOWN, "no dominating bound; components not visibly divergent", None


def nonnegative_existence_report(sequence, horizon: int = 20) -> SeriesReport:
    """Existence criterion for digits in the nonnegative orthant:
    sum_k (1/#A_k) sum_{a in A_k} |a| / (1 + |a|).

    Terms are exact in dimension 1 and outward-rounded intervals otherwise.
    CLI alias: thm11.
    """
    seq = as_atom_sequence(sequence)
    terms = []
    for k in range(1, horizon + 1):
        atoms = seq.atoms(k)
        acc = Interval.exact(0)
        for a in atoms:
            for c in a:
                if c < 0:
                    raise ValueError(
                        f"digit {a} at level {k} has a negative coordinate; "
                        "this criterion needs digits in the nonnegative orthant"
                    )
            iv = abs_interval(a)
            acc = acc + Interval(iv.lo / (1 + iv.lo), iv.hi / (1 + iv.hi))
        w = Fraction(1, len(atoms))
        # outward rounding keeps the lcm of level denominators from exploding
        terms.append(Interval(acc.lo * w, acc.hi * w).round_outward(40))
    # |a|/(1+|a|) <= min(|a|, 1), so any max-|a| bound also dominates the terms
    verdict, arg, wit = decide_verdict(terms, seq.existence_term_upper(), None)
    return SeriesReport(
        name="nonnegative-existence",
        terms=terms,
        partial_sums=_partial_sums(terms),
        verdict=verdict,
        tail_argument=arg,
        witness_index=wit,
        dimension=seq.dimension,
    )


def max_norm_report(sequence, horizon: int = 20) -> SeriesReport:
    """Compact-support criterion: sum_k max{|a| : a in A_k}. CLI alias: cor12."""
    seq = as_atom_sequence(sequence)
    terms = []
    for k in range(1, horizon + 1):
        atoms = seq.atoms(k)
        best = max(atoms, key=norm_sq)
        terms.append(abs_interval(best))
    verdict, arg, wit = decide_verdict(terms, seq.max_abs_upper(), seq.max_abs_lower())
    return SeriesReport(
        name="max-norm",
        terms=terms,
        partial_sums=_partial_sums(terms),
        verdict=verdict,
        tail_argument=arg,
        witness_index=wit,
        dimension=seq.dimension,
    )


def square_mean_report(sequence, horizon: int = 20):
    """Sufficient pair for general digits: (sum max|a|^2, vector sum of means).

    Returns two reports; the second is the vector series of digit averages.
    CLI alias: thm13.
    """
    seq = as_atom_sequence(sequence)
    sq_terms = []
    mean_terms = []
    for k in range(1, horizon + 1):
        atoms = seq.atoms(k)
        sq_terms.append(max(norm_sq(a) for a in atoms))
        d = len(atoms[0])
        w = Fraction(1, len(atoms))
        mean_terms.append(tuple(sum((a[i] for a in atoms), Fraction(0)) * w for i in range(d)))
    upper = seq.max_abs_upper()
    sq_upper = squared(upper) if upper is not None else None
    v1, a1, w1 = decide_verdict(sq_terms, sq_upper, None)
    v2, a2, w2 = _vector_verdict(mean_terms, upper)
    r1 = SeriesReport(
        name="max-square",
        terms=sq_terms,
        partial_sums=_partial_sums(sq_terms),
        verdict=v1,
        tail_argument=a1,
        witness_index=w1,
        dimension=seq.dimension,
    )
    r2 = SeriesReport(
        name="mean-vector",
        terms=mean_terms,
        partial_sums=_partial_sums(mean_terms),
        verdict=v2,
        tail_argument=a2,
        witness_index=w2,
        dimension=seq.dimension,
    )
    return r1, r2


def stats_from_measure_oracle(sequence, r, k: int) -> TruncationStats:
    """Same statistics derived the long way round, via an actual measure.

    Builds delta_{A_k}, truncates it, and integrates; used to cross-check
    `truncation_stats`, which works directly on the digit set.
    """
    seq = as_atom_sequence(sequence)
    r = as_fraction(r)
    mu = uniform_measure(seq.atoms(k))
    tail = Fraction(1) - truncate_to_ball_mass(mu, r)
    nu = truncate_measure(mu, r)
    d = mu.dimension
    centroid = tuple(
        sum((w * a[i] for a, w in nu.atoms.items()), Fraction(0)) for i in range(d)
    )
    second = sum(
        (w * norm_sq(tuple(a[i] - centroid[i] for i in range(d))) for a, w in nu.atoms.items()),
        Fraction(0),
    )
    return TruncationStats(k=k, tail_mass=tail, centroid=centroid, second_moment=second)


def truncate_to_ball_mass(mu: DiscreteMeasure, r) -> Fraction:
    r = as_fraction(r)
    r2 = r * r
    return sum((w for a, w in mu.atoms.items() if norm_sq(a) <= r2), Fraction(0))
