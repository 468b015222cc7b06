"""Moran digit systems (N_k, b_k, B_k) and general digit-set sequences.

A system is defined either by an explicit finite list of levels (optionally
repeated periodically) or by a named generation rule that can produce any
level on demand and knows closed forms for its logarithms and series tails.
Scale products N_1...N_k are exact big integers, guarded by a configurable
decimal-digit budget so rule systems cannot silently materialize astronomical
levels.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .bounds import EventuallyZeroTail, GeometricTail, TailBound, squared
from .digitsets import (
    ConsecutiveDigits,
    DigitSet,
    ShiftedConsecutiveDigits,
    digit_set,
)

DEFAULT_DIGIT_BUDGET = 10_000  # decimal digits allowed in N_1...N_k


class LevelUnavailableError(IndexError):
    """Requested level is beyond the system's explicit data."""


class DigitBudgetError(OverflowError):
    """Scale product exceeds the big-integer materialization budget."""


@dataclass(frozen=True)
class MoranLevel:
    k: int
    N: int
    b: int
    digits: DigitSet
    spectrum_digits: Optional[tuple] = None

    def __post_init__(self):
        if not (self.N >= self.b >= 2):
            raise ValueError(f"level {self.k}: need N >= b >= 2, got N={self.N}, b={self.b}")
        if self.N % self.b != 0:
            raise ValueError(f"level {self.k}: {self.b} does not divide {self.N}")
        if self.digits.size != self.b:
            raise ValueError(f"level {self.k}: digit count {self.digits.size} != b={self.b}")
        for d in self.digits:
            if d < 0:
                raise ValueError(f"level {self.k}: negative digit {d}")
            break  # ShiftedConsecutive/Consecutive are nonnegative by construction

    @property
    def c(self) -> int:
        """How many digits lie outside the literal set {0, ..., b-1}."""
        return self.digits.outside_initial_segment(self.b)

    def residues_consecutive(self) -> bool:
        """Multiset of digits mod N equals {0, ..., b-1}, no duplicates."""
        return self.digits.residues(self.N) == list(range(self.b))


class MoranRule:
    """Produces levels and carries the closed-form knowledge of a family."""

    name: str = "abstract"
    params: dict = {}
    horizon: Optional[int] = None  # None: every k >= 1 available

    def size(self, k: int) -> int:
        raise NotImplementedError

    def scale(self, k: int) -> int:
        raise NotImplementedError

    def digits(self, k: int, scale_product: int) -> DigitSet:
        return ConsecutiveDigits(self.size(k))

    def spectrum_digits(self, k: int) -> Optional[tuple]:
        return None

    # -- analytic hooks ------------------------------------------------------
    def log_size(self, k: int) -> float:
        return math.log(self.size(k))

    def log_scale(self, k: int) -> float:
        return math.log(self.scale(k))

    def quotient_logs(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """(log b_k, log N_k) for k = 1..count, without materializing N_k."""
        lb = np.array([self.log_size(k) for k in range(1, count + 1)])
        ln = np.array([self.log_scale(k) for k in range(1, count + 1)])
        return lb, ln

    def block_ends(self, count: int):
        return None

    # -- series knowledge ----------------------------------------------------
    def max_abs_upper(self) -> Optional[TailBound]:
        """Dominates max{|a|: a in A_k} for the scaled digits A_k = B_k / (N_1..N_k)."""
        return None

    def max_abs_lower(self) -> Optional[TailBound]:
        return None

    def existence_term_upper(self) -> Optional[TailBound]:
        """Dominates (1/b_k) sum_{a in A_k} |a|/(1+|a|)."""
        return self.max_abs_upper()

    def three_series_bounds(self, r: Fraction):
        """(tail-mass, centroid-norm, second-moment) upper bounds at radius r."""
        up = self.max_abs_upper()
        if up is None:
            return None, None, None
        k0 = up.eventually_below(float(r))
        mass = EventuallyZeroTail(k0) if k0 is not None else None
        return mass, up, squared(up)

    def c_over_b_upper(self) -> Optional[TailBound]:
        return None

    def c_over_b_closed_form(self) -> Optional[float]:
        return None

    def c_over_b_below(self, threshold: float) -> Optional[int]:
        """Index beyond which 2 c_k / b_k stays below threshold, if provable."""
        bound = self.c_over_b_upper()
        if bound is None:
            return None
        return bound.eventually_below(threshold / 2)

    def support_ratio_bounds(self):
        """(upper, lower) bounds for max(B_k) / (N_1..N_k)."""
        return None, None

    def sum_inverse_sizes_converges(self) -> Optional[bool]:
        return None


class MoranSystem:
    """Cached view over a rule: exact levels, scale products, digit budget."""

    dimension = 1

    def __init__(self, rule: MoranRule, digit_budget: int = DEFAULT_DIGIT_BUDGET):
        self.rule = rule
        self.digit_budget = digit_budget
        self._levels: dict[int, MoranLevel] = {}
        self._scale_products: list[int] = [1]  # Q_0 = 1

    @property
    def name(self) -> str:
        return self.rule.name

    @property
    def horizon(self) -> Optional[int]:
        return self.rule.horizon

    def _check_available(self, k: int):
        if k < 1:
            raise LevelUnavailableError(f"levels start at 1, got {k}")
        if self.rule.horizon is not None and k > self.rule.horizon:
            raise LevelUnavailableError(
                f"level {k} beyond explicit horizon {self.rule.horizon}"
            )

    def scale_product(self, k: int) -> int:
        """N_1 * ... * N_k exactly (k = 0 gives 1)."""
        if k < 0:
            raise ValueError("negative level")
        while len(self._scale_products) <= k:
            j = len(self._scale_products)
            self._check_available(j)
            nxt = self._scale_products[-1] * self.rule.scale(j)
            if nxt.bit_length() > 3.33 * self.digit_budget:
                raise DigitBudgetError(
                    f"scale product at level {j} exceeds {self.digit_budget} digits"
                )
            self._scale_products.append(nxt)
        return self._scale_products[k]

    def level(self, k: int) -> MoranLevel:
        if k not in self._levels:
            self._check_available(k)
            q = self.scale_product(k)
            self._levels[k] = MoranLevel(
                k=k,
                N=self.rule.scale(k),
                b=self.rule.size(k),
                digits=self.rule.digits(k, q),
                spectrum_digits=self.rule.spectrum_digits(k),
            )
        return self._levels[k]

    def levels(self, n: int) -> list[MoranLevel]:
        return [self.level(k) for k in range(1, n + 1)]

    def scaled_atoms(self, k: int) -> list[Fraction]:
        """A_k = B_k / (N_1...N_k) as exact rationals."""
        q = self.scale_product(k)
        return [Fraction(d, q) for d in self.level(k).digits]

    def atom_sequence(self) -> "MoranAtomSequence":
        return MoranAtomSequence(self)

    def describe(self) -> dict:
        return {"rule": self.rule.name, "params": self.rule.params}

    def __repr__(self) -> str:
        return f"MoranSystem({self.rule.name}, params={self.rule.params})"


# ---------------------------------------------------------------------------
# concrete rules
# ---------------------------------------------------------------------------


@dataclass
class ExplicitRule(MoranRule):
    """Finite list of levels; optionally repeated forever (periodic)."""

    levels: Sequence[tuple]
    periodic: bool = False
    label: str = "explicit"

    def __post_init__(self):
        if not self.levels:
            raise ValueError("explicit rule needs at least one level")
        parsed = []
        for entry in self.levels:
            if len(entry) == 3:
                N, b, B = entry
                L = None
            else:
                N, b, B, L = entry
            parsed.append((int(N), int(b), digit_set(B), None if L is None else tuple(sorted(int(x) for x in L))))
        self._parsed = parsed
        self.name = self.label
        self.params = {
            "levels": [
                {"N": N, "b": b, "B": list(B), **({"L": list(L)} if L else {})}
                for N, b, B, L in parsed
            ],
            "periodic": self.periodic,
        }

    @property
    def horizon(self):
        return None if self.periodic else len(self._parsed)

    def _entry(self, k: int):
        if self.periodic:
            return self._parsed[(k - 1) % len(self._parsed)]
        if k > len(self._parsed):
            raise LevelUnavailableError(f"level {k} beyond explicit horizon {len(self._parsed)}")
        return self._parsed[k - 1]

    def size(self, k: int) -> int:
        return self._entry(k)[1]

    def scale(self, k: int) -> int:
        return self._entry(k)[0]

    def digits(self, k: int, scale_product: int) -> DigitSet:
        return self._entry(k)[2]

    def spectrum_digits(self, k: int):
        return self._entry(k)[3]

    def max_abs_upper(self) -> Optional[TailBound]:
        if not self.periodic:
            return None
        # per cycle the scale product grows by prod(N) and digits repeat
        top = max(max(B) for _, _, B, _ in self._parsed)
        prod = 1
        for N, _, _, _ in self._parsed:
            prod *= N
        ratio = (1.0 / prod) ** (1.0 / len(self._parsed))
        # max B_k / Q_k <= top * ratio^k / ratio^len * ... keep a safe constant
        c = top / ratio ** len(self._parsed)
        return GeometricTail(c=c, ratio=ratio)

    def support_ratio_bounds(self):
        return self.max_abs_upper(), None

    def sum_inverse_sizes_converges(self) -> Optional[bool]:
        return False if self.periodic else None


@dataclass
class FormulaRule(MoranRule):
    """Rule from callables k -> b_k and k -> N_k with declared tail data."""

    size_fn: Callable[[int], int]
    scale_fn: Callable[[int], int]
    label: str
    parameters: dict = field(default_factory=dict)
    shift_multiplier: Optional[Callable[[int], int]] = None  # None: consecutive digits
    log_scale_fn: Optional[Callable[[int], float]] = None
    declared_bounds: dict = field(default_factory=dict)
    inverse_sizes_converge: Optional[bool] = None
    c_over_b_limit: Optional[float] = None

    def __post_init__(self):
        self.name = self.label
        self.params = dict(self.parameters)

    def size(self, k: int) -> int:
        return self.size_fn(k)

    def scale(self, k: int) -> int:
        return self.scale_fn(k)

    def digits(self, k: int, scale_product: int) -> DigitSet:
        b = self.size(k)
        if self.shift_multiplier is None:
            return ConsecutiveDigits(b)
        return ShiftedConsecutiveDigits(b, scale_product * self.shift_multiplier(k))

    def log_scale(self, k: int) -> float:
        if self.log_scale_fn is not None:
            return self.log_scale_fn(k)
        return math.log(self.scale(k))

    def max_abs_upper(self):
        return self.declared_bounds.get("max_abs_upper")

    def max_abs_lower(self):
        return self.declared_bounds.get("max_abs_lower")

    def existence_term_upper(self):
        if "existence_term_upper" in self.declared_bounds:
            return self.declared_bounds["existence_term_upper"]
        return self.max_abs_upper()

    def three_series_bounds(self, r: Fraction):
        if "three_series" in self.declared_bounds:
            maker = self.declared_bounds["three_series"]
            made = maker(r)
            if made is not None:
                return made
        return super().three_series_bounds(r)

    def c_over_b_upper(self):
        return self.declared_bounds.get("c_over_b_upper")

    def c_over_b_closed_form(self):
        return self.c_over_b_limit

    def support_ratio_bounds(self):
        return (
            self.declared_bounds.get("support_ratio_upper"),
            self.declared_bounds.get("support_ratio_lower"),
        )

    def sum_inverse_sizes_converges(self):
        return self.inverse_sizes_converge


# ---------------------------------------------------------------------------
# digit-set sequences for the convergence criteria (general dimension)
# ---------------------------------------------------------------------------


class AtomSequence:
    """A sequence of finite rational point sets A_1, A_2, ... in R^d."""

    dimension: int = 1
    horizon: Optional[int] = None
    name: str = "atoms"

    def atoms(self, k: int) -> tuple:
        raise NotImplementedError

    def max_abs_upper(self) -> Optional[TailBound]:
        return None

    def max_abs_lower(self) -> Optional[TailBound]:
        return None

    def existence_term_upper(self) -> Optional[TailBound]:
        return self.max_abs_upper()

    def three_series_bounds(self, r: Fraction):
        up = self.max_abs_upper()
        if up is None:
            return None, None, None
        k0 = up.eventually_below(float(r))
        mass = EventuallyZeroTail(k0) if k0 is not None else None
        return mass, up, squared(up)


class ExplicitAtomSequence(AtomSequence):
    def __init__(self, sets, dimension=None, name="atoms", upper=None, lower=None):
        from .rationals import as_point

        self._sets = []
        for A in sets:
            pts = tuple(as_point(a, dimension) for a in A)
            if dimension is None and pts:
                dimension = len(pts[0])
            if len(set(pts)) != len(pts):
                raise ValueError("duplicate points in a digit set")
            if not pts:
                raise ValueError("empty digit set")
            self._sets.append(pts)
        self.dimension = dimension or 1
        self.horizon = len(self._sets)
        self.name = name
        self._upper = upper
        self._lower = lower

    def atoms(self, k: int) -> tuple:
        if not (1 <= k <= len(self._sets)):
            raise LevelUnavailableError(f"no digit set at index {k}")
        return self._sets[k - 1]

    def max_abs_upper(self):
        return self._upper

    def max_abs_lower(self):
        return self._lower


class RuleAtomSequence(AtomSequence):
    def __init__(self, fn, dimension=1, name="rule", upper=None, lower=None, horizon=None):
        from .rationals import as_point

        self._fn = fn
        self._as_point = as_point
        self.dimension = dimension
        self.name = name
        self.horizon = horizon
        self._upper = upper
        self._lower = lower

    def atoms(self, k: int) -> tuple:
        if self.horizon is not None and k > self.horizon:
            raise LevelUnavailableError(f"no digit set at index {k}")
        return tuple(self._as_point(a, self.dimension) for a in self._fn(k))

    def max_abs_upper(self):
        return self._upper

    def max_abs_lower(self):
        return self._lower


class MoranAtomSequence(AtomSequence):
    """A_k = B_k / (N_1...N_k) of a Moran system, with the rule's tail data."""

    def __init__(self, system: MoranSystem):
        self.system = system
        self.dimension = 1
        self.horizon = system.horizon
        self.name = system.name

    def atoms(self, k: int) -> tuple:
        return tuple((a,) for a in self.system.scaled_atoms(k))

    def max_abs_upper(self):
        return self.system.rule.max_abs_upper()

    def max_abs_lower(self):
        return self.system.rule.max_abs_lower()

    def existence_term_upper(self):
        return self.system.rule.existence_term_upper()

    def three_series_bounds(self, r: Fraction):
        return self.system.rule.three_series_bounds(r)


def as_atom_sequence(obj, dimension=None) -> AtomSequence:
    if isinstance(obj, AtomSequence):
        return obj
    if isinstance(obj, MoranSystem):
        return obj.atom_sequence()
    if isinstance(obj, (list, tuple)):
        return ExplicitAtomSequence(obj, dimension=dimension)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a digit-set sequence")


# ---------------------------------------------------------------------------
# JSON descriptions
# ---------------------------------------------------------------------------


class SystemDescriptionError(ValueError):
    """Malformed or invariant-violating system description."""


def system_to_document(system: MoranSystem) -> dict:
    doc = system.describe()
    doc["dimension"] = 1
    return doc


def system_from_document(doc) -> MoranSystem:
    """Build a system from a parsed JSON description (see README schema)."""
    from . import constructions  # deferred: constructions imports this module

    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise SystemDescriptionError("system description must be a JSON object")
    if doc.get("dimension", 1) != 1:
        raise SystemDescriptionError("only dimension-1 Moran systems are supported")
    rule = doc.get("rule")
    params = doc.get("params", {})
    if rule is None and "explicit" in doc:
        rule, params = "explicit", {"levels": doc["explicit"]}
    try:
        if rule == "explicit":
            levels = []
            for i, entry in enumerate(params.get("levels", []), start=1):
                if isinstance(entry, dict):
                    tup = (entry["N"], entry["b"], entry["B"], entry.get("L"))
                else:
                    entry = list(entry)
                    tup = (entry[0], entry[1], entry[2], entry[3] if len(entry) > 3 else None)
                levels.append(tup)
            system = MoranSystem(ExplicitRule(levels, periodic=bool(params.get("periodic", False))))
            system.levels(min(len(levels), 64))  # validate eagerly, with level index in errors
            return system
        if rule == "example16":
            return constructions.unbounded_square_system()
        if rule == "theorem17":
            return constructions.intermediate_dimension_system(
                params.get("alpha", 0),
                params.get("beta", 1),
                schedule=params.get("schedule", "factorial-squared"),
            )
        if rule == "consecutive":
            return constructions.consecutive_system(
                params.get("b", "k+1"), multiplier=int(params.get("multiplier", 2))
            )
        if rule in ("jorgensen-pedersen", "jp"):
            return constructions.jorgensen_pedersen_system()
    except (ValueError, KeyError, TypeError) as exc:
        raise SystemDescriptionError(str(exc)) from exc
    raise SystemDescriptionError(f"unknown rule {rule!r}")
