"""Support decomposition, patch measures, and dimension quotient utilities."""
import math
from fractions import Fraction

import numpy as np
import pytest

from moranspec import (
    consecutive_system,
    dimension_quotients,
    enumerate_patch_mass,
    finite_level,
    group_mass_formula,
    intermediate_dimension_system,
    patch_measure_formula,
    section5_form_system,
    stolz_cesaro_bounds,
    support_partition,
    unbounded_square_system,
)
from moranspec.dimensions import HypothesesViolation, NotShiftFormError

F = Fraction


# -- support_partition --------------------------------------------------------


def test_single_level_partition():
    s = section5_form_system([2], [4])
    parts = support_partition(s, 1)
    by_offset = {idx.offset: atoms for idx, atoms in parts.items()}
    assert by_offset[0] == [F(0)]
    assert by_offset[1] == [F(5, 4)]
    assert F(1) <= F(5, 4) < F(2)


def test_two_level_offsets():
    s = section5_form_system([2, 2], [4, 4])
    parts = support_partition(s, 2)
    assert sorted(idx.offset for idx in parts) == [0, 1, 2, 3]
    assert all(len(atoms) == 1 for atoms in parts.values())


def test_empty_set_group_contains_zero():
    s = intermediate_dimension_system("1", "1")
    parts = support_partition(s, 3)
    empty = next(idx for idx in parts if not idx.levels)
    assert F(0) in parts[empty]


def test_partition_exhausts_level_measure_and_is_disjoint():
    s = intermediate_dimension_system("0.5", "0.5")
    n = 3
    parts = support_partition(s, n)
    all_atoms = [a for atoms in parts.values() for a in atoms]
    assert len(all_atoms) == len(set(all_atoms))  # disjoint
    mu = finite_level(s, n)
    assert set(all_atoms) == {a[0] for a in mu.atoms}
    for idx, atoms in parts.items():
        off = idx.offset
        assert all(off <= a < off + 1 for a in atoms)


def test_partition_rejects_non_shift_systems():
    with pytest.raises(NotShiftFormError):
        support_partition(consecutive_system("k+1"), 2)
    with pytest.raises(NotShiftFormError):
        # shifted digits, but by N_1...N_k rather than (N_1...N_k) k!
        support_partition(unbounded_square_system(), 2)


def test_factorial_offsets_distinct():
    # sum_{k<=n} k! < (n+1)! keeps distinct level sets at distinct offsets
    for n in range(1, 31):
        assert sum(math.factorial(k) for k in range(1, n + 1)) < math.factorial(n + 1)


# -- patch_measure_formula ----------------------------------------------------


def test_patch_formula_examples():
    s = section5_form_system([2, 3, 4], [4, 6, 8])
    assert patch_measure_formula(s, 0, 1) == F(1, 2)
    assert patch_measure_formula(s, 1, 3) == F(1, 4)  # (1/2)(2/3)(3/4)
    assert patch_measure_formula(s, 3, 3) == F(1, 24)  # empty product


def test_patch_formula_matches_enumeration():
    systems = [
        section5_form_system([2, 3, 4, 2, 3], [4, 6, 8, 2, 6]),
        intermediate_dimension_system("1", "1"),
        intermediate_dimension_system("0.3", "0.7"),
    ]
    for s in systems:
        for n in range(1, 5):
            for l0 in range(0, n + 1):
                assert patch_measure_formula(s, l0, n) == enumerate_patch_mass(s, l0, n)


def test_patch_formula_prefix_independent():
    s = intermediate_dimension_system("1", "1")
    v = patch_measure_formula(s, 2, 4)
    assert enumerate_patch_mass(s, 2, 4, prefix=[0, 0]) == v
    assert enumerate_patch_mass(s, 2, 4, prefix=[1, 3]) == v  # includes far digits


def test_patch_index_order_violation():
    s = intermediate_dimension_system("1", "1")
    with pytest.raises(ValueError):
        patch_measure_formula(s, 3, 2)


def test_group_masses_match_partition():
    s = intermediate_dimension_system("0.3", "0.7")
    n = 4
    parts = support_partition(s, n)
    unit = F(1)
    for k in range(1, n + 1):
        unit /= s.level(k).b
    for idx, atoms in parts.items():
        assert unit * len(atoms) == group_mass_formula(s, idx.levels, n)


# -- dimension_quotients ------------------------------------------------------


def test_constant_rule_quotients_half():
    cons = consecutive_system("constant:2", multiplier=2)
    H, P = dimension_quotients(cons, 50, enforce_hypotheses=False)
    assert np.allclose(P.quotients, 0.5, atol=1e-12)
    # hausdorff denominator has one extra log 2: k log2 / ((k+2) log4 - log2)
    assert H.quotients[0] == pytest.approx(math.log(2) / (2 * math.log(4) - math.log(2)))


def test_quotients_in_unit_interval_and_ordered():
    for s in [
        intermediate_dimension_system("0", "1"),
        intermediate_dimension_system("0.3", "0.7"),
        unbounded_square_system(),
    ]:
        H, P = dimension_quotients(s, 500)
        assert np.all(P.quotients >= 0) and np.all(P.quotients <= 1)
        assert np.all(H.quotients >= 0) and np.all(H.quotients <= 1)
        # the hausdorff denominator dominates the packing one
        assert np.all(H.quotients <= P.quotients + 1e-12)


def test_square_rule_trend_toward_one():
    # frozen oracle: with b_k = k^2 and N_k = 2 k^2 the packing quotient at
    # K = 200 equals 2 ln(200!) / (200 ln 2 + 2 ln(200!)) = 0.925672...
    cons = consecutive_system("(k+1)^2", multiplier=2)

    # build the same quotient directly from logs as an independent check
    K = 200
    num = sum(2 * math.log(k + 1) for k in range(1, K + 1))
    den = sum(math.log(2) + 2 * math.log(k + 1) for k in range(1, K + 1))
    oracle = num / den
    H, P = dimension_quotients(cons, K)
    assert P.quotients[-1] == pytest.approx(oracle, abs=1e-12)
    assert 0.9 < oracle < 1.0
    # increasing trend toward 1
    assert np.all(np.diff(P.quotients[10:]) > 0)


def test_refuses_without_summability_hypothesis():
    cons = consecutive_system("k+1")  # sum 1/(k+1) diverges
    with pytest.raises(HypothesesViolation):
        dimension_quotients(cons, 50)
    H, P = dimension_quotients(cons, 50, enforce_hypotheses=False)
    assert len(P.quotients) == 50


def test_block_end_values_intermediate_dimension():
    s = intermediate_dimension_system("0.3", "0.7")
    H, P = dimension_quotients(s, 14400)
    pends = {j: v for j, k, v in P.block_end_values}
    hends = {j: v for j, k, v in H.block_end_values}
    # even blocks end on the high-dilation phase: packing near beta
    assert abs(pends[2] - 0.7) < 0.1 and abs(pends[4] - 0.7) < 0.1
    # odd blocks end on the low phase: hausdorff near alpha
    assert abs(hends[3] - 0.3) < 0.1


def test_explicit_horizon_guard():
    s = section5_form_system([2, 3], [4, 6])
    with pytest.raises(ValueError):
        dimension_quotients(s, 2, enforce_hypotheses=False)  # needs level 3


# -- stolz_cesaro_bounds ------------------------------------------------------


def test_stolz_equal_terms():
    b = stolz_cesaro_bounds([3.0] * 50, [3.0] * 50)
    assert b.quotient == 1.0
    assert b.tail_min == b.tail_max == 1.0
    assert b.bracket_holds


def test_stolz_log_terms_increase_toward_one():
    n = 2000
    alpha = [2 * math.log(k) for k in range(1, n + 1)]
    beta = [math.log(2) + 2 * math.log(k) for k in range(1, n + 1)]
    qs = []
    for m in (200, 800, 2000):
        qs.append(stolz_cesaro_bounds(alpha[:m], beta[:m]).quotient)
    assert qs[0] < qs[1] < qs[2] < 1.0
    assert stolz_cesaro_bounds(alpha, beta).bracket_holds


def test_stolz_oscillating_bounded():
    n = 100
    alpha = [(-1) ** k for k in range(1, n + 1)]
    beta = [1.0] * n
    b = stolz_cesaro_bounds(alpha, beta)
    assert -1.0 <= b.quotient <= 1.0
    assert b.tail_min == -1.0 and b.tail_max == 1.0
    assert b.bracket_holds


def test_stolz_rejects_nonpositive_beta():
    with pytest.raises(ValueError):
        stolz_cesaro_bounds([1.0, 1.0], [1.0, 0.0])


def test_stolz_bracket_on_random_instances():
    import random

    rng = random.Random(2024)
    for _ in range(100):
        n = rng.randint(5, 60)
        alpha = [rng.uniform(-5, 5) for _ in range(n)]
        beta = [rng.uniform(0.1, 5) for _ in range(n)]
        b = stolz_cesaro_bounds(alpha, beta)
        assert b.bracket_holds


def test_vectorized_logs_match_scalar_rule_logs():
    # the vectorized quotient path must agree with the per-level closed form,
    # and with the exact materialized scale, wherever levels are materializable
    for ab in [("0", "1"), ("0.3", "0.7"), ("0.7", "0.7")]:
        s = intermediate_dimension_system(*ab)
        logb, logn = s.rule.quotient_logs(40)
        for k in range(1, 41):
            assert logn[k - 1] == pytest.approx(s.rule.log_scale(k), rel=1e-12), (ab, k)
            assert logn[k - 1] == pytest.approx(math.log(s.level(k).N), rel=1e-9), (ab, k)
            lev = s.level(k)
            assert logb[k - 1] == pytest.approx(math.log(lev.b), rel=1e-12)
