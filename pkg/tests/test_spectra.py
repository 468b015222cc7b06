"""Spectrum generation, exact orthogonality, Parseval, equi-positivity."""
import math
from fractions import Fraction

import numpy as np
import pytest

from moranspec import (
    consecutive_system,
    equi_positivity_certificate,
    finite_level,
    fourier_transform,
    gram_matrix,
    jorgensen_pedersen_system,
    intermediate_dimension_system,
    mask_bound_margins,
    mask_lower_bound,
    scaled_tail_measure,
    seeded_frequencies,
    spectrum_level,
    tail_transform_bound_check,
    tail_transform_on_grid,
    unbounded_square_system,
    verify_orthogonality,
    verify_parseval,
)
from moranspec.spectra import (
    SpectrumPreconditionError,
    completeness_defect,
)
from moranspec.digitsets import symmetric_rational_grid

F = Fraction


# -- spectrum_level ----------------------------------------------------------


def test_jp_level_two_frequencies():
    lvl = spectrum_level(jorgensen_pedersen_system(), 2)
    assert lvl.lambdas == (0, 1, 4, 5)
    assert lvl.digit_decomposition[5] == (1, 1)


def test_level_one_is_first_digit_set():
    ex = unbounded_square_system()
    lvl = spectrum_level(ex, 1)
    assert lvl.lambdas == (0, 2, 4, 6)


def test_unbounded_square_level_two_enumeration():
    ex = unbounded_square_system()
    lvl = spectrum_level(ex, 2)
    # independent enumeration: l1 + 8 * l2 over the two canonical digit sets
    l1s = (0, 2, 4, 6)
    l2s = tuple(2 * j for j in range(9))  # canonical digits for (9, 18)
    expected = sorted({a + 8 * b for a in l1s for b in l2s})
    assert list(lvl.lambdas) == expected
    assert len(lvl) == 36


def test_spectrum_cardinality_no_collisions_through_level_five():
    for system, max_n in [
        (jorgensen_pedersen_system(), 5),
        (consecutive_system("k+1"), 5),
        (unbounded_square_system(), 3),
    ]:
        expected = 1
        for n in range(1, max_n + 1):
            expected *= system.level(n).b
            lvl = spectrum_level(system, n)
            assert len(lvl) == expected


def test_spectrum_requires_verified_levels():
    from moranspec import ExplicitRule, MoranSystem

    bad = MoranSystem(ExplicitRule([(4, 2, (0, 3))]))
    with pytest.raises(SpectrumPreconditionError):
        spectrum_level(bad, 1)


def test_digit_decomposition_reconstructs_frequency():
    ex = unbounded_square_system()
    lvl = spectrum_level(ex, 3)
    scales = [1, 8, 8 * 18]
    for lam, digits in lvl.digit_decomposition.items():
        assert lam == sum(s * d for s, d in zip(scales, digits))


# -- verify_orthogonality ----------------------------------------------------


def test_jp_level_two_orthogonal():
    jp = jorgensen_pedersen_system()
    mu = finite_level(jp, 2)
    lvl = spectrum_level(jp, 2)
    assert verify_orthogonality(mu, lvl, jp).orthogonal
    # each difference kills one factor, e.g. the transform at 1 contains the
    # level-1 mask at 1/4, which vanishes


def test_common_denominator_multiple_fails_with_witness():
    jp = jorgensen_pedersen_system()
    mu = finite_level(jp, 2)
    lvl = spectrum_level(jp, 2)
    fake = type(lvl)(
        n=2, lambdas=(0, 16), digit_decomposition={}, level_digits=lvl.level_digits
    )
    res = verify_orthogonality(mu, fake, jp)
    assert not res.orthogonal
    assert res.witness == (0, 16)
    # oracle: the transform of mu_2 at a multiple of N_1 N_2 equals 1
    assert fourier_transform(mu, 16) == 1.0


def test_level_one_matches_triple_check():
    cons = consecutive_system("k+1")
    mu = finite_level(cons, 1)
    lvl = spectrum_level(cons, 1)
    assert verify_orthogonality(mu, lvl, cons).orthogonal


def test_factored_path_agrees_with_direct_path():
    for system, n in [
        (jorgensen_pedersen_system(), 3),
        (consecutive_system("k+1"), 2),
        (unbounded_square_system(), 1),
    ]:
        mu = finite_level(system, n)
        lvl = spectrum_level(system, n)
        fast = verify_orthogonality(mu, lvl, system)
        slow = verify_orthogonality(mu, lvl, None)
        assert fast.orthogonal == slow.orthogonal == True  # noqa: E712


def test_gram_matrix_oracle_identity():
    for system, n in [(jorgensen_pedersen_system(), 3), (unbounded_square_system(), 2)]:
        mu = finite_level(system, n)
        lvl = spectrum_level(system, n)
        G = gram_matrix(mu, lvl)
        assert np.max(np.abs(G - np.eye(len(lvl)))) < 1e-9
        assert fourier_transform(mu, 0) == 1.0  # exact diagonal


# -- verify_parseval ---------------------------------------------------------


def test_parseval_at_zero_and_random():
    jp = jorgensen_pedersen_system()
    mu = finite_level(jp, 2)
    lvl = spectrum_level(jp, 2)
    assert verify_parseval(mu, lvl, [0.0]) < 1e-12
    dev = verify_parseval(mu, lvl, seeded_frequencies(100, 99))
    assert dev < 1e-9


def test_parseval_cardinality_mismatch():
    jp = jorgensen_pedersen_system()
    mu = finite_level(jp, 2)
    lvl = spectrum_level(jp, 1)
    with pytest.raises(ValueError):
        verify_parseval(mu, lvl, [0.0])


def test_parseval_defect_when_frequency_removed():
    jp = jorgensen_pedersen_system()
    mu = finite_level(jp, 2)
    defect = completeness_defect(mu, (0, 1, 4), 0.3)
    # oracle: 1 - |mu_2-hat(5.3)|^2 = 1 - cos^2(pi 5.3 / 2) cos^2(pi 5.3 / 8)
    expected = abs(
        math.cos(math.pi * 5.3 / 2) ** 2 * math.cos(math.pi * 5.3 / 8) ** 2
    )
    assert defect == pytest.approx(expected, abs=1e-9)
    assert defect > 0.04


# -- masks and equi-positivity ------------------------------------------------


def test_mask_lower_bound_values():
    assert mask_lower_bound(5, 0, 0.0) == 1.0
    assert mask_lower_bound(3, 1, 0.0) == pytest.approx(1 / 3)
    assert mask_lower_bound(2, 0, 0.5) == pytest.approx(1 - math.pi**2 / 6)


def test_mask_bound_holds_on_grids():
    ex = unbounded_square_system()
    for k in (1, 2, 5, 12):
        margins = mask_bound_margins(ex, k, grid_points=2001)
        assert float(margins.min()) >= -1e-12


def test_consecutive_certificate_closed_form():
    cert = equi_positivity_certificate(consecutive_system("k+1"), horizon=100)
    assert cert.epsilon == pytest.approx(math.exp(-8 * math.pi**2 / 27), abs=1e-12)
    assert cert.n0 == 0
    assert cert.delta == pytest.approx(1 / 6)
    assert cert.partial_sum_ckbk == 0


def test_unbounded_square_certificate():
    cert = equi_positivity_certificate(unbounded_square_system(), horizon=200)
    closed = math.exp(-8 * math.pi**2 / 27 - 6 * (math.pi**2 / 6 - 1))
    assert cert.epsilon == pytest.approx(closed, abs=1e-6)
    assert cert.n0 == 5
    # epsilon from the upper bound S never exceeds the closed-form value
    assert cert.epsilon <= closed


def test_threshold_pushes_n0_up():
    sys17 = intermediate_dimension_system("1", "1")
    cert = equi_positivity_certificate(sys17, horizon=60)
    # 2 c_1 / b_1 = 1 exceeds 7/9 - 2 pi^2/27, so n0 >= 1
    assert cert.n0 >= 1


def test_certificate_refuses_without_tail_bound():
    jp = jorgensen_pedersen_system()
    with pytest.raises(ValueError):
        equi_positivity_certificate(jp, horizon=50)


def test_tail_bound_check_consecutive():
    cons = consecutive_system("k+1")
    cert = equi_positivity_certificate(cons, horizon=100)
    for n in (0, 2):
        check = tail_transform_bound_check(
            cons, n, factors=15, grid_points=1000, certificate=cert
        )
        assert check.ok
        assert check.bound_value >= cert.epsilon
        assert check.grid_min_direct >= check.bound_value


def test_tail_bound_check_unbounded_square_thousand_points():
    ex = unbounded_square_system()
    cert = equi_positivity_certificate(ex, horizon=200)
    check = tail_transform_bound_check(
        ex, cert.n0, factors=15, grid_points=1000, certificate=cert
    )
    assert check.ok
    assert check.grid_min_direct >= cert.epsilon


def test_tail_bound_check_requires_n_at_least_n0():
    ex = unbounded_square_system()
    cert = equi_positivity_certificate(ex, horizon=200)
    with pytest.raises(ValueError):
        tail_transform_bound_check(ex, cert.n0 - 1, certificate=cert)


def test_direct_tail_transform_at_zero_is_one():
    cons = consecutive_system("k+1")
    vals = tail_transform_on_grid(cons, 2, 10, [0], 1)
    assert vals[0] == pytest.approx(1.0, abs=1e-12)


def test_scaled_tail_measure_examples():
    jp = jorgensen_pedersen_system()
    nt = scaled_tail_measure(jp, 1, 1)
    assert sorted(nt.atoms) == [(F(0),), (F(1, 2),)]
    ex = unbounded_square_system()
    m1 = scaled_tail_measure(ex, 2, 1)
    assert m1 == finite_level_shifted_oracle(ex, 2)
    # one factor: uniform on B_{n+1} / N_{n+1}
    lev = ex.level(3)
    from moranspec import uniform_measure

    expected = uniform_measure([(F(d, lev.N),) for d in lev.digits])
    assert m1 == expected


def finite_level_shifted_oracle(system, n):
    from moranspec import uniform_measure

    lev = system.level(n + 1)
    return uniform_measure([(F(d, lev.N),) for d in lev.digits])


def test_scaled_tail_transform_factorizes():
    ex = unbounded_square_system()
    nt = scaled_tail_measure(ex, 1, 2)
    nums, den = symmetric_rational_grid(11)
    direct = tail_transform_on_grid(ex, 1, 2, nums, den)
    for p, expected in zip(nums, direct):
        val = abs(fourier_transform(nt, F(p, den)))
        assert val == pytest.approx(expected, abs=1e-10)


def test_kx_policy_arithmetic():
    # for x in [0,1) and |y| < 1/6, the shifted point x + y + k_x stays in
    # (-2/3, 2/3) under k_x = 0 on [0,1/2] and k_x = -1 on [1/2,1)
    for i in range(200):
        x = F(i, 200)
        kx = 0 if x <= F(1, 2) else -1
        for y in (F(-1, 6) + F(1, 1000), F(0), F(1, 6) - F(1, 1000)):
            assert abs(x + y + kx) < F(2, 3)


def test_factored_and_direct_paths_agree_on_failure():
    jp = jorgensen_pedersen_system()
    mu = finite_level(jp, 2)
    base = spectrum_level(jp, 2)
    broken = type(base)(
        n=2, lambdas=(0, 1, 4, 16), digit_decomposition={}, level_digits=base.level_digits
    )
    fast = verify_orthogonality(mu, broken, jp)
    slow = verify_orthogonality(mu, broken, None)
    assert not fast.orthogonal and not slow.orthogonal
    assert fast.witness == slow.witness == (0, 16)
