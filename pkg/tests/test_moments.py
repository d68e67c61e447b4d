import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dedm import hybrid, lfun, moments
from dedm.fields import SplitType, build_field, split_type


def _image_numbers(F, N):
    return [n for n in range(1, N + 1) if moments.in_norm_image(n, F)]


def test_max_grid_step_and_validation(F4):
    assert moments.max_grid_step(F4, 1000.0) == pytest.approx(
        0.05 / math.log(4000.0))
    with pytest.raises(ValueError, match="exceeds"):
        moments.moment_integral("P", F4, 1000.0, 1.0, 10.0, grid_step=0.5)
    with pytest.raises(ValueError, match="T >= 100"):
        moments.moment_integral("P", F4, 50.0, 1.0, 10.0)
    with pytest.raises(ValueError, match="unknown integrand"):
        moments.moment_integral("Q", F4, 1000.0, 1.0, 10.0)


def test_moment_k0_is_one(F4, zeros_merged):
    for f in ("zetaK", "P", "zetaK_Pinv"):
        r = moments.moment_integral(f, F4, 200.0, 0.0, 10.0)
        assert r.value == 1.0 and r.predicted == 1.0
    rz = moments.moment_integral("Z", F4, 200.0, 0.0, 10.0,
                                 zeros=zeros_merged)
    assert rz.value == 1.0


def test_moment_grid_refinement_invariance(F4):
    base = moments.moment_integral("P", F4, 300.0, 1.0, 10.0)
    fine = moments.moment_integral("P", F4, 300.0, 1.0, 10.0,
                                   grid_step=base.grid_step / 2)
    assert abs(fine.value / base.value - 1.0) < 0.005


def test_moment_zetaK_vs_direct_quadrature(F4):
    # coarse trapezoid with the point evaluator as an independent check
    T = 200.0
    r = moments.moment_integral("zetaK", F4, T, 1.0, 10.0)
    t = np.linspace(T, 2 * T, 4001)
    vals = np.array([abs(lfun.zetaK_eval(0.5 + 1j * ti, F4)) ** 2
                     for ti in t])
    crude = float(np.trapezoid(vals, t)) / T
    assert abs(r.value / crude - 1.0) < 0.02


def test_z_moment_needs_zero_table(F4, zeros_merged):
    with pytest.raises(ValueError, match="zero table"):
        moments.moment_integral("Z", F4, 200.0, 1.0, 10.0)
    short = lfun.find_zeros(lfun.zeta_component(F4), 30.0)
    with pytest.raises(hybrid.CoverageError):
        moments.moment_integral("Z", F4, 200.0, 1.0, 10.0, zeros=short)
    r = moments.moment_integral("Z", F4, 200.0, 1.0, 10.0,
                                zeros=zeros_merged)
    assert r.value > 0


def test_moment_csv_row(F4):
    r = moments.moment_integral("P", F4, 200.0, 1.0, 10.0)
    row = r.csv_row()
    assert len(row.split(",")) == len(moments.CSV_HEADER.split(","))
    assert row.startswith("200,10,1,")


def test_mv_mean_value_diagonal(F4):
    rng = random.Random(31)
    coeffs = np.zeros(21)
    for n in range(1, 21):
        coeffs[n] = rng.uniform(-1, 1)
    emp, diag = moments.mv_mean_value(coeffs, 5000.0)
    assert abs(emp / diag - 1.0) < 0.05
    with pytest.raises(ValueError, match="sqrt"):
        moments.mv_mean_value(np.ones(101), 5000.0)


def test_in_norm_image(F4):
    assert [n for n in range(1, 21) if moments.in_norm_image(n, F4)] == \
        [1, 2, 4, 5, 8, 9, 10, 13, 16, 17, 18, 20]


def test_mobius_prime_values(F4):
    assert moments.mobius_prime(1, F4) == 1
    assert moments.mobius_prime(5, F4) == -1     # split prime norm
    assert moments.mobius_prime(2, F4) == -1     # ramified prime norm
    assert moments.mobius_prime(9, F4) == -1     # inert prime norm p^2
    assert moments.mobius_prime(25, F4) == 0     # split square
    assert moments.mobius_prime(81, F4) == 0     # inert fourth power
    assert moments.mobius_prime(10, F4) == 1     # two distinct prime norms
    assert moments.mobius_prime(45, F4) == 1     # 9 * 5
    with pytest.raises(ValueError, match="not an ideal norm"):
        moments.mobius_prime(3, F4)


def test_mobius_prime_divisor_identity(F4):
    # sum over ideal-norm divisors d | gcd(h,k) of mu'(d) is the
    # coprimality indicator
    image = _image_numbers(F4, 500)
    image_set = set(image)
    for h, k in itertools.product(image[:60], image[:60]):
        g = math.gcd(h, k)
        total = sum(moments.mobius_prime(d, F4)
                    for d in range(1, g + 1)
                    if g % d == 0 and d in image_set)
        assert total == (1 if g == 1 else 0)


def test_delta_weights(F4):
    assert moments.delta_weight(1, F4) == 1.0
    assert moments.delta_weight(5, F4) == pytest.approx(1 + 4 / 6)
    assert moments.delta_weight(3, F4) == 0.0    # odd inert power
    assert moments.delta_weight(9, F4) == 1.0    # even inert power
    assert moments.delta_weight(2, F4) == 1.0    # ramified: no factor
    assert moments.delta_prime_weight(9, F4) == pytest.approx(1 + 2 * 4 / 2)
    assert moments.delta_prime_weight(5, F4) == \
        moments.delta_weight(5, F4)
    with pytest.raises(ValueError):
        moments.delta_weight(0, F4)


def test_b_shift_zero_is_delta_product(F4):
    pairs = [(5, 9), (10, 9), (25, 2), (45, 13), (1, 50)]
    for h, k in pairs:
        b = moments.b_shift_zero(h, k, F4)
        dd = moments.delta_weight(h, F4) * moments.delta_weight(k, F4)
        assert abs(b - dd) < 1e-12
    with pytest.raises(ValueError, match="= 1 required"):
        moments.b_shift_zero(5, 10, F4)


def test_zprime_zero_symmetry(F4):
    a = moments.zprime_zero(5, 9, F4)
    b = moments.zprime_zero(9, 5, F4)
    assert abs(a - b) < 1e-12 * abs(a)
    assert abs(a) > 0
    # scaling by delta' in each argument
    base = moments.zprime_zero(1, 1, F4)
    assert a == pytest.approx(base * moments.delta_prime_weight(5, F4)
                              * moments.delta_prime_weight(9, F4))


def test_c2_main_term(F4):
    c = moments.c2_main_term(1, 1, F4, 5000.0)
    pref = 0.25  # (6/pi^2) (pi/4)^2 / (1 + 1/2)
    assert c.main == pytest.approx(
        pref * math.log(5000.0) * math.log(20000.0), rel=1e-9)
    assert c.o_bound >= 0
    # common factors cancel: c2(h, h) = c2(1, 1)
    assert moments.c2_main_term(10, 10, F4, 5000.0).main == \
        pytest.approx(c.main)
    with pytest.raises(ValueError):
        moments.c2_main_term(1, 1, F4, 10.0)


def _brute_G(p, st_, regime, F):
    # quadruple sum over the local exponents, directly from the
    # definition of S restricted to powers of one prime
    if st_ is SplitType.INERT:
        N = p * p
    else:
        N = p
    if st_ is SplitType.SPLIT:
        alpha = {0: 1.0, 1: -2.0, 2: 1.0 if regime == "small" else 2.0}
    else:
        alpha = {0: 1.0, 1: -1.0, 2: 0.0 if regime == "small" else 0.5}
    F4 = F

    def mu_p(e):
        return {0: 1, 1: -1}.get(e, 0)

    def delta_p(e):
        if st_ is SplitType.INERT:
            return moments.delta_weight(N ** e, F4) if e else 1.0
        return moments.delta_weight(p ** e, F4) if e else 1.0

    total = 0.0
    for g in range(9):
        for u in range(3):
            inner = 0.0
            for m in range(9):
                a = alpha.get(g + u + m)
                if a:
                    inner += a * delta_p(u + m) / N ** m
            total += mu_p(u) / N ** (g + 2 * u) * inner * inner
    return total


def test_euler_factor_G_vs_brute(F4):
    cases = [(5, SplitType.SPLIT), (13, SplitType.SPLIT),
             (2, SplitType.RAMIFIED), (3, SplitType.INERT),
             (7, SplitType.INERT)]
    for p, st_ in cases:
        for regime in ("small", "large"):
            brute = _brute_G(p, st_, regime, F4)
            assert abs(moments.euler_factor_G(p, st_, regime, F4)
                       - brute) < 1e-12
    with pytest.raises(ValueError):
        moments.euler_factor_G(5, SplitType.SPLIT, "medium", F4)


def test_euler_factor_G_closed_forms(F4):
    # split small-regime factor collapses to (1-1/p)^4/(1-1/p^2)
    for p in (5, 13, 17):
        ref = (1 - 1 / p) ** 4 / (1 - 1 / p ** 2)
        assert moments.euler_factor_G(p, SplitType.SPLIT, "small", F4) == \
            pytest.approx(ref, rel=1e-12)
    assert moments.euler_factor_G(2, SplitType.RAMIFIED, "small", F4) == \
        pytest.approx(0.5, rel=1e-12)
    assert moments.euler_factor_G(3, SplitType.INERT, "small", F4) == \
        pytest.approx(1 - 1 / 9, rel=1e-12)


def test_main_sum_S_nested_vs_euler(F4):
    eu = moments.main_sum_S(F4, 10.0, "euler")
    ne = moments.main_sum_S(F4, 10.0, "nested",
                            caps=moments.NestedCaps(N=100_000))
    assert abs(ne.value / eu.value - 1.0) < 0.02
    assert ne.tail < 0.02 * eu.value
    with pytest.raises(ValueError):
        moments.main_sum_S(F4, 10.0, "exact")


def test_theorem2_check_regime_guard(F4):
    with pytest.raises(ValueError, match="regime"):
        moments.theorem2_check(F4, 150.0, 100.0)


def test_theorem_checks_smoke(F4, zeros_merged):
    v2 = moments.theorem2_check(F4, 1000.0, 10.0)
    assert 0.5 < v2 < 2.0
    v3 = moments.theorem3_check(F4, 1000.0, 16.0, zeros_merged)
    assert 0.5 < v3 < 3.0
    sr = moments.splitting_ratio(F4, 1000.0, 16.0, 1.0, zeros_merged)
    assert 0.3 < sr < 2.0
    assert moments.splitting_ratio(F4, 1000.0, 16.0, 0.0, zeros_merged) == 1.0


@given(st.integers(1, 3000), st.integers(1, 3000))
@settings(max_examples=120, deadline=None)
def test_mobius_prime_multiplicative_property(n, m):
    F = build_field(-4)
    if (math.gcd(n, m) == 1 and moments.in_norm_image(n, F)
            and moments.in_norm_image(m, F)):
        assert moments.mobius_prime(n * m, F) == \
            moments.mobius_prime(n, F) * moments.mobius_prime(m, F)


@given(st.integers(1, 5000))
@settings(max_examples=120, deadline=None)
def test_delta_weights_nonnegative_property(h):
    F = build_field(-4)
    assert moments.delta_weight(h, F) >= 0.0
    assert moments.delta_prime_weight(h, F) >= 0.0
    # delta' dominates delta (extra inert factors are >= 1)
    assert moments.delta_prime_weight(h, F) >= moments.delta_weight(h, F)
