import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st
from scipy.integrate import quad

from saft_sampling.special_functions import (DomainError, EvalResult, RangeError, bessel_i0,
                                             bessel_i1, bessel_j1, bspline_center_value,
                                             cardinal_bspline, i0, i0m1, i0_minus_l0, i1, j1, l0,
                                             si, sine_integral, struve_l0)


def quad_pi(func):
    return quad(func, 0, math.pi, epsabs=1e-14, epsrel=1e-14, limit=200)[0] / math.pi


def i0_oracle(x):
    return quad_pi(lambda th: math.exp(x * math.cos(th)))


def i1_oracle(x):
    return quad_pi(lambda th: math.exp(x * math.cos(th)) * math.cos(th))


def j1_oracle(x):
    return quad_pi(lambda th: math.cos(th - x * math.sin(th)))


def test_trivial_values():
    assert float(bessel_i0(0.0)) == 1.0
    assert float(bessel_i1(0.0)) == 0.0
    assert float(bessel_j1(0.0)) == 0.0
    assert float(struve_l0(0.0)) == 0.0
    assert float(sine_integral(0.0)) == 0.0


def test_eval_result_fields():
    r = bessel_i0(20.0)
    assert isinstance(r, EvalResult)
    assert r.est_abs_error >= 0 and math.isfinite(r.est_abs_error)
    assert r.est_abs_error < 1e-12 * r.value


def test_i0_at_pi_constant():
    v = float(bessel_i0(math.pi))
    assert math.exp(math.pi) / (math.sqrt(2) * math.pi * (v - 1)) == pytest.approx(1.163167956, rel=1e-6)


@pytest.mark.parametrize("fn, oracle, x", [(bessel_i0, i0_oracle, 2.0), (bessel_i1, i1_oracle, 1.0),
                                           (bessel_j1, j1_oracle, 1.0)])
def test_integral_oracles(fn, oracle, x):
    assert float(fn(x)) == pytest.approx(oracle(x), abs=1e-10)


def test_j1_first_root():
    assert abs(float(bessel_j1(3.8317059702))) < 1e-8


def test_i1_half_inequality():
    x = 0.5
    assert math.sqrt(2 * math.pi * x) * math.exp(-x) * float(bessel_i1(x)) < 1


def test_random_points_against_integral_oracles():
    rng = np.random.default_rng(7)
    x = rng.uniform(-50, 50, 200)
    for name, fn, oracle in [("i0", i0, i0_oracle), ("i1", i1, i1_oracle), ("j1", j1, j1_oracle)]:
        ours = fn(x)
        ref = np.array([oracle(v) for v in x])
        # the exponential growth of I makes absolute error meaningful only relative to size
        scale = np.maximum(1.0, np.abs(ref)) if name != "j1" else 1.0
        assert np.max(np.abs(ours - ref) / scale) < 1e-9, name


def test_relative_accuracy_against_scipy():
    x = np.concatenate([np.linspace(-100, 100, 2001), [1e-8, 14.99, 15.01]])
    np.testing.assert_allclose(i0(x), sp.i0(x), rtol=1e-12)
    np.testing.assert_allclose(i1(x), sp.i1(x), rtol=1e-12, atol=1e-300)
    xj = np.linspace(-200, 200, 4001)
    np.testing.assert_allclose(j1(xj), sp.j1(xj), rtol=0, atol=1e-10)
    np.testing.assert_allclose(si(xj), sp.sici(xj)[0], rtol=0, atol=1e-10)


def test_i0m1_small_argument():
    x = np.array([1e-10, 1e-5, 0.1, 3.0])
    with mpmath.workdps(40):
        expect = [float(mpmath.besseli(0, mpmath.mpf(v)) - 1) for v in x]
    np.testing.assert_allclose(i0m1(x), expect, rtol=1e-13)


def test_struve_against_mpmath():
    # the difference cancels about 80 digits at x = 180
    with mpmath.workdps(120):
        for x in [0.3, 1.0, 5.0, 14.0, 16.0, 40.0, 120.0, 180.0]:
            ref = float(mpmath.struvel(0, x))
            assert float(struve_l0(x)) == pytest.approx(ref, rel=1e-10)
            diff = float(mpmath.besseli(0, x) - mpmath.struvel(0, x))
            assert float(i0_minus_l0(x)) == pytest.approx(diff, rel=1e-12)


def test_struve_series_oracle_at_one():
    # direct summation of (2x/pi) sum x^{2k}/((2k+1)!!)^2 until it stops changing
    total, k, term = Fraction(0), 0, None
    x = Fraction(1)
    while True:
        dfact = math.prod(range(1, 2 * k + 2, 2))
        term = x ** (2 * k) / dfact ** 2
        if term < Fraction(1, 10 ** 30):
            break
        total += term
        k += 1
    assert float(struve_l0(1.0)) == pytest.approx(float(2 * x / Fraction(math.pi) * total), rel=1e-14)


def test_struve_completely_monotone_difference():
    v5, v4 = float(struve_l0(5.0)), float(struve_l0(4.0))
    d5, d4 = float(bessel_i0(5.0)) - v5, float(bessel_i0(4.0)) - v4
    assert 0 < d5 < float(bessel_i0(5.0))
    assert d5 < d4


def test_struve_range():
    with pytest.raises(RangeError):
        struve_l0(250.0)


def test_sine_integral_examples():
    oracle = quad(lambda t: math.sin(t) / t if t else 1.0, 0, math.pi, epsabs=1e-15)[0]
    assert float(sine_integral(math.pi)) == pytest.approx(oracle, abs=1e-10)
    assert abs(float(sine_integral(50.0)) - math.pi / 2) < 0.05


@pytest.mark.parametrize("fn", [bessel_i0, bessel_i1, bessel_j1, struve_l0, sine_integral])
@pytest.mark.parametrize("bad", [float("nan"), float("inf")])
def test_nonfinite_rejected(fn, bad):
    with pytest.raises(DomainError):
        fn(bad)


@given(st.floats(-60, 60))
def test_parity(x):
    assert abs(i0(x) - i0(-x)) <= 1e-13 * abs(i0(x))
    for fn in (i1, j1, l0, si):
        assert abs(fn(x) + fn(-x)) <= 1e-13 * max(1.0, abs(fn(x)))


def test_half_order_identity():
    # pi I_{1/2}(beta/2)^2 = (4/beta) sinh(beta/2)^2 with I_{1/2}^2 written as an I_1 integral
    for beta in (1.0, math.pi, 10.0):
        lhs = beta * quad(lambda s: float(i1(beta * math.cos(s))), -math.pi / 2, math.pi / 2,
                                    epsabs=1e-13, epsrel=1e-13)[0]
        assert lhs == pytest.approx(4 * math.sinh(beta / 2) ** 2, rel=1e-8)


def test_scaled_i0_decreasing():
    x = np.linspace(0, 30, 3001)
    assert np.all(np.diff(np.exp(-x) * i0(x)) < 0)


# cardinal B-splines

def bspline_oracle(k, t):
    """Exact value from the closed form M_k(t) = 1/(k-1)! sum_j (-1)^j C(k,j) (t + k/2 - j)_+^{k-1}."""
    t = Fraction(t)
    total = Fraction(0)
    for j in range(k + 1):
        y = t + Fraction(k, 2) - j
        if y > 0:
            total += (-1) ** j * math.comb(k, j) * y ** (k - 1)
    return total / math.factorial(k - 1)


def test_bspline_examples():
    assert cardinal_bspline(1, 0.0) == 1.0
    assert cardinal_bspline(2, 0.0) == 1.0
    assert cardinal_bspline(4, 0.0) == pytest.approx(2 / 3, abs=1e-16)
    v = cardinal_bspline(6, 0.0)
    assert 4 / 3 <= math.sqrt(6) * v < math.sqrt(6 / math.pi)


def test_bspline_order_zero_rejected():
    with pytest.raises(DomainError):
        cardinal_bspline(0, 0.0)


@given(k=st.integers(1, 30), t=st.floats(-16, 16))
def test_bspline_against_exact_formula(k, t):
    got = cardinal_bspline(k, t)
    assert got >= 0
    if abs(t) >= k / 2:
        assert got == 0
    assert got == pytest.approx(float(bspline_oracle(k, t)), abs=1e-14)


def test_bspline_center_exact():
    for k in range(1, 31):
        assert bspline_center_value(k) == float(bspline_oracle(k, 0))


def test_bspline_order_one_is_open_indicator():
    assert cardinal_bspline(1, np.array([-0.5, -0.49, 0.49, 0.5])).tolist() == [0.0, 1.0, 1.0, 0.0]


@pytest.mark.parametrize("k", [2, 3, 5, 8, 16, 31])
def test_bspline_unit_integral(k):
    t = np.linspace(-k / 2, k / 2, 10_000)
    assert np.trapezoid(cardinal_bspline(k, t), t) == pytest.approx(1.0, abs=1e-6)


def test_bspline_recursion():
    # M_k(t) = integral of M_{k-1} over [t - 1/2, t + 1/2]
    for k in (3, 6, 9):
        for t in (0.0, 0.37, 1.8):
            val = quad(lambda u: float(cardinal_bspline(k - 1, u)), t - 0.5, t + 0.5,
                       points=[j / 2 for j in range(-k, k + 1)], epsabs=1e-14)[0]
            assert cardinal_bspline(k, t) == pytest.approx(val, abs=1e-13)
