import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from sfkcusp.specialfn import (
    LambertDomainError,
    UnsupportedOrderError,
    derivative_leading_coefficient,
    lambert_w0,
    lambert_w0_derivative,
    lambert_w0_exp,
)


def test_w_of_e_is_one():
    assert lambert_w0(math.e).w == pytest.approx(1.0, abs=1e-15)


def test_small_argument_tends_to_zero():
    ws = [lambert_w0(x).w for x in (1e-3, 1e-6, 1e-9, 1e-12)]
    assert all(0 < w for w in ws)
    assert all(b < a for a, b in zip(ws, ws[1:]))
    assert ws[-1] == pytest.approx(1e-12, rel=1e-10)


def test_twenty_thousand_matches_mpmath():
    w = lambert_w0(2e4).w
    assert w * math.exp(w) == pytest.approx(2e4, rel=1e-15)
    assert w == pytest.approx(float(mpmath.lambertw(2e4)), rel=1e-15)


@given(st.floats(min_value=-6, max_value=12))
def test_defining_identity(log10x):
    x = 10.0**log10x
    w = lambert_w0(x).w
    assert abs(w * math.exp(w) - x) / max(x, 1.0) <= 1e-14
    assert w >= 0


@given(st.floats(min_value=6, max_value=300))
def test_large_argument_sandwich(log10x):
    x = 10.0**log10x
    w = lambert_w0(x).w
    assert math.log(x) - math.log(math.log(x)) <= w <= math.log(x)


def test_log_argument_form_beyond_float_range():
    for L in (10.0, 700.0, 5000.0):
        w = lambert_w0_exp(L)
        assert w + math.log(w) == pytest.approx(L, rel=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan"), float("inf")])
def test_domain_errors(x):
    with pytest.raises(LambertDomainError):
        lambert_w0(x)


def test_first_derivative_at_e():
    assert lambert_w0_derivative(math.e, 1) == pytest.approx(1 / (2 * math.e), rel=1e-14)


def test_first_derivative_large_x_is_about_one_over_x():
    for x in (1e8, 1e12, 1e16):
        d = lambert_w0_derivative(x, 1)
        # W'(x) x = W / (1 + W) = 1 + O(1 / log x)
        assert abs(x * d - 1) < 2 / math.log(x)


def test_second_derivative_finite_difference():
    h = 1e-3
    fd = (lambert_w0(math.e + h).w - 2 * lambert_w0(math.e).w + lambert_w0(math.e - h).w) / h**2
    assert lambert_w0_derivative(math.e, 2) == pytest.approx(fd, abs=1e-7)


@pytest.mark.parametrize("x", np.geomspace(1.0, 1e6, 13))
def test_first_derivative_matches_central_difference(x):
    h = 1e-5 * x
    fd = (lambert_w0(x + h).w - lambert_w0(x - h).w) / (2 * h)
    assert lambert_w0_derivative(x, 1) == pytest.approx(fd, rel=1e-8)


@pytest.mark.parametrize("order", range(1, 7))
def test_derivatives_against_mpmath(order):
    x = 3.7
    want = float(mpmath.diff(mpmath.lambertw, x, order))
    assert lambert_w0_derivative(x, order) == pytest.approx(want, rel=1e-10)


def test_leading_coefficients_alternate_factorials():
    assert [derivative_leading_coefficient(k) for k in range(1, 7)] == [1, -1, 2, -6, 24, -120]


@pytest.mark.parametrize("order", [0, 7, 2.5])
def test_unsupported_order(order):
    with pytest.raises(UnsupportedOrderError):
        lambert_w0_derivative(1.0, order)
