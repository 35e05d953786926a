import math
from fractions import Fraction

import numpy as np
import pytest

from sfkcusp.asymptotics import (
    FitQualityError,
    ae_constant,
    ae_constant_numeric,
    ae_normalization,
    dyadic_radii,
    expected_ae_exponent,
    expected_cusp_coefficient,
    fit_ae_remainder,
    fit_cusp_coefficient,
    fit_cusp_from_potential,
    fit_power_law,
    leading_ae_coefficient,
    next_order_exponent,
    window_drift,
)
from sfkcusp.momentum import profile_cp1, profile_cpn


def test_ae_exponent_n2(hs2):
    fit = fit_ae_remainder(hs2)
    assert fit.exponent == pytest.approx(-2, abs=0.05)
    assert fit.r_squared >= 0.999


@pytest.mark.parametrize("n", [3, 4, 5])
def test_ae_exponent_higher_dim(n):
    fit = fit_ae_remainder(profile_cpn(n, -1))
    assert fit.exponent == pytest.approx(4 - 2 * n, abs=0.05)
    assert fit.r_squared >= 0.999


@pytest.mark.parametrize("k", [2, 3])
def test_ae_exponent_other_degrees(k):
    assert fit_ae_remainder(profile_cp1(k, 0)).exponent == pytest.approx(-2, abs=0.05)


def test_planted_power_law():
    radii = dyadic_radii((10.0, 1000.0))
    fit = fit_power_law(radii, radii**-4.0)
    assert fit.exponent == pytest.approx(-4, abs=1e-12)
    assert fit.coefficient == pytest.approx(1.0, rel=1e-10)


def test_sign_change_rejected():
    radii = dyadic_radii((10.0, 1000.0))
    with pytest.raises(FitQualityError):
        fit_power_law(radii, np.cos(radii))


def test_poor_fit_rejected():
    radii = dyadic_radii((10.0, 1000.0))
    with pytest.raises(FitQualityError) as exc:
        fit_power_law(radii, 2.0 + np.sin(np.log(radii) * 4))
    assert exc.value.fit is not None


def test_window_stability():
    for p in (profile_cp1(1, 0), profile_cpn(3, -1), profile_cpn(4, -1)):
        assert window_drift(p) <= 0.02


def test_normalization_constants():
    nm = ae_normalization(profile_cp1(1, 0))
    assert nm.lam == Fraction(1, 2)
    assert nm.lam * 1 * nm.mu == 1
    # c log rho~ with rho~ = |z~|^2: coefficient 2 in log rho~, i.e. 4 log|z~|
    assert nm.log_coeff == 2
    assert ae_normalization(profile_cpn(3, -1)).log_coeff == 0


@pytest.mark.parametrize("p", [profile_cp1(1, 0), profile_cp1(2, 0), profile_cpn(3, -1)], ids=lambda p: p.label)
def test_exact_constant_matches_numeric(p):
    assert float(ae_constant_numeric(p)) == pytest.approx(float(ae_constant(p)), abs=1e-12)


@pytest.mark.parametrize("n,d", [(2, 0.5), (3, -1.5), (4, -2 / 3), (5, -5 / 12)])
def test_leading_coefficient(n, d):
    p = profile_cp1(1, 0) if n == 2 else profile_cpn(n, -1)
    assert leading_ae_coefficient(p) == pytest.approx(d, rel=1e-6)


@pytest.mark.parametrize("n", [3, 4])
def test_next_order_consistency(n):
    fit = next_order_exponent(profile_cpn(n, -1))
    assert fit.exponent <= 2 - 2 * n + 0.1


def test_cusp_coefficient_n2(hs2):
    fit = fit_cusp_coefficient(hs2)
    assert fit.coefficient == pytest.approx(1.0, rel=0.01)
    assert fit.r_squared >= 0.999


@pytest.mark.parametrize("n", [3, 4, 5])
def test_cusp_coefficient_higher_dim(n):
    fit = fit_cusp_coefficient(profile_cpn(n, -1))
    assert fit.coefficient == pytest.approx(2 / (n * (n - 1)), rel=0.01)


def test_cusp_expected_values():
    assert expected_cusp_coefficient(2) == 1.0
    assert expected_cusp_coefficient(3) == pytest.approx(1 / 3)
    assert expected_ae_exponent(2) == -2 and expected_ae_exponent(4) == -4


def test_planted_cusp_signal():
    # F = log|z|^2 - 5 log(1 - log|z|^2), as a function of s = log|z|^2
    fit = fit_cusp_from_potential(lambda s: 1 + 5 / (1 - s), 1.0)
    assert fit.coefficient == pytest.approx(5.0, rel=1e-8)
    assert fit.extra["a"] == pytest.approx(1.0, abs=1e-6)


def test_window_validation(hs2):
    with pytest.raises(ValueError):
        fit_ae_remainder(hs2, (1.0, 100.0))
    with pytest.raises(ValueError):
        fit_cusp_coefficient(hs2, (1e-10, 1e-2))


def test_fit_json(hs2):
    d = fit_ae_remainder(hs2).to_json()
    assert {"exponent", "coefficient", "r2", "window", "n", "k"} <= set(d)
