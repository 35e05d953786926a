import dataclasses
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from sfkcusp.momentum import (
    MomentumProfile,
    ProfileDomainError,
    RadiusRangeError,
    completeness_report,
    invert_radius,
    invert_radius_lambert,
    is_scalar_flat_exact,
    kahler_potential_f,
    lebrun_frame,
    profile_cp1,
    profile_cpn,
    r_raw,
    radial_log_coordinate,
    resolve_denominator,
    scalar_curvature_momentum,
    symbolic_scalar_curvature,
    toda_residuals,
)
from sfkcusp.rational import RationalFunction, pdivmod, poly
from sfkcusp.specialfn import lambert_w0

TAU_GRID = np.geomspace(1e-2, 1e2, 200)
PROFILES = [profile_cp1(k, b) for k in (1, 2, 3) for b in (0, Fraction(1, 2), 1)] + [
    profile_cpn(n, -k, b) for n in (3, 4, 5) for k in (1, 2) for b in (0, Fraction(1, 2), 1)
]


# ---------------------------------------------------------------- profiles


def test_cp1_value_at_two():
    assert profile_cp1(1, 0).phi(Fraction(2)) == 2


def test_burns_simanca_is_linear():
    phi = profile_cp1(1, 1).phi
    q, rem = pdivmod(phi.num, phi.den)
    assert all(c == 0 for c in rem)
    assert list(q) == [0, 2]
    tau = sympy.Symbol("tau")
    assert sympy.cancel(phi.to_sympy(tau)) == 2 * tau


def test_cp1_cusp_boundary_conditions():
    phi = profile_cp1(3, 0).phi
    tau = sympy.Symbol("tau")
    expr = phi.to_sympy(tau)
    assert expr.subs(tau, 0) == 0
    assert sympy.diff(expr, tau).subs(tau, 0) == 0


def test_cpn_cusp_boundary_conditions():
    tau = sympy.Symbol("tau")
    expr = profile_cpn(3, -1).phi.to_sympy(tau)
    assert expr.subs(tau, 0) == 0
    assert sympy.simplify(sympy.diff(expr, tau).subs(tau, 0)) == 0


def test_cpn_n4_value_at_one():
    # 2(2 + 3/2^3 - 4/2^2) = 11/4
    assert profile_cpn(4, -1).phi(Fraction(1)) == Fraction(11, 4)


def test_cpn_matches_closed_form_in_bundle_degree():
    tau = sympy.Symbol("tau")
    for n in (3, 4, 5):
        for beta in (-1, -2, -3):
            v = 1 - beta * tau
            want = sympy.Rational(2, beta**2) * (v + (n - 1) / v ** (n - 1) - n / v ** (n - 2))
            got = profile_cpn(n, beta).phi.to_sympy(tau)
            assert sympy.simplify(got - want) == 0


@pytest.mark.parametrize("p", PROFILES, ids=lambda p: p.label)
def test_cone_angle_and_positivity(p):
    tau = sympy.Symbol("tau")
    expr = p.phi.to_sympy(tau)
    assert expr.subs(tau, 0) == 0
    assert sympy.diff(expr, tau).subs(tau, 0) == 2 * sympy.Rational(p.cone_beta)
    vals = np.array([float(p.phi(t)) for t in TAU_GRID])
    assert np.all(vals > 0)
    # at most linear growth
    assert vals[-1] / TAU_GRID[-1] < 10


def test_invalid_profiles():
    with pytest.raises(ProfileDomainError):
        profile_cp1(0)
    with pytest.raises(ProfileDomainError):
        profile_cp1(1, 2)
    with pytest.raises(ProfileDomainError):
        profile_cpn(2, -1)
    with pytest.raises(ProfileDomainError):
        profile_cpn(3, 1)


def test_record_round_trip():
    for p in PROFILES[:4] + PROFILES[-3:]:
        assert MomentumProfile.from_record(p.to_record()) == p


def test_cone_to_cusp_continuity():
    taus = np.geomspace(1e-3, 10, 40)
    base = np.array([float(profile_cp1(1, 0).phi(t)) for t in taus])
    prev = None
    for beta in (Fraction(1, 2), Fraction(1, 8), Fraction(1, 32), Fraction(1, 1024)):
        vals = np.array([float(profile_cp1(1, beta).phi(t)) for t in taus])
        gap = np.max(np.abs(vals - base))
        assert np.all(vals >= base)
        if prev is not None:
            assert gap < prev
        prev = gap
    assert prev < 1e-2


# ---------------------------------------------------------------- scalar curvature


def test_hs_scalar_flat_at_one(hs2):
    assert abs(scalar_curvature_momentum(hs2, 1.0)) <= 1e-12


def test_burns_simanca_scalar_flat_at_five():
    assert abs(scalar_curvature_momentum(profile_cp1(1, 1), 5.0)) <= 1e-12


def test_perturbed_profile_is_not_scalar_flat(hs2):
    bad = hs2.with_phi(hs2.phi + RationalFunction(poly(0, 0, 0, 1)), "perturbed")
    assert abs(scalar_curvature_momentum(bad, 1.0)) > 1
    assert not is_scalar_flat_exact(bad)


@pytest.mark.parametrize("p", PROFILES, ids=lambda p: p.label)
def test_residual_on_log_grid(p):
    assert max(abs(scalar_curvature_momentum(p, float(t))) for t in TAU_GRID) <= 1e-12


@pytest.mark.parametrize("p", PROFILES[::3], ids=lambda p: p.label)
def test_exact_symbolic_path(p):
    expr, _ = symbolic_scalar_curvature(p)
    assert expr == 0


def test_domain_error_for_nonpositive_tau(hs2):
    with pytest.raises(ProfileDomainError):
        scalar_curvature_momentum(hs2, 0.0)


# ---------------------------------------------------------------- r and f


def test_radial_coordinate_vanishes_at_basepoint(hs2):
    assert radial_log_coordinate(hs2, 1.0) == 0


def test_radial_coordinate_closed_form(hs2):
    assert radial_log_coordinate(hs2, 2.0) == pytest.approx(0.5 * math.log(2) + 0.5, abs=1e-14)


def test_radial_coordinate_quadrature_agrees(hs3):
    for t in (0.01, 0.3, 4.0, 80.0):
        assert radial_log_coordinate(hs3, t, method="quad") == pytest.approx(radial_log_coordinate(hs3, t), abs=1e-10)


def test_radial_coordinate_large_tau_series(hs3):
    # r = 1/2 log(1 + tau) + const + d1 (1 + tau)^{-2} + O(tau^{-3}) for n = 3
    taus = np.array([200.0, 400.0, 800.0, 1600.0])
    res = np.array([radial_log_coordinate(hs3, t) - 0.5 * math.log1p(t) for t in taus])
    A = np.vstack([np.ones_like(taus), (1 + taus) ** -2]).T
    coef, *_ = np.linalg.lstsq(A, res, rcond=None)
    for t in (100.0, 3000.0):
        pred = coef[0] + coef[1] * (1 + t) ** -2
        assert radial_log_coordinate(hs3, t) - 0.5 * math.log1p(t) == pytest.approx(pred, abs=1e-6)


def test_potential_closed_forms():
    assert kahler_potential_f(profile_cp1(1, 0), 1.0) == pytest.approx(0.5, abs=1e-15)
    assert kahler_potential_f(profile_cp1(2, 0), math.e) == pytest.approx(1 + math.e, abs=1e-14)


def test_potential_large_tau(hs3):
    # f - tau/2 + 1/2 log(1 + tau) decays like (1 + tau)^{2-n}; here exactly -3/(2 tau) + O(tau^-2)
    taus = np.geomspace(1e2, 1e5, 10)
    rem = np.array([kahler_potential_f(hs3, t) - 0.5 * t + 0.5 * math.log1p(t) for t in taus])
    slope = np.polyfit(np.log1p(taus), np.log(np.abs(rem)), 1)[0]
    assert slope == pytest.approx(-1.0, abs=0.01)
    assert rem[-1] * taus[-1] == pytest.approx(-1.5, rel=1e-3)


@given(st.floats(min_value=-3, max_value=3))
def test_round_trip(log10tau):
    tau = 10.0**log10tau
    p = profile_cp1(2, 0)
    assert abs(invert_radius(p, radial_log_coordinate(p, tau)) - tau) / tau <= 1e-10


def test_round_trip_three():
    for p in (profile_cp1(1, 0), profile_cpn(3, -1), profile_cpn(4, -2, Fraction(1, 2))):
        assert invert_radius(p, radial_log_coordinate(p, 3.0)) == pytest.approx(3.0, rel=1e-10)


def test_deep_cusp_monotone(hs2):
    rs = [-5.0, -50.0, -500.0, -5000.0]
    taus = [invert_radius(hs2, r) for r in rs]
    assert all(0 < b < a for a, b in zip(taus, taus[1:]))


def test_lambert_identity_in_cusp(hs2):
    r = 0.5 * math.log(1e-8) - float(r_raw(hs2, 1.0))
    want = 2 / lambert_w0(2e8).w
    assert invert_radius(hs2, r) == pytest.approx(want, rel=1e-12)
    assert invert_radius_lambert(hs2, r) == pytest.approx(want, rel=1e-12)


def test_radius_out_of_range():
    # the cone profile reaches tau = 0 at finite r
    p = profile_cp1(1, 1)
    with pytest.raises(RadiusRangeError):
        invert_radius(p, -1e6)


# ---------------------------------------------------------------- completeness


def test_hs_completeness(hs2):
    rep = completeness_report(hs2)
    assert rep.complete and rep.cusp_at_0 and rep.finite_cusp_area


def test_burns_simanca_closes_at_finite_distance():
    rep = completeness_report(profile_cp1(1, 1))
    assert not rep.s_integral_diverges_at_0
    assert rep.s_integral_diverges_at_inf


def test_quadratic_profile_is_cusp_type(hs2):
    rep = completeness_report(hs2.with_phi(RationalFunction(poly(0, 0, 1)), "tau^2"))
    assert rep.cusp_at_0


# ---------------------------------------------------------------- LeBrun frame


def test_toda_denominator_resolution():
    best, scores = resolve_denominator(1, 0)
    assert best == 4.0
    assert scores[2.0] > 1e-2


@pytest.mark.parametrize("beta,point", [(0, (0.0, 0.0, 1.0)), (1, (1.0, 1.0, 2.0))])
def test_toda_examples(beta, point):
    ru, rw = toda_residuals(lebrun_frame(1, beta), point)
    assert abs(ru) <= 1e-8 and abs(rw) <= 1e-8


def test_toda_negative_control():
    fr = dataclasses.replace(lebrun_frame(1, 0), w_shift=1.0)
    _, rw = toda_residuals(fr, (0.3, 0.2, 1.0))
    assert abs(rw) > 1e-3


def test_w_is_reciprocal_phi():
    fr = lebrun_frame(2, Fraction(1, 2))
    p = profile_cp1(2, Fraction(1, 2))
    for t in (0.1, 1.0, 7.0):
        assert fr.w(0.0, 0.0, t) == pytest.approx(1 / float(p.phi(t)), rel=1e-14)
