import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sfkcusp import jets
from sfkcusp.curvature import (
    DegenerateMetricError,
    RadialKahlerPotential,
    metric_matrix,
    positivity_scan,
    potential_from_profile,
    rho_for_tau,
    scalar_curvature_fd,
    scalar_curvature_radial,
    write_reports_csv,
)
from sfkcusp.gluing import assemble_glued_potential, flat_base, make_schedule
from sfkcusp.momentum import profile_cp1, profile_cpn, scalar_curvature_momentum


def euclid(n):
    return RadialKahlerPotential(n, lambda r: r, label="flat")


def fubini_study(n):
    return RadialKahlerPotential(n, lambda r: jets.log(1 + r), label="fs")


@pytest.mark.parametrize("rho", [1e-6, 0.3, 7.0, 1e5])
def test_euclidean_is_flat(rho):
    rep = scalar_curvature_radial(euclid(3), rho)
    assert rep.scalar == 0
    assert rep.margins == (1.0, 1.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_fubini_study_constant(n):
    for rho in (0.01, 1.0, 50.0):
        rep = scalar_curvature_radial(fubini_study(n), rho)
        assert rep.scalar == pytest.approx(n * (n + 1), rel=1e-10)
        # Kahler-Einstein: both Ricci eigenvalues equal n + 1
        assert rep.ricci_eigenvalues == pytest.approx((n + 1, n + 1), rel=1e-10)


def test_hs_potential_scalar_flat_at_25(hs2):
    rep = scalar_curvature_radial(potential_from_profile(hs2), 25.0)
    assert abs(rep.scalar) <= 1e-6


@pytest.mark.parametrize(
    "p", [profile_cp1(1, 0), profile_cp1(3, 1), profile_cpn(3, -1), profile_cpn(4, -2, 0.5)], ids=lambda p: p.label
)
def test_oracle_matches_momentum_formula(p):
    pot = potential_from_profile(p)
    for tau in np.geomspace(1e-2, 1e2, 9):
        s_rad = scalar_curvature_radial(pot, rho_for_tau(p, tau)).scalar
        assert abs(s_rad - scalar_curvature_momentum(p, tau)) <= 1e-6


def test_oracle_detects_non_scalar_flat(hs2):
    # the FS potential is Kahler-Einstein with S = 6, not zero
    assert scalar_curvature_radial(fubini_study(2), 1.0).scalar > 1


@given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=10**6))
def test_determinant_identity(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    p = fubini_study(n)
    rho = float(np.vdot(z, z).real)
    rep = scalar_curvature_radial(p, rho)
    assert np.linalg.det(metric_matrix(p, z)).real == pytest.approx(rep.det_g, rel=1e-12)


def test_scale_covariance():
    p = fubini_study(3)
    for eps in (0.5, 0.1, 0.01):
        for rho in (0.2, 3.0):
            s = scalar_curvature_radial(p, rho).scalar
            s_eps = scalar_curvature_radial(p.scaled(eps), eps * eps * rho).scalar
            assert s_eps == pytest.approx(s / eps**2, rel=1e-8)


def test_finite_difference_cross_check(hs3):
    pot = potential_from_profile(hs3)
    for rho in (0.05, 2.0):
        assert scalar_curvature_fd(pot, rho) == pytest.approx(scalar_curvature_radial(pot, rho).scalar, abs=1e-4)
    assert scalar_curvature_fd(fubini_study(2), 0.7) == pytest.approx(6.0, abs=1e-4)


def test_precision_modes_agree(hs2):
    pot = potential_from_profile(hs2)
    rho = 1e-40
    mp = scalar_curvature_radial(pot, rho, precision="mp").scalar
    auto = scalar_curvature_radial(pot, rho).scalar
    assert mp == auto
    assert abs(mp) < 1e-6


def test_positivity_margins():
    assert positivity_scan(euclid(2), [0.1, 1.0, 10.0]) == 1.0
    neg = RadialKahlerPotential(2, lambda r: -r)
    assert positivity_scan(neg, [1.0]) < 0
    with pytest.raises(DegenerateMetricError):
        scalar_curvature_radial(neg, 1.0)


def test_glued_annulus_margin_positive(hs2):
    g = assemble_glued_potential(make_schedule(0.01, 2), flat_base(), hs2)
    assert positivity_scan(g.as_radial_potential(), g.annulus_grid()) > 0


def test_reports_csv(tmp_path):
    reps = [scalar_curvature_radial(fubini_study(2), r) for r in (0.5, 1.0)]
    path = tmp_path / "curv.csv"
    write_reports_csv(path, reps)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("rho,scalar")
    assert len(lines) == 3


def test_rejects_nonpositive_rho():
    with pytest.raises(ValueError):
        scalar_curvature_radial(euclid(2), 0.0)
