"""Model Lichnerowicz operator on the cusp cylinder and its indicial roots.

On S^1-invariant functions f(t) Y(E), with Y an eigenfunction of the base
Laplacian (Delta_E Y = -lam Y, lam >= 0) and D*_E D_E Y = mu Y, the model
operator acts on e^{s t} Y by the indicial polynomial

    P(s) = 1/2 sigma^2 + lam sigma - 1/2 sigma + mu,   sigma = s^2 - s.

The sign of the cross term is fixed by requiring the first CP^{n-1}
eigenspace (lam = 2, mu = 0) to give the roots s = 0, 1 of a kernel mode.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import ae_normalization
from .momentum import MomentumProfile, invert_radius, r_raw
from .spectral import cp_spectrum, ker_lichnerowicz_E


class WeightOnWallError(ValueError):
    pass


class FitQualityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class IndicialProblem:
    base_eigenvalue: float
    lich_eigenvalue: float | None = None

    @property
    def mu(self) -> float:
        if self.lich_eigenvalue is not None:
            return self.lich_eigenvalue
        lam = self.base_eigenvalue
        return 0.5 * lam * lam - lam


def model_operator_symbol(problem: IndicialProblem, s: complex) -> complex:
    sigma = s * s - s
    return 0.5 * sigma * sigma + problem.base_eigenvalue * sigma - 0.5 * sigma + problem.mu


def quartic_coefficients(problem: IndicialProblem) -> list:
    """Descending coefficients of P(s) = 1/2 s^4 - s^3 + lam s^2 - (lam - 1/2) s + mu."""
    lam, mu = problem.base_eigenvalue, problem.mu
    return [0.5, -1.0, lam, -(lam - 0.5), mu]


@dataclass
class IndicialSpectrum:
    roots: list  # complex s-roots of one mode, or the union over modes
    kappa: float  # smallest strictly positive real root
    min_positive_real_part: float = math.inf
    sigma_roots: list = field(default_factory=list)


def _kappa(roots, tol: float = 1e-9) -> tuple[float, float]:
    real_pos = [r.real for r in roots if abs(r.imag) <= tol and r.real > tol]
    all_pos = [r.real for r in roots if r.real > tol]
    return (min(real_pos) if real_pos else math.inf, min(all_pos) if all_pos else math.inf)


def sigma_roots(problem: IndicialProblem) -> list:
    """Roots of 1/2 sigma^2 + (lam - 1/2) sigma + mu."""
    b = problem.base_eigenvalue - 0.5
    disc = complex(b * b - 2 * problem.mu)
    sq = np.sqrt(disc)
    return [-b + sq, -b - sq]


def roots_from_sigma(problem: IndicialProblem) -> list:
    out = []
    for sg in sigma_roots(problem):
        q = np.sqrt(complex(0.25 + sg))
        out.extend([0.5 + q, 0.5 - q])
    return out


def indicial_roots(problem: IndicialProblem) -> IndicialSpectrum:
    """Roots via the eigenvalues of the companion matrix (numpy.roots)."""
    roots = [complex(r) for r in np.roots(quartic_coefficients(problem))]
    roots.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    k, m = _kappa(roots)
    return IndicialSpectrum(roots=roots, kappa=k, min_positive_real_part=m, sigma_roots=sigma_roots(problem))


def pairing_error(problem: IndicialProblem) -> float:
    """Distance between the companion-matrix roots and those rebuilt from sigma."""
    a = indicial_roots(problem).roots
    b = list(roots_from_sigma(problem))
    err = 0.0
    for r in a:
        j = min(range(len(b)), key=lambda i: abs(b[i] - r))
        err = max(err, abs(b[j] - r))
        b.pop(j)
    return err


@dataclass
class KappaReport:
    kappa: float
    min_positive_real_part: float
    running_min: list
    monotone: bool
    rows: list


def smallest_positive_root(n: int, j_max: int = 6) -> KappaReport:
    if j_max < 2:
        raise ValueError("j_max must be at least 2")
    spec = cp_spectrum(n, j_max)
    running, rows = [], []
    kappa, mpr = math.inf, math.inf
    for e in spec.entries:
        sp = indicial_roots(IndicialProblem(float(e.eigenvalue), float(e.lichnerowicz)))
        kappa = min(kappa, sp.kappa)
        mpr = min(mpr, sp.min_positive_real_part)
        running.append(kappa)
        rows.append((e.level, float(e.eigenvalue), float(e.lichnerowicz), sp.roots, kappa))
    monotone = all(b <= a for a, b in zip(running, running[1:]))
    return KappaReport(kappa=kappa, min_positive_real_part=mpr, running_min=running, monotone=monotone, rows=rows)


def write_spectrum_table(path, report: KappaReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mode", "lambda_E", "mu_E", "roots", "kappa_running_min"])
        for j, lam, mu, roots, k in report.rows:
            w.writerow([j, lam, mu, " ".join(f"{r.real:.12g}{r.imag:+.12g}j" for r in roots), k])


# ---------------------------------------------------------------- index


@dataclass
class IndexReport:
    n: int
    eta: float
    delta: float
    ae_local: int
    cusp_local: int
    index: int


def ae_local_index(delta: float) -> int:
    """Local contribution of the AE end for weights delta in (0, 1)."""
    if delta in (0.0, 1.0):
        raise WeightOnWallError(f"delta = {delta} is an indicial weight of the Euclidean end")
    if not 0 < delta < 1:
        raise WeightOnWallError(f"delta = {delta} lies outside the window (0, 1)")
    return 1


def cusp_local_index(n: int, eta: float, kappa: float | None = None) -> int:
    if kappa is None:
        kappa = smallest_positive_root(n).kappa
    if eta == 0 or eta == kappa:
        raise WeightOnWallError(f"eta = {eta} is an indicial weight")
    if not 0 < eta < kappa:
        raise WeightOnWallError(f"eta = {eta} lies outside the window (0, {kappa})")
    return -ker_lichnerowicz_E(n).nonconstant_dimension


def fredholm_index(n: int, eta: float, delta: float) -> IndexReport:
    a = ae_local_index(delta)
    c = cusp_local_index(n, eta)
    return IndexReport(n=n, eta=eta, delta=delta, ae_local=a, cusp_local=c, index=a + c)


# ---------------------------------------------------------------- model vs full metric


def cusp_model_coefficient(n: int) -> float:
    return 1.0 / (n * (n - 1))


def dt2_coefficient(p: MomentumProfile, t: float, lam_t: float = 2.0) -> float:
    """Coefficient of dt^2 in the normalized metric, t = log(lam_t - log|z~|^2).

    The radial part of i dd^c Fn(s) is Fn_ss ds^2 / 2 and ds = -e^t dt, while
    Fn_ss = lam k dtau/ds = lam k^2 phi(tau) / 2.
    """
    nm = ae_normalization(p)
    lam, mu, k = float(nm.lam), float(nm.mu), p.bundle_k
    s = lam_t - math.exp(t)
    r = 0.5 * k * (s + math.log(mu))
    tau = invert_radius(p, r - float(r_raw(p, 1.0)), tau0=1.0)
    fss = lam * k * k * float(p.phi(tau)) / 2
    return 0.5 * fss * math.exp(2 * t)


@dataclass
class DecayFit:
    rate: float
    amplitude: float
    r_squared: float
    t_window: tuple
    max_difference: float


def fit_exponential_decay(t, diff) -> DecayFit:
    t = np.asarray(t, dtype=float)
    d = np.abs(np.asarray(diff, dtype=float))
    if np.all(d == 0):
        return DecayFit(math.inf, 0.0, 1.0, (float(t[0]), float(t[-1])), 0.0)
    if np.any(d == 0):
        raise FitQualityError("difference vanishes at some but not all points")
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, np.log(d), rcond=None)
    y = np.log(d)
    r2 = 1 - float(np.sum((y - A @ [slope, icpt]) ** 2)) / float(np.sum((y - y.mean()) ** 2))
    return DecayFit(-float(slope), float(math.exp(icpt)), r2, (float(t[0]), float(t[-1])), float(d.max()))


def model_vs_full_decay(p: MomentumProfile, t_grid=None, lam_t: float = 2.0) -> DecayFit:
    """Fit |a(t) - 1/(n(n-1))| ~ A e^{-rate t} for the dt^2 coefficient a(t)."""
    if t_grid is None:
        t_grid = np.linspace(10.0, 24.0, 29)
    target = cusp_model_coefficient(p.n)
    diff = [dt2_coefficient(p, float(t), lam_t) - target for t in t_grid]
    fit = fit_exponential_decay(t_grid, diff)
    if fit.r_squared < 0.99:
        raise FitQualityError(f"exponential fit r^2 = {fit.r_squared:.5f}")
    return fit
