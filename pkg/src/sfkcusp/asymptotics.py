"""Expansion coefficients of the scalar-flat metrics at the AE end and at the cusp.

Normalization.  A profile gives F(rho) with dF/ds = c_M + k tau (s = log
rho).  We rescale the metric by lam and the coordinate by mu,
Fn(rho~) = lam F(mu rho~), with lam k mu = 1 so that Fn = |z|^2 + ...
at infinity.  lam = 1/2 for n = 2 and lam = 1 for n >= 3.  Then

    Fn = rho~ + c log rho~ + const + phi_2,

with c exact (from the 1/tau^2 coefficient of 1/phi at infinity), and at
the cusp

    dFn/ds = lam c_M + C / (a - s) + ...,

i.e. Fn = lam c_M log rho~ - C log(a - log rho~) + ...
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .momentum import MomentumProfile, invert_radius, kahler_potential_f, r_raw
from .rational import WORKING_DPS


class FitQualityError(ArithmeticError):
    def __init__(self, message, fit=None):
        super().__init__(message)
        self.fit = fit


@dataclass
class PowerFit:
    exponent: float
    coefficient: float
    r_squared: float
    window: tuple
    n: int = 0
    k: int = 0
    end: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = asdict(self)
        d["r2"] = d.pop("r_squared")
        return d


MIN_R2 = 0.999


def metric_scale(n: int) -> Fraction:
    return Fraction(1, 2) if n == 2 else Fraction(1)


@dataclass(frozen=True)
class AENormalization:
    lam: Fraction
    mu: Fraction
    log_coeff: Fraction  # c in Fn = rho~ + c log rho~ + ...


def ae_normalization(p: MomentumProfile) -> AENormalization:
    lam = metric_scale(p.n)
    mu = 1 / (lam * p.bundle_k)
    # 1/phi = k/(2 tau) + b/tau^2 + ... gives tau = rho + 2b/k + O(1/rho)
    lau = p.phi.reciprocal().laurent_at_infinity(4)
    b = lau.get(-2, Fraction(0))
    return AENormalization(lam=lam, mu=mu, log_coeff=lam * (p.moment_offset + 2 * b))


# ---------------------------------------------------------------- AE end


def _mp_tau_of_log_rho(p: MomentumProfile, s):
    """tau with 2 r_raw(tau) / k = s, in mpmath (Newton from a float or asymptotic seed)."""
    k = p.bundle_k
    target = s * k / 2
    if s < 600:
        t = mpmath.mpf(invert_radius(p, float(target - r_raw(p, 1.0)), tau0=1.0))
    else:
        t = mpmath.exp(s)
    for _ in range(100):
        step = (r_raw(p, t) - target) * p.phi(t)
        t -= step
        if abs(step) < t * mpmath.mpf(10) ** (-(mpmath.mp.dps - 5)):
            break
    return t


def normalized_potential(p: MomentumProfile, rho_tilde):
    """Fn(rho~) = lam F(mu rho~) computed in mpmath."""
    nm = ae_normalization(p)
    with mpmath.workdps(WORKING_DPS):
        lam, mu = mpmath.mpf(nm.lam.numerator) / nm.lam.denominator, mpmath.mpf(nm.mu.numerator) / nm.mu.denominator
        rho = mu * mpmath.mpf(rho_tilde)
        s = mpmath.log(rho)
        tau = _mp_tau_of_log_rho(p, s)
        return lam * (p.moment_offset * s + 2 * kahler_potential_f(p, tau))


def ae_constant(p: MomentumProfile):
    """lim (Fn - rho~ - c log rho~) as rho~ -> infinity, exactly.

    With 1/phi = k/(2 tau) + b/tau^2 + ..., both r_raw - (k/2) log tau and
    f - (k/2) tau - b log tau vanish at infinity, which gives
    F = k rho + (c_M + 2b) log rho + 2b + O(1/rho) and hence
    const = c log mu + 2 lam b.
    """
    nm = ae_normalization(p)
    b = p.phi.reciprocal().laurent_at_infinity(4).get(-2, Fraction(0))
    with mpmath.workdps(WORKING_DPS):
        c = mpmath.mpf(nm.log_coeff.numerator) / nm.log_coeff.denominator
        mu = mpmath.mpf(nm.mu.numerator) / nm.mu.denominator
        return c * mpmath.log(mu) + 2 * mpmath.mpf((nm.lam * b).numerator) / (nm.lam * b).denominator


def ae_constant_numeric(p: MomentumProfile, log_rho_far: float = 57.5):
    """The same limit read off at rho~ = e^log_rho_far (cross-check)."""
    nm = ae_normalization(p)
    with mpmath.workdps(WORKING_DPS):
        rt = mpmath.exp(log_rho_far)
        c = mpmath.mpf(nm.log_coeff.numerator) / nm.log_coeff.denominator
        return normalized_potential(p, rt) - rt - c * mpmath.log(rt)


def ae_remainder(p: MomentumProfile, radii, const=None) -> np.ndarray:
    """phi_2 at |z~| = radii: Fn - |z|^2 - c log|z|^2 - const."""
    nm = ae_normalization(p)
    if const is None:
        const = ae_constant(p)
    out = []
    with mpmath.workdps(WORKING_DPS):
        c = mpmath.mpf(nm.log_coeff.numerator) / nm.log_coeff.denominator
        for R in radii:
            rt = mpmath.mpf(R) ** 2
            out.append(float(normalized_potential(p, rt) - rt - c * mpmath.log(rt) - const))
    return np.array(out)


def dyadic_radii(window, per_octave: int = 4) -> np.ndarray:
    lo, hi = window
    m = int(round(per_octave * math.log2(hi / lo)))
    return lo * 2.0 ** (np.arange(m + 1) / per_octave)


def fit_power_law(radii, values, window=None, require: bool = True, **meta) -> PowerFit:
    """Least squares of log|values| against log(radii)."""
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if np.any(values == 0) or (np.any(values > 0) and np.any(values < 0)):
        fit = PowerFit(float("nan"), float("nan"), 0.0, tuple(window or (radii[0], radii[-1])), **meta)
        if require:
            raise FitQualityError("remainder changes sign or vanishes in the window", fit)
        return fit
    x, y = np.log(radii), np.log(np.abs(values))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ np.array([slope, icpt])
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    fit = PowerFit(
        exponent=float(slope),
        coefficient=float(np.sign(values[0]) * math.exp(icpt)),
        r_squared=r2,
        window=tuple(window or (float(radii[0]), float(radii[-1]))),
        **meta,
    )
    if require and r2 < MIN_R2:
        raise FitQualityError(f"power-law fit r^2 = {r2:.6f} below {MIN_R2}", fit)
    return fit


def expected_ae_exponent(n: int) -> int:
    return -2 if n == 2 else 4 - 2 * n


def fit_ae_remainder(p: MomentumProfile, radius_window=(10.0, 1000.0), per_octave: int = 4) -> PowerFit:
    """Decay exponent and coefficient of phi_2 on the AE end, in |z~|."""
    if radius_window[0] ** 2 < 100 - 1e-9:
        raise ValueError("AE window must satisfy |z|^2 >= 100")
    radii = dyadic_radii(radius_window, per_octave)
    const = ae_constant(p)
    vals = ae_remainder(p, radii, const)
    nm = ae_normalization(p)
    fit = fit_power_law(radii, vals, radius_window, n=p.n, k=p.bundle_k, end="ae")
    fit.extra.update(
        {
            "log_coeff": str(nm.log_coeff),
            "metric_scale": str(nm.lam),
            "constant": float(const),
            "expected_exponent": expected_ae_exponent(p.n),
        }
    )
    return fit


def leading_ae_coefficient(p: MomentumProfile, far_radius: float | None = None) -> float:
    """d = lim |z|^{-q} phi_2.

    g(R) = |z|^{-q} phi_2 = d + e R^{-2} + O(R^{-4}); one Richardson step on
    R and 2R far out (by default where R^q = 1e-24) removes the e term.
    """
    q = expected_ae_exponent(p.n)
    if far_radius is None:
        far_radius = 10.0 ** (24 / -q)
    R = far_radius
    v = ae_remainder(p, [R, 2 * R])
    g1, g2 = v[0] * R ** (-q), v[1] * (2 * R) ** (-q)
    return float((4 * g2 - g1) / 3)


def next_order_exponent(p: MomentumProfile, radius_window=(10.0, 1000.0), per_octave: int = 4) -> PowerFit:
    """Decay exponent of phi_2 - d |z|^q on the window, d from the far field."""
    radii = dyadic_radii(radius_window, per_octave)
    vals = ae_remainder(p, radii)
    q = expected_ae_exponent(p.n)
    d = leading_ae_coefficient(p)
    fit = fit_power_law(radii, vals - d * radii**q, radius_window, require=False, n=p.n, k=p.bundle_k, end="ae-next")
    fit.extra["leading_coefficient"] = d
    return fit


def window_drift(p: MomentumProfile, radius_window=(10.0, 1000.0)) -> float:
    """Change in the AE exponent when the window moves one dyadic step outward."""
    a = fit_ae_remainder(p, radius_window).exponent
    b = fit_ae_remainder(p, (radius_window[0] * 2, radius_window[1] * 2)).exponent
    return abs(a - b)


# ---------------------------------------------------------------- cusp end


def expected_cusp_coefficient(n: int) -> float:
    return 1.0 if n == 2 else 2.0 / (n * (n - 1))


def cusp_slope_samples(p: MomentumProfile, s_values) -> np.ndarray:
    """dFn/ds - lam c_M = lam k tau at s = log rho~ (normalized coordinates)."""
    nm = ae_normalization(p)
    lam, mu = float(nm.lam), float(nm.mu)
    out = []
    for s in s_values:
        r = 0.5 * p.bundle_k * (s + math.log(mu))
        tau = invert_radius(p, r - float(r_raw(p, 1.0)), tau0=1.0)
        out.append(lam * p.bundle_k * tau)
    return np.array(out)


def fit_cusp_slope(s_values, slope_values, require: bool = True, **meta) -> PowerFit:
    """Fit 1/slope = (a - s)/C + g log(-s) by linear least squares.

    The log(-s) column absorbs the next order of the cusp expansion, whose
    relative size log|s|/|s| would otherwise bias C by about a percent.
    Returns C as ``coefficient``; a and g go to ``extra``.
    """
    s = np.asarray(s_values, dtype=float)
    y = 1.0 / np.asarray(slope_values, dtype=float)
    A = np.vstack([np.ones_like(s), s, np.log(-s)]).T
    (c0, c1, c2), *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ np.array([c0, c1, c2])
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot
    C = -1.0 / c1
    window = (float(np.exp(s.min())), float(np.exp(s.max()))) if s.min() > -745 else (f"e^{s.min():.1f}", f"e^{s.max():.1f}")
    fit = PowerFit(exponent=-1.0, coefficient=float(C), r_squared=r2, window=window, **meta)
    fit.extra.update({"a": float(c0 * C), "log_term": float(c2)})
    if require and r2 < MIN_R2:
        raise FitQualityError(f"cusp fit r^2 = {r2:.6f} below {MIN_R2}", fit)
    return fit


def fit_cusp_coefficient(p: MomentumProfile, depth_window=(1e-300, 1e-100), samples: int = 60) -> PowerFit:
    """Coefficient C of -log(a - log|z|^2) in the normalized potential at the cusp."""
    lo, hi = depth_window
    if hi > 1e-6:
        raise ValueError("cusp window must lie in |z|^2 <= 1e-6")
    s = np.linspace(math.log(lo), math.log(hi), samples)
    fit = fit_cusp_slope(s, cusp_slope_samples(p, s), n=p.n, k=p.bundle_k, end="cusp")
    fit.extra["expected"] = expected_cusp_coefficient(p.n)
    return fit


def fit_cusp_from_potential(dF_ds, leading_log: float, depth_window=(1e-300, 1e-100), samples: int = 60) -> PowerFit:
    """Same fit for a potential given through its s-derivative (planted signals)."""
    s = np.linspace(math.log(depth_window[0]), math.log(depth_window[1]), samples)
    slope = np.array([dF_ds(x) - leading_log for x in s])
    return fit_cusp_slope(s, slope, end="cusp")
