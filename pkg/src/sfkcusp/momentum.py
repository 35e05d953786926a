"""Momentum profiles on O(-k) over CP^m and the quantities built from them.

A profile phi(tau) on (0, inf) defines an S^1-invariant Kahler metric on the
total space of O(-k) minus the zero section.  Two normalizations are used:

* ``"cp1"``: m = 1, omega_M = 2 omega_FS, so Q = 1 + k tau / 2 and
  Scal(g_M(tau)) = 1 / Q.
* ``"fs"``: omega_M = omega_FS with Ric = (m+1) omega_FS, so with
  v = 1 + k tau, Q = v^m and Scal(g_M(tau)) = m (m+1) / v.

The moment coordinate x = dF/ds (s = log |z|^2) is c_M + k tau with
c_M = 2 resp. 1, and ds/dtau = 2 / (k phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np
from scipy import integrate, optimize

from . import jets
from .jets import Jet
from .rational import RationalFunction, antiderivative, pmul, poly, ppow, pscale, padd
from .specialfn import lambert_w0_exp

NORMALIZATIONS = ("cp1", "fs")


class ProfileDomainError(ValueError):
    pass


class RadiusRangeError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class MomentumProfile:
    base_dim: int
    bundle_k: int
    cone_beta: Fraction
    phi: RationalFunction
    Q: RationalFunction
    scal_base: RationalFunction
    normalization: str = "cp1"
    label: str = ""

    @property
    def n(self) -> int:
        """Complex dimension of the total space."""
        return self.base_dim + 1

    @property
    def moment_offset(self) -> int:
        """c_M: the value of dF/ds on the zero section."""
        return 2 if self.normalization == "cp1" else 1

    def with_phi(self, phi: RationalFunction, label: str = "") -> "MomentumProfile":
        return replace(self, phi=phi, label=label or f"{self.label} (modified)")

    def to_record(self) -> dict:
        return {
            "m": self.base_dim,
            "k": self.bundle_k,
            "beta": float(self.cone_beta),
            "beta_exact": str(self.cone_beta),
            "normalization": self.normalization,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "MomentumProfile":
        beta = Fraction(rec.get("beta_exact", repr(float(rec.get("beta", 0)))))
        if rec["normalization"] == "cp1":
            return profile_cp1(int(rec["k"]), beta)
        return profile_cpn(int(rec["m"]) + 1, -int(rec["k"]), cone_beta=beta)


def _check_beta(beta) -> Fraction:
    b = _as_fraction(beta)
    if not 0 <= b <= 1:
        raise ProfileDomainError(f"cone parameter must lie in [0, 1], got {beta}")
    return b


def profile_cp1(k: int, beta=0) -> MomentumProfile:
    """phi(tau) = tau (tau + 2 beta) / (1 + k tau / 2) over CP^1."""
    if int(k) != k or k < 1:
        raise ProfileDomainError(f"k must be a positive integer, got {k}")
    b = _check_beta(beta)
    Q = poly(1, Fraction(k, 2))
    phi = RationalFunction(poly(0, 2 * b, 1), Q)
    return MomentumProfile(
        base_dim=1,
        bundle_k=int(k),
        cone_beta=b,
        phi=phi,
        Q=RationalFunction(Q),
        scal_base=RationalFunction((Fraction(1),), Q),
        normalization="cp1",
        label=f"cp1(k={k}, beta={b})",
    )


def profile_cpn(n: int, bundle_beta: int = -1, cone_beta=0) -> MomentumProfile:
    """Scalar-flat profile on O(bundle_beta) over CP^{n-1}, n >= 3.

    With k = -bundle_beta and v = 1 + k tau,

        phi = [ (2/k^2)(v^n - 1) + (2 cone_beta - 2n/k) tau ] / v^{n-1},

    which for cone_beta = 0 is the cuspidal profile of the higher-dimensional
    construction and in general has phi(0) = 0, phi'(0) = 2 cone_beta.
    """
    if int(n) != n or n < 3:
        raise ProfileDomainError("profile_cpn needs n >= 3; use profile_cp1 for n = 2")
    if int(bundle_beta) != bundle_beta or bundle_beta > -1:
        raise ProfileDomainError(f"bundle_beta must be a negative integer, got {bundle_beta}")
    k = -int(bundle_beta)
    b = _check_beta(cone_beta)
    v = poly(1, k)
    vn = ppow(v, n)
    num = padd(pscale(padd(vn, (Fraction(-1),)), Fraction(2, k * k)), poly(0, 2 * b - Fraction(2 * n, k)))
    Q = ppow(v, n - 1)
    return MomentumProfile(
        base_dim=n - 1,
        bundle_k=k,
        cone_beta=b,
        phi=RationalFunction(num, Q),
        Q=RationalFunction(Q),
        scal_base=RationalFunction((Fraction(n * (n - 1)),), v),
        normalization="fs",
        label=f"cpn(n={n}, k={k}, beta={b})",
    )


def custom_profile(phi: RationalFunction, like: MomentumProfile, label: str = "custom") -> MomentumProfile:
    """Profile sharing Q and the base data of ``like`` but with another phi."""
    return like.with_phi(phi, label)


def _check_tau(tau):
    if not tau > 0:
        raise ProfileDomainError(f"tau must be positive, got {tau}")


# ---------------------------------------------------------------- curvature


def scalar_curvature_momentum(p: MomentumProfile, tau) -> float:
    """Scal(g_M(tau)) - (Q phi)'' / (2 Q), with the second derivative from jets."""
    _check_tau(tau)
    t = Jet.variable(tau, 2)
    qphi = p.Q(t) * p.phi(t)
    return p.scal_base(tau) - qphi.derivative(2) / (2 * p.Q(tau))


def symbolic_scalar_curvature(p: MomentumProfile):
    """Exact sympy expression for the scalar curvature as a function of tau."""
    import sympy

    tau = sympy.Symbol("tau", positive=True)
    Q = p.Q.to_sympy(tau)
    S = p.scal_base.to_sympy(tau) - sympy.diff(Q * p.phi.to_sympy(tau), tau, 2) / (2 * Q)
    return sympy.simplify(sympy.together(S)), tau


def is_scalar_flat_exact(p: MomentumProfile) -> bool:
    expr, _ = symbolic_scalar_curvature(p)
    return expr == 0


# ---------------------------------------------------------------- coordinates


def _r_integrand(p: MomentumProfile) -> RationalFunction:
    return p.phi.reciprocal()


def _f_integrand(p: MomentumProfile) -> RationalFunction:
    return p.phi.reciprocal().times_x()


def r_raw(p: MomentumProfile, tau):
    """Antiderivative of 1/phi without additive constant.

    For the profiles here r_raw(tau) - (k/2) log tau -> 0 as tau -> inf, which
    is the normalization where |z|^2 = exp(2 r / k) is asymptotically
    Euclidean.
    """
    return antiderivative(_r_integrand(p))(tau)


def radial_log_coordinate(p: MomentumProfile, tau, tau0=1.0, method: str = "exact"):
    """r(tau) = int_{tau0}^{tau} dx / phi(x).

    ``method="exact"`` uses the partial-fraction antiderivative;
    ``method="quad"`` integrates adaptively in log tau with scipy.
    """
    _check_tau(tau)
    _check_tau(tau0)
    if method == "exact":
        A = antiderivative(_r_integrand(p))
        return A(tau) - A(tau0)
    if method == "quad":
        return _quad_log(lambda x: 1.0 / float(p.phi(x)), float(tau0), float(tau))
    raise ValueError(f"unknown method {method!r}")


def _quad_log(g: Callable[[float], float], a: float, b: float) -> float:
    if a == b:
        return 0.0
    lo, hi = math.log(a), math.log(b)
    val, err, *rest = integrate.quad(
        lambda u: g(math.exp(u)) * math.exp(u), lo, hi, epsabs=0, epsrel=1e-13, limit=400, full_output=1
    )
    if len(rest) >= 2 and rest[0] and "roundoff" not in str(rest[1]):
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {rest[1]} (err {err:.2e})")
    return val


def kahler_potential_f(p: MomentumProfile, tau, method: str = "exact"):
    """f(tau) = int tau / phi dtau, normalized to carry no additive constant.

    For the cuspidal CP^1 profile this is exactly log tau + k tau / 2.
    """
    _check_tau(tau)
    B = antiderivative(_f_integrand(p))
    if method == "exact":
        return B(tau)
    if method == "quad":
        return B(1.0) + _quad_log(lambda x: x / float(p.phi(x)), 1.0, float(tau))
    raise ValueError(f"unknown method {method!r}")


def invert_radius(p: MomentumProfile, r: float, tau0=1.0, tol: float = 1e-13) -> float:
    """tau with radial_log_coordinate(p, tau, tau0) = r.

    Root of u -> A(e^u) - A(tau0) - r in u = log tau (monotone, derivative
    tau / phi), bracketed by expansion and solved with Brent's method.
    """
    target = float(r) + float(r_raw(p, tau0))
    if not math.isfinite(target):
        raise RadiusRangeError(f"r = {r} is not finite")
    A = antiderivative(_r_integrand(p))

    def g(u):
        return A.eval_float(math.exp(u)) - target

    lo, hi = -1.0, 1.0
    while g(lo) >= 0:
        if lo <= -700:
            raise RadiusRangeError(f"r = {r} maps below the floating-point tau range")
        lo = max(2 * lo - 1, -700.0)
    while g(hi) <= 0:
        if hi >= 700:
            raise RadiusRangeError(f"r = {r} maps above the floating-point tau range")
        hi = min(2 * hi + 1, 700.0)
    scale = max(1.0, abs(target))
    u = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    # one Newton polish with the exact derivative tau / phi
    tau = math.exp(u)
    step = g(u) / (tau / float(p.phi(tau)))
    if abs(step) < 1e-6:
        u -= step
    if abs(g(u)) > tol * scale * 100:
        raise RadiusRangeError(f"inversion residual {abs(g(u)):.3e} too large at r = {r}")
    return math.exp(u)


def invert_radius_lambert(p: MomentumProfile, r: float, tau0=1.0) -> float:
    """Closed-form inverse for the cuspidal CP^1 profile.

    From (k/2) log tau - 1/tau = R one gets tau = (2/k) / W((2/k) e^{-2R/k}).
    """
    if p.normalization != "cp1" or p.cone_beta != 0:
        raise ProfileDomainError("the Lambert inverse applies to cuspidal CP^1 profiles only")
    k = p.bundle_k
    R = float(r) + float(r_raw(p, tau0))
    w = lambert_w0_exp(math.log(2.0 / k) - 2.0 * R / k)
    return (2.0 / k) / w


def rho_of_tau(p: MomentumProfile, tau):
    """|z|^2 = exp(2 r_raw / k) in the asymptotically Euclidean normalization."""
    return jets.exp(2 * r_raw(p, tau) / p.bundle_k)


def tau_of_rho(p: MomentumProfile, rho: float) -> float:
    return _tau_of_log_rho(p, math.log(rho))


def _tau_of_log_rho(p: MomentumProfile, s: float) -> float:
    r_target = 0.5 * p.bundle_k * s
    return invert_radius(p, r_target - float(r_raw(p, 1.0)), tau0=1.0)


def tau_jet_in_s(p: MomentumProfile, tau0, order: int):
    """Taylor coefficients of tau(s0 + delta) solving dtau/ds = (k/2) phi(tau)."""
    half_k = p.bundle_k / 2 if not jets._is_mp(tau0) else mpmath.mpf(p.bundle_k) / 2
    return jets.taylor_of_autonomous_ode(lambda t: p.phi(t) * half_k, tau0, order)


# ---------------------------------------------------------------- completeness


@dataclass
class CompletenessReport:
    r_integral_diverges_at_0: bool
    r_integral_diverges_at_inf: bool
    s_integral_diverges_at_0: bool
    s_integral_diverges_at_inf: bool
    cusp_at_0: bool
    finite_cusp_area: bool
    growth_ratios: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return self.s_integral_diverges_at_0 and self.s_integral_diverges_at_inf

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["complete"] = self.complete
        return d


def _dyadic_increments(g, toward_zero: bool, start: int = 8, count: int = 40):
    out = []
    for j in range(start, start + count):
        a, b = (2.0 ** (-j - 1), 2.0 ** (-j)) if toward_zero else (2.0**j, 2.0 ** (j + 1))
        val, _ = integrate.quad(lambda u: g(math.exp(u)) * math.exp(u), math.log(a), math.log(b), epsrel=1e-10)
        out.append(val)
    return np.array(out)


def _diverges(increments: np.ndarray, threshold: float = 0.98) -> tuple[bool, float]:
    # convergent power-law tails shrink by a fixed factor < 1 per dyadic step;
    # divergent ones (log or power) keep or grow their size
    tail = increments[-10:]
    ratio = float(np.exp(np.mean(np.diff(np.log(np.abs(tail) + 1e-300)))))
    return ratio >= threshold, ratio


def completeness_report(p: MomentumProfile) -> CompletenessReport:
    """Numerical divergence test of int dtau/phi and int dtau/sqrt(phi) at both ends.

    The s-integral measures distance to the level sets; the fibre area of
    {tau < tau_1} is 2 pi tau_1 in moment coordinates, hence always finite.
    """
    inv = lambda x: 1.0 / float(p.phi(x))
    inv_sqrt = lambda x: 1.0 / math.sqrt(float(p.phi(x)))
    ratios = {}
    flags = {}
    for name, g in (("r", inv), ("s", inv_sqrt)):
        for end, toward_zero in (("0", True), ("inf", False)):
            div, ratio = _diverges(_dyadic_increments(g, toward_zero))
            flags[f"{name}_{end}"] = div
            ratios[f"{name}_{end}"] = ratio
    phi0 = float(p.phi(Jet.variable(0.0, 1)).derivative(1)) if float(p.phi.num[0]) == 0 else float("nan")
    cusp = flags["s_0"] and phi0 == 0
    return CompletenessReport(
        r_integral_diverges_at_0=flags["r_0"],
        r_integral_diverges_at_inf=flags["r_inf"],
        s_integral_diverges_at_0=flags["s_0"],
        s_integral_diverges_at_inf=flags["s_inf"],
        cusp_at_0=cusp,
        finite_cusp_area=cusp,
        growth_ratios=ratios,
    )


# ---------------------------------------------------------------- LeBrun ansatz


@dataclass(frozen=True)
class LeBrunFrame:
    """g = e^u w (dx^2 + dy^2) + w dtau^2 + w^{-1} theta^2 for a CP^1 profile.

    u = log(tau (tau + 2 beta)) - 2 log(1 + (x^2 + y^2) / D) and
    w = (1 + k tau / 2) / (tau (tau + 2 beta)) = 1 / phi.
    The connection form theta is not needed for the residuals.
    """

    k: int
    beta: Fraction
    denominator: float = 4.0
    w_shift: float = 0.0
    theta_model: str = "connection with curvature d(theta) determined by u, w"

    def u(self, x, y, tau):
        return jets.log(tau * (tau + 2 * float(self.beta))) - 2 * jets.log(1 + (x * x + y * y) / self.denominator)

    def w(self, x, y, tau):
        return (1 + self.k * tau / 2) / (tau * (tau + 2 * float(self.beta))) + self.w_shift


def lebrun_frame(k: int, beta=0, denominator: float = 4.0) -> LeBrunFrame:
    return LeBrunFrame(k=int(k), beta=_check_beta(beta), denominator=float(denominator))


def _second_partial(fun, point, axis: int):
    args = [Jet.constant(float(c), 2) for c in point]
    args[axis] = Jet.variable(float(point[axis]), 2)
    return fun(*args).derivative(2)


def toda_residuals(frame: LeBrunFrame, point) -> tuple[float, float]:
    """Residuals of u_xx + u_yy + (e^u)_tautau = 0 and w_xx + w_yy + (w e^u)_tautau = 0."""
    x, y, tau = point
    if not tau > 0:
        raise ProfileDomainError(f"tau must be positive, got {tau}")
    eu = lambda a, b, c: jets.exp(frame.u(a, b, c))
    weu = lambda a, b, c: frame.w(a, b, c) * jets.exp(frame.u(a, b, c))
    res_u = _second_partial(frame.u, point, 0) + _second_partial(frame.u, point, 1) + _second_partial(eu, point, 2)
    res_w = _second_partial(frame.w, point, 0) + _second_partial(frame.w, point, 1) + _second_partial(weu, point, 2)
    return float(res_u), float(res_w)


def resolve_denominator(k: int, beta=0, candidates=(2.0, 4.0), points=None) -> tuple[float, dict]:
    """Pick the u-denominator scale with the smallest Toda residual."""
    if points is None:
        points = [(0.3, -0.7, 0.5), (1.0, 1.0, 2.0), (-2.0, 0.5, 5.0)]
    scores = {}
    for d in candidates:
        fr = lebrun_frame(k, beta, d)
        scores[d] = max(max(abs(v) for v in toda_residuals(fr, pt)) for pt in points)
    best = min(scores, key=scores.get)
    return best, scores
