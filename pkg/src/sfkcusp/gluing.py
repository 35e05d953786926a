"""The glued approximate metric on the blow-up and biharmonic boundary extensions.

Potentials are radial in rho = |z|^2.  Outside |z| = 2 r_eps the potential is
the base one, rho + phi_1(rho); inside |z| = r_eps it is eps^2 Fn(rho/eps^2)
for the normalized scalar-flat model Fn = rho~ + c log rho~ + const + phi_2;
on the annulus the two corrections are blended with gamma(|z|/r_eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from . import jets
from .asymptotics import ae_constant, ae_normalization
from .curvature import RadialKahlerPotential, positivity_scan, potential_from_profile, scalar_curvature_radial
from .jets import Jet
from .momentum import MomentumProfile


class GluingDomainError(ValueError):
    pass


class PositivityError(ArithmeticError):
    pass


# ---------------------------------------------------------------- schedule and cutoff


@dataclass(frozen=True)
class GluingSchedule:
    epsilon: float
    n: int
    r_eps: float
    R_eps: float


def make_schedule(epsilon: float, n: int) -> GluingSchedule:
    if not 0 < epsilon < 1:
        raise GluingDomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 2:
        raise GluingDomainError("n must be at least 2")
    r = epsilon ** ((2 * n - 1) / (2 * n + 1))
    return GluingSchedule(epsilon=epsilon, n=n, r_eps=r, R_eps=r / epsilon)


@dataclass(frozen=True)
class CutoffSpec:
    """Quintic smoothstep: 0 for x <= 1, 1 for x >= 2, 10t^3 - 15t^4 + 6t^5 with t = x - 1 between."""

    name: str = "quintic smoothstep"

    def __call__(self, x):
        v = jets.value_of(x)
        if v <= 1:
            return x * 0
        if v >= 2:
            return x * 0 + 1
        t = x - 1
        return t * t * t * (10 + t * (-15 + 6 * t))

    def derivative_bounds(self, order: int = 4, samples: int = 2001) -> list[float]:
        """sup |gamma^(j)| on [1, 2] for j = 0..order (one-sided at the ends)."""
        xs = np.linspace(1.0, 2.0, samples)
        out = [0.0] * (order + 1)
        for x in xs:
            t = Jet.variable(float(x) - 1.0, order)
            d = (t * t * t * (10 + t * (-15 + 6 * t))).derivatives()
            for j in range(order + 1):
                out[j] = max(out[j], abs(d[j]))
        return out


# ---------------------------------------------------------------- base metrics


@dataclass(frozen=True)
class BaseMetric:
    """Local potential rho + phi_1(rho) of the metric being blown up, with reference constant s_base."""

    name: str
    phi1: Callable
    s_base: float


def flat_base() -> BaseMetric:
    return BaseMetric("flat", lambda r: r * 0, 0.0)


def fubini_study_base(n: int) -> BaseMetric:
    return BaseMetric("fubini-study", lambda r: jets.log(1 + r) - r, float(n * (n + 1)))


def synthetic_base(n: int, coeff: float = 0.1) -> BaseMetric:
    """phi_1 = coeff rho^2; s_base is its scalar curvature at the origin, -2 coeff n (n+1)."""
    return BaseMetric(f"synthetic({coeff} rho^2)", lambda r: coeff * r * r, -2.0 * coeff * n * (n + 1))


# ---------------------------------------------------------------- glued potential


def normalized_model_potential(model: MomentumProfile) -> RadialKahlerPotential:
    """Fn(rho~) = lam F(mu rho~), so that Fn = rho~ + c log rho~ + const + phi_2."""
    nm = ae_normalization(model)
    lam, mu = float(nm.lam), float(nm.mu)
    base = potential_from_profile(model)
    cm = model.moment_offset
    shift = lam * cm * math.log(mu)

    def analytic(r):
        return lam * base.analytic(r * mu) + shift

    return RadialKahlerPotential(n=model.n, analytic=analytic, log_coeff=lam * cm, label=f"normalized {model.label}")


@dataclass
class GluedPotential:
    schedule: GluingSchedule
    base: BaseMetric
    model: MomentumProfile | None
    cutoff: CutoffSpec = field(default_factory=CutoffSpec)
    model_log_coeff: float = 0.0
    model_constant: float = 0.0
    _hs: RadialKahlerPotential | None = None

    @property
    def n(self) -> int:
        return self.schedule.n

    # pieces -----------------------------------------------------------
    def outer(self, rho):
        return rho + self.base.phi1(rho)

    def model_potential(self, rho_tilde):
        """Fn at rho~ (no eps scaling)."""
        if self._hs is None:
            return rho_tilde
        return self._hs(rho_tilde)

    def inner_shift(self) -> float:
        """Additive constant dropped from the inner potential: const + c log R_eps^2.

        Potentials are defined up to constants.  With this choice the inner
        piece is eps^2 (phi_2(rho/eps^2) + c log(rho / r_eps^2)) + rho, so only
        those two terms, which are small on the annulus, pass through the
        cutoff.
        """
        return self.model_constant + self.model_log_coeff * math.log(self.schedule.R_eps**2)

    def inner(self, rho):
        e2 = self.schedule.epsilon ** 2
        return e2 * (self.model_potential(rho / e2) - self.inner_shift())

    def phi2(self, rho_tilde):
        """Fn - rho~ - c log rho~ - const."""
        if self._hs is None:
            return rho_tilde * 0
        out = self._hs(rho_tilde) - rho_tilde - self.model_constant
        if self.model_log_coeff:
            out = out - self.model_log_coeff * jets.log(rho_tilde)
        return out

    def model_correction(self, rho):
        """eps^2 (phi_2(rho/eps^2) + c log(rho / r_eps^2)): the inner potential minus rho."""
        e2 = self.schedule.epsilon ** 2
        out = e2 * self.phi2(rho / e2)
        if self.model_log_coeff:
            out = out + e2 * self.model_log_coeff * jets.log(rho / self.schedule.r_eps**2)
        return out

    def blended_correction(self, rho):
        """gamma_1 phi_1 + gamma_2 (model correction), gamma_1 = gamma(|z| / r_eps), gamma_2 = 1 - gamma_1."""
        g1 = self.cutoff(jets.sqrt(rho) / self.schedule.r_eps)
        return g1 * self.base.phi1(rho) + (1 - g1) * self.model_correction(rho)

    def region(self, rho) -> str:
        r = math.sqrt(float(jets.value_of(rho)))
        if r >= 2 * self.schedule.r_eps:
            return "outer"
        if r <= self.schedule.r_eps:
            return "inner"
        return "annulus"

    def __call__(self, rho):
        reg = self.region(rho)
        if reg == "outer":
            return self.outer(rho)
        if reg == "inner":
            return self.inner(rho)
        return rho + self.blended_correction(rho)

    def as_radial_potential(self) -> RadialKahlerPotential:
        return RadialKahlerPotential(n=self.n, analytic=self, label="glued")

    def annulus_grid(self, count: int = 64) -> np.ndarray:
        """rho values with |z| spread over the closed annulus [r_eps, 2 r_eps] (endpoints nudged inside)."""
        r = self.schedule.r_eps
        radii = np.linspace(r * (1 + 1e-9), 2 * r * (1 - 1e-9), count)
        return radii**2


def assemble_glued_potential(schedule: GluingSchedule, base: BaseMetric, model: MomentumProfile | None) -> GluedPotential:
    """Glue ``base`` to the eps-scaled normalized ``model`` (None means a flat model)."""
    if model is None:
        return GluedPotential(schedule=schedule, base=base, model=None)
    if model.n != schedule.n:
        raise GluingDomainError(f"model dimension {model.n} differs from schedule n = {schedule.n}")
    if model.cone_beta != 0:
        raise GluingDomainError("the model must be the cuspidal member")
    nm = ae_normalization(model)
    hs = normalized_model_potential(model)
    g = GluedPotential(
        schedule=schedule,
        base=base,
        model=model,
        model_log_coeff=float(nm.log_coeff),
        model_constant=float(ae_constant(model)),
        _hs=hs,
    )
    return g


@dataclass
class GlueReport:
    epsilon: float
    n: int
    k: int
    base: str
    s_base: float
    min_margin: float
    sup_deviation: float
    sup_scaled_deviation: float
    r_eps: float
    R_eps: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def glued_scalar_deviation(g: GluedPotential, s_base: float | None = None, count: int = 64) -> GlueReport:
    """sup over the annulus of |S - s_base| and of |z|^2 |S - s_base|."""
    if s_base is None:
        s_base = g.base.s_base
    pot = g.as_radial_potential()
    grid = g.annulus_grid(count)
    margin = positivity_scan(pot, grid)
    if not margin > 0:
        raise PositivityError(f"glued metric degenerate on the annulus (margin {margin})")
    dev = 0.0
    sdev = 0.0
    for rho in grid:
        S = scalar_curvature_radial(pot, float(rho)).scalar
        dev = max(dev, abs(S - s_base))
        sdev = max(sdev, rho * abs(S - s_base))
    return GlueReport(
        epsilon=g.schedule.epsilon,
        n=g.n,
        k=g.model.bundle_k if g.model is not None else 0,
        base=g.base.name,
        s_base=s_base,
        min_margin=margin,
        sup_deviation=dev,
        sup_scaled_deviation=sdev,
        r_eps=g.schedule.r_eps,
        R_eps=g.schedule.R_eps,
    )


def deviation_sweep(n: int, epsilons, base: BaseMetric, model: MomentumProfile | None, count: int = 64):
    return [glued_scalar_deviation(assemble_glued_potential(make_schedule(e, n), base, model), count=count) for e in epsilons]


def annulus_quartic_constant(g: GluedPotential, count: int = 64) -> float:
    """sup over the annulus of |blended correction without the log term| / |z|^4.

    For n = 2 the eps^2 c log term records the change of Kahler class and is
    not part of the O(|z|^4) correction, so it is left out.
    """
    e2 = g.schedule.epsilon ** 2
    out = 0.0
    for rho in g.annulus_grid(count):
        rho = float(rho)
        g1 = g.cutoff(math.sqrt(rho) / g.schedule.r_eps)
        corr = g1 * g.base.phi1(rho) + (1 - g1) * e2 * g.phi2(rho / e2)
        out = max(out, abs(corr) / rho**2)
    return out


# ---------------------------------------------------------------- biharmonic extensions


class BoundaryDataError(ValueError):
    pass


@dataclass(frozen=True)
class HarmonicMode:
    """Coefficient of one spherical harmonic Y of ``degree`` in the boundary data h (for H) and k (for Delta H)."""

    degree: int
    h: float = 0.0
    k: float = 0.0
    label: str = ""


@dataclass(frozen=True)
class ModeSolution:
    degree: int
    label: str
    exponents: tuple  # (p1, p2): H = (a r^p1 + b r^p2) Y
    coeffs: tuple  # (a, b)
    dim: int  # real dimension N = 2n

    def radial(self, r):
        (p1, p2), (a, b) = self.exponents, self.coeffs
        return a * r**p1 + b * r**p2

    def laplacian_radial(self, r):
        # Delta(r^p Y) = (p - d)(p + d + N - 2) r^{p-2} Y
        d, N = self.degree, self.dim
        (p1, p2), (a, b) = self.exponents, self.coeffs
        return sum(c * (p - d) * (p + d + N - 2) * r ** (p - 2) for p, c in ((p1, a), (p2, b)))

    def bilaplacian_symbolic(self):
        """Delta^2 of the radial profile on the degree-d harmonic, simplified by sympy (should be 0)."""
        import sympy

        r = sympy.Symbol("r", positive=True)
        d, N = self.degree, self.dim
        (p1, p2), (a, b) = self.exponents, self.coeffs
        R = sympy.nsimplify(a) * r**p1 + sympy.nsimplify(b) * r**p2

        def lap(f):
            return sympy.diff(f, r, 2) + (N - 1) / r * sympy.diff(f, r) - d * (d + N - 2) / r**2 * f

        return sympy.simplify(lap(lap(R)))


@dataclass
class BiharmonicSolution:
    n: int
    region: str
    modes: list
    truncation_degree: int

    def boundary_mismatch(self, data) -> float:
        worst = 0.0
        for m, sol in zip(data, self.modes):
            worst = max(worst, abs(sol.radial(1.0) - m.h), abs(sol.laplacian_radial(1.0) - m.k))
        return worst

    def coefficients(self) -> dict:
        return {(m.degree, m.label): (m.exponents, m.coeffs) for m in self.modes}


def _check_modes(modes, truncation_degree):
    modes = list(modes)
    for m in modes:
        if m.degree < 0 or int(m.degree) != m.degree:
            raise BoundaryDataError(f"invalid degree {m.degree}")
        if m.degree > truncation_degree:
            raise BoundaryDataError(f"degree {m.degree} exceeds truncation degree {truncation_degree}")
    return modes


def biharmonic_interior(n: int, modes, truncation_degree: int = 8) -> BiharmonicSolution:
    """H = (a r^d + b r^{d+2}) Y per mode with H = h and Delta H = k on the unit sphere."""
    N = 2 * n
    sols = []
    for m in _check_modes(modes, truncation_degree):
        d = m.degree
        b = m.k / (4 * d + 2 * N)
        sols.append(ModeSolution(d, m.label, (d, d + 2), (m.h - b, b), N))
    return BiharmonicSolution(n, "interior", sols, truncation_degree)


def biharmonic_exterior(n: int, modes, truncation_degree: int = 8, mean_tol: float = 1e-14) -> BiharmonicSolution:
    """Decaying solutions (a r^{2-N-d} + b r^{4-N-d}) Y outside the unit ball.

    The degree-0 part of k must vanish (mean-zero condition); the degree-0
    solution is then h r^{2-2n}.
    """
    N = 2 * n
    modes = _check_modes(modes, truncation_degree)
    mean_k = sum(m.k for m in modes if m.degree == 0)
    if abs(mean_k) > mean_tol:
        raise BoundaryDataError(f"k must have zero mean on the sphere, degree-0 part is {mean_k}")
    sols = []
    for m in modes:
        d = m.degree
        p1, p2 = 2 - N - d, 4 - N - d
        lap_coeff = (p2 - d) * (p2 + d + N - 2)  # = 8 - 2N - 4d
        if lap_coeff == 0:
            if m.k != 0:
                raise BoundaryDataError("degenerate mode: Delta H is forced to vanish")
            b = 0.0
        else:
            b = m.k / lap_coeff
        sols.append(ModeSolution(d, m.label, (p1, p2), (m.h - b, b), N))
    return BiharmonicSolution(n, "exterior", sols, truncation_degree)


def decay_ratio(sol: BiharmonicSolution, radii) -> float:
    """max over radii and degree-0 modes of r^{2n-4} |H(r)|, bounded iff H = O(r^{4-2n})."""
    w = 0.0
    for m in sol.modes:
        if m.degree == 0:
            for r in radii:
                w = max(w, r ** (2 * sol.n - 4) * abs(m.radial(r)))
    return w
