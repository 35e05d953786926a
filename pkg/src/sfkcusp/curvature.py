"""Curvature of U(n)-invariant Kahler metrics i dd^c F(|z|^2) on C^n minus the origin.

For g_{i jbar} = F' delta_ij + F'' zbar_i z_j the eigenvalues are F' (n-1
times, directions orthogonal to z) and F' + rho F'' (along z), so
det g = F'^{n-1} (F' + rho F'').  With L = log det g the Ricci form is
-i dd^c L, whose eigenvalues relative to g are

    -L' / F'                      (base directions, n-1 times)
    -(L' + rho L'') / (F' + rho F'')  (fibre direction)

and the scalar curvature is their sum.  Derivatives of F come from order-4
jets, so nothing here shares code with the momentum formula.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import mpmath

from . import jets
from .jets import Jet
from .momentum import MomentumProfile, r_raw, tau_jet_in_s, kahler_potential_f, _tau_of_log_rho


class DegenerateMetricError(ArithmeticError):
    pass


@dataclass
class RadialKahlerPotential:
    """F(rho) = analytic(rho) + log_coeff * log(rho).

    ``analytic`` must accept floats, mpmath numbers and jets.
    """

    n: int
    analytic: Callable
    log_coeff: float = 0.0
    derivative_order_available: int = 4
    label: str = ""

    def __call__(self, rho):
        out = self.analytic(rho)
        if self.log_coeff:
            out = out + self.log_coeff * jets.log(rho)
        return out

    def jet(self, rho, order: int = 4) -> Jet:
        """Taylor jet of F in rho at ``rho``."""
        return self.unit_jet(rho, order, scale=False)

    def unit_jet(self, rho0, order: int = 4, scale: bool = True) -> Jet:
        """Jet of u -> F(rho0 u) at u = 1 (or of F at rho0 when scale is False).

        Working in u keeps every coefficient of moderate size even when rho0
        is far below the float range of rho0**4.
        """
        one = rho0 * 0 + 1
        x = Jet([rho0, rho0] + [rho0 * 0] * (order - 1)) if scale else Jet.variable(rho0, order)
        out = self.analytic(x)
        if not isinstance(out, Jet):
            out = Jet.constant(out, order)
        if self.log_coeff:
            # c log(x): exact series, no cancellation against the analytic part
            c = self.log_coeff
            base = one if scale else rho0
            logs = [jets.log(rho0) * c] + [c * (-1) ** (j + 1) / (j * base**j) for j in range(1, order + 1)]
            out = out + Jet(logs)
        return out

    def scaled(self, eps: float) -> "RadialKahlerPotential":
        """eps^2 F(rho / eps^2)."""
        e2 = eps * eps
        a, c = self.analytic, self.log_coeff
        return RadialKahlerPotential(
            n=self.n,
            analytic=lambda r: e2 * a(r / e2) - e2 * c * math.log(e2),
            log_coeff=e2 * c,
            label=f"{self.label} scaled by {eps}",
        )


@dataclass
class CurvatureReport:
    rho: float
    scalar: float
    ricci_eigenvalues: tuple  # (fibre, base)
    det_g: float
    margins: tuple = field(default=(0.0, 0.0))  # (F', F' + rho F'')

    def as_row(self) -> dict:
        return {
            "rho": self.rho,
            "scalar": self.scalar,
            "ricci_fibre": self.ricci_eigenvalues[0],
            "ricci_base": self.ricci_eigenvalues[1],
            "det_g": self.det_g,
            "margin_base": self.margins[0],
            "margin_fibre": self.margins[1],
        }


def _metric_jets(p: RadialKahlerPotential, rho):
    """(F~', F~' + u F~'') as order-2 jets in u, where F~(u) = F(rho u).

    These equal rho F'(rho u) and rho (F' + rho u F'')(rho u), and the
    scalar curvature of i dd^c F~ at u = 1 equals that of i dd^c F at rho
    since z -> sqrt(rho) z is an isometry between them.
    """
    F = p.unit_jet(rho, 4)
    d1 = F.shift()
    d2 = d1.shift()
    u = Jet.variable(rho * 0 + 1, 2)
    base = Jet(d1.c[:3])
    fibre = base + u * d2
    return base, fibre


def _curvature_at(p: RadialKahlerPotential, rho) -> CurvatureReport:
    base, fibre = _metric_jets(p, rho)
    a, b = base.value, fibre.value
    if not (a > 0 and b > 0):
        raise DegenerateMetricError(f"metric not positive at rho={rho}: F'={a / rho}, F'+rho F''={b / rho}")
    det = base ** (p.n - 1) * fibre
    L = jets.log(det)
    L1, L2 = L.derivative(1), L.derivative(2)
    ric_base = -L1 / a
    ric_fibre = -(L1 + L2) / b
    scal = (p.n - 1) * ric_base + ric_fibre
    return CurvatureReport(
        rho=float(rho),
        scalar=float(scal),
        ricci_eigenvalues=(float(ric_fibre), float(ric_base)),
        det_g=float(det.value / rho**p.n),
        margins=(float(a / rho), float(b / rho)),
    )


def scalar_curvature_radial(
    p: RadialKahlerPotential, rho, precision: str = "auto", ill_conditioned: float = 100.0, dps: int = 34
) -> CurvatureReport:
    """Scalar curvature of i dd^c F at |z|^2 = rho.

    ``precision="auto"`` repeats the computation in mpmath when the two metric
    eigenvalues differ by more than ``ill_conditioned``: F' + rho F'' is then
    a small difference of large terms (deep in a cusp) and float jets lose
    the digits the fibre curvature needs.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if precision == "mp":
        with mpmath.workdps(dps):
            return _curvature_at(p, mpmath.mpf(rho))
    rep = _curvature_at(p, rho)
    if precision == "auto":
        a, b = rep.margins
        if max(a / b, b / a) > ill_conditioned:
            try:
                with mpmath.workdps(dps):
                    return _curvature_at(p, mpmath.mpf(rho))
            except TypeError:
                pass
    return rep


def positivity_scan(p: RadialKahlerPotential, rho_grid: Iterable[float]) -> float:
    """min over the grid of min(F', F' + rho F''); positive iff g > 0 on the samples."""
    grid = list(rho_grid)
    if not grid:
        raise ValueError("empty rho grid")
    worst = math.inf
    for rho in grid:
        base, fibre = _metric_jets(p, rho)
        worst = min(worst, float(base.value) / rho, float(fibre.value) / rho)
    return worst


def metric_matrix(p: RadialKahlerPotential, z):
    """Full n x n Hermitian matrix g_{i jbar} at a point z of C^n (complex numpy array)."""
    import numpy as np

    z = np.asarray(z, dtype=complex)
    rho = float(np.vdot(z, z).real)
    F = p.jet(rho, 2)
    d1, d2 = F.derivative(1), F.derivative(2)
    return d1 * np.eye(len(z)) + d2 * np.outer(z.conj(), z)


def scalar_curvature_fd(p: RadialKahlerPotential, rho, dps: int = 40) -> float:
    """Cross-check using mpmath central differences of L = log det g.

    The step is fixed relative to rho: the nested differences lose about
    four times its exponent in digits, and the potential is only accurate to
    the working precision.
    """
    with mpmath.workdps(dps):
        r0 = mpmath.mpf(rho)
        h = r0 * mpmath.mpf(10) ** (-dps // 5)

        def parts(r):
            d1 = mpmath.diff(p, r, 1, h=h)
            d2 = mpmath.diff(p, r, 2, h=h)
            return d1, d1 + r * d2

        def L(r):
            a, b = parts(r)
            return (p.n - 1) * mpmath.log(a) + mpmath.log(b)

        a, b = parts(r0)
        L1 = mpmath.diff(L, r0, 1, h=h)
        L2 = mpmath.diff(L, r0, 2, h=h)
        return float(-(p.n - 1) * L1 / a - (L1 + r0 * L2) / b)


def write_reports_csv(path, reports: Iterable[CurvatureReport]) -> None:
    reports = list(reports)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(reports[0].as_row()) if reports else ["rho"])
        w.writeheader()
        for rep in reports:
            w.writerow(rep.as_row())


# ---------------------------------------------------------------- from profiles


def potential_from_profile(p: MomentumProfile) -> RadialKahlerPotential:
    """F(rho) = c_M log rho + 2 f(tau(rho)) for the metric of a momentum profile.

    |z|^2 is normalized by rho = exp(2 r_raw(tau) / k).  Along s = log rho
    the moment map satisfies dtau/ds = (k/2) phi and dF/ds = c_M + k tau, so
    the analytic part G(s) = 2 f(tau(s)) has G' = k tau; its Taylor series
    is composed with s = log rho.
    """
    k = p.bundle_k

    def analytic(rho):
        rho0 = jets.value_of(rho)
        mp = jets._is_mp(rho0)
        s0 = mpmath.log(rho0) if mp else math.log(rho0)
        tau0 = _tau_of_log_rho(p, float(s0))
        if mp:
            tau0 = _polish_tau_mp(p, s0, tau0)
        G0 = 2 * kahler_potential_f(p, tau0)
        if not isinstance(rho, Jet):
            return G0
        order = rho.order
        tc = tau_jet_in_s(p, tau0, order)
        G = [G0] + [k * tc[j] / (j + 1) for j in range(order)]
        delta = jets.log(rho) - s0
        delta.c[0] = delta.c[0] * 0
        return jets.compose_taylor(G, delta)

    return RadialKahlerPotential(n=p.n, analytic=analytic, log_coeff=p.moment_offset, label=p.label)


def _polish_tau_mp(p: MomentumProfile, s0, tau0):
    target = s0 * p.bundle_k / 2
    t = mpmath.mpf(tau0)
    for _ in range(6):
        t = t - (r_raw(p, t) - target) * p.phi(t)
    return t


def rho_for_tau(p: MomentumProfile, tau) -> float:
    return float(jets.exp(2 * r_raw(p, tau) / p.bundle_k))
