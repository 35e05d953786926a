"""Laplacian spectrum of CP^{n-1} and the kernel of D*D = 1/2 Delta^2 + Delta on it.

Eigenvalues are taken nonnegative, lam_j = 2 j (j + n - 1) / n, which is the
Fubini-Study spectrum rescaled so that lam_1 = 2.  On the j-th eigenspace
D*D acts by 1/2 lam^2 - lam (the Laplacian itself being -lam), so the first
eigenspace lies in the kernel.  Multiplicities are those of the bidegree
(j, j) harmonic polynomials on C^{m+1}, m = n - 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from math import comb


@dataclass(frozen=True)
class SpectrumEntry:
    level: int
    eigenvalue: Fraction
    multiplicity: int

    @property
    def lichnerowicz(self) -> Fraction:
        return self.eigenvalue**2 / 2 - self.eigenvalue


@dataclass(frozen=True)
class BaseSpectrum:
    n: int
    entries: tuple


def eigenvalue(n: int, j: int) -> Fraction:
    return Fraction(2 * j * (j + n - 1), n)


def multiplicity(n: int, j: int) -> int:
    m = n - 1
    if m == 0:
        return 1 if j == 0 else 0
    num = comb(j + m - 1, m - 1) ** 2 * (2 * j + m)
    assert num % m == 0
    return num // m


def cp_spectrum(n: int, j_max: int) -> BaseSpectrum:
    if n < 2 or j_max < 1:
        raise ValueError("need n >= 2 and j_max >= 1")
    return BaseSpectrum(n, tuple(SpectrumEntry(j, eigenvalue(n, j), multiplicity(n, j)) for j in range(j_max + 1)))


@dataclass(frozen=True)
class KernelReport:
    n: int
    nonconstant_dimension: int
    dimension_with_constants: int
    basis: str


def ker_lichnerowicz_E(n: int, j_max: int = 12) -> KernelReport:
    """Kernel of 1/2 Delta^2 + Delta, found by scanning levels for a zero of 1/2 lam^2 - lam."""
    spec = cp_spectrum(n, j_max)
    nonconst = sum(e.multiplicity for e in spec.entries if e.level > 0 and e.lichnerowicz == 0)
    const = sum(e.multiplicity for e in spec.entries if e.level == 0)
    return KernelReport(
        n=n,
        nonconstant_dimension=nonconst,
        dimension_with_constants=nonconst + const,
        basis="constants + first eigenspace (restrictions of the su(n) moment maps)",
    )


def kernel_calibration_residual(n: int) -> Fraction:
    """1/2 lam_1^2 - lam_1, exactly 0 in this normalization."""
    return cp_spectrum(n, 1).entries[1].lichnerowicz


def write_spectrum_csv(path, spec: BaseSpectrum) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "eigenvalue", "multiplicity", "lichnerowicz"])
        for e in spec.entries:
            w.writerow([e.level, str(e.eigenvalue), e.multiplicity, str(e.lichnerowicz)])
