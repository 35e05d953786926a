"""Logarithmic cusp coordinate and doubly weighted sup norms on sampled functions.

Near the exceptional divisor we use t = log(lam - log|z|^2); a cusp sample
is weighted by e^{eta t}.  On the AE end a function is rescaled on each
dyadic annulus, f_R(z) = R^{-delta} f(R z), so its j-th derivative picks
up R^{j - delta}.  The norm is the sum of the two contributions; samples
tagged "annulus" enter both.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field

DEFAULT_LAMBDA = 2.0
REGIONS = ("cusp", "annulus", "ae")


class WeightDomainError(ValueError):
    pass


class IncompleteDataError(ValueError):
    pass


def t_coordinate(z_sq: float, lam: float = DEFAULT_LAMBDA) -> float:
    if not z_sq > 0:
        raise WeightDomainError(f"|z|^2 must be positive, got {z_sq}")
    arg = lam - math.log(z_sq)
    if not arg > 0:
        raise WeightDomainError(f"lam - log|z|^2 = {arg} is not positive")
    return math.log(arg)


def z_sq_of_t(t: float, lam: float = DEFAULT_LAMBDA) -> float:
    return math.exp(lam - math.exp(t))


@dataclass(frozen=True)
class Sample:
    """One sample: ``coordinate`` is t for cusp samples and the radius |z| otherwise.

    ``derivatives[j]`` is the j-th derivative in that coordinate.
    """

    region: str
    coordinate: float
    derivatives: tuple


@dataclass
class WeightedSampleSet:
    samples: list
    eta: float
    delta: float
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        for s in self.samples:
            if s.region not in REGIONS:
                raise ValueError(f"unknown region {s.region!r}")
            if s.region != "cusp" and s.coordinate < 1:
                raise ValueError("annulus and AE samples need radius >= 1")


@dataclass
class WeightedNorm:
    total: float
    cusp_part: float
    ae_part: float
    window_norms: dict = field(default_factory=dict)
    lam: float = DEFAULT_LAMBDA


def _derivs(s: Sample, order: int):
    if len(s.derivatives) < order + 1:
        raise IncompleteDataError(
            f"sample at {s.region} {s.coordinate} has {len(s.derivatives)} values, needs {order + 1}"
        )
    return s.derivatives[: order + 1]


def weighted_norm(ss: WeightedSampleSet, order: int) -> WeightedNorm:
    cusp = 0.0
    windows = defaultdict(float)
    for s in ss.samples:
        d = _derivs(s, order)
        if s.region in ("cusp", "annulus"):
            t = s.coordinate if s.region == "cusp" else t_coordinate(s.coordinate**2, ss.lam)
            w = math.exp(ss.eta * t)
            cusp = max(cusp, max(w * abs(v) for v in d))
        if s.region in ("ae", "annulus"):
            i = math.floor(math.log2(s.coordinate))
            R = 2.0**i
            val = max(R ** (j - ss.delta) * abs(v) for j, v in enumerate(d))
            windows[i] = max(windows[i], val)
    ae = max(windows.values()) if windows else 0.0
    return WeightedNorm(total=cusp + ae, cusp_part=cusp, ae_part=ae, window_norms=dict(sorted(windows.items())), lam=ss.lam)


def weighted_sup(ss: WeightedSampleSet, order: int) -> float:
    return weighted_norm(ss, order).total


def cusp_samples(f_derivs, t_values) -> list:
    """Cusp samples from a callable t -> (f, f', ...)."""
    return [Sample("cusp", float(t), tuple(f_derivs(t))) for t in t_values]


def ae_samples(f_derivs, radii) -> list:
    return [Sample("ae", float(r), tuple(f_derivs(r))) for r in radii]


def tail_nonincreasing(values, rtol: float = 1e-9) -> bool:
    """Finite-range proxy for finiteness of a sup: the running values do not grow."""
    values = list(values)
    return all(b <= a * (1 + rtol) + 1e-300 for a, b in zip(values, values[1:]))


def cusp_profile(ss: WeightedSampleSet, order: int, bins: int = 8) -> list:
    """Weighted sup of the cusp samples on consecutive t-bins (for boundedness checks)."""
    cs = sorted((s for s in ss.samples if s.region == "cusp"), key=lambda s: s.coordinate)
    if not cs:
        return []
    size = max(1, len(cs) // bins)
    out = []
    for i in range(0, len(cs), size):
        chunk = cs[i : i + size]
        out.append(max(math.exp(ss.eta * s.coordinate) * max(abs(v) for v in _derivs(s, order)) for s in chunk))
    return out


def read_samples_csv(path, eta: float, delta: float, lam: float = DEFAULT_LAMBDA) -> WeightedSampleSet:
    """Columns: region, coordinate, value, d1, ..., dk."""
    samples = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            keys = ["value"] + sorted((k for k in row if k.startswith("d") and k[1:].isdigit()), key=lambda k: int(k[1:]))
            vals = []
            for k in keys:
                if row.get(k) in (None, ""):
                    break
                vals.append(float(row[k]))
            samples.append(Sample(row["region"], float(row["coordinate"]), tuple(vals)))
    return WeightedSampleSet(samples, eta, delta, lam)
