"""Average scalar curvatures of the glued Kahler class, in exact rational arithmetic.

With [omega_eps] = [omega_X] - eps^2 [E] on the blow-up of an n-fold and
[E]^n = (-1)^{n-1}:

    s(omega_sol) = n (c1.omega^{n-1} - n eps^{2n-2}) / (omega^n - eps^{2n})
    s(omega_eps|_E) = n (n - 1) / eps^2
    a = 1 / (s(omega_eps|_E) - s(omega_sol))
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class InadmissibleEpsilonError(ValueError):
    pass


class PoleError(ZeroDivisionError):
    pass


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted here; pass a Fraction, int or 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True)
class KahlerClassData:
    n: int
    c1_dot: Fraction
    vol: Fraction
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c1_dot", _q(self.c1_dot))
        object.__setattr__(self, "vol", _q(self.vol))
        object.__setattr__(self, "epsilon", _q(self.epsilon))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.vol <= 0:
            raise ValueError("volume must be positive")


def avg_scalar_solution(d: KahlerClassData) -> Fraction:
    n, e = d.n, d.epsilon
    denom = d.vol - e ** (2 * n)
    if denom <= 0:
        raise InadmissibleEpsilonError(f"[omega]^n - eps^(2n) = {denom} is not positive")
    return n * (d.c1_dot - n * e ** (2 * n - 2)) / denom


def avg_scalar_divisor(n: int, epsilon) -> Fraction:
    e = _q(epsilon)
    if e == 0:
        raise PoleError("epsilon must be nonzero")
    return Fraction(n * (n - 1)) / (e * e)


def cusp_coefficient_a(s_bar_divisor, s_bar_total) -> Fraction:
    a, b = _q(s_bar_divisor), _q(s_bar_total)
    if a == b:
        raise PoleError("equal average scalar curvatures: a is undefined")
    return 1 / (a - b)


def implied_lambda(n: int, epsilon, a) -> Fraction:
    """lambda_eps with 1 / (eps^2 (1/(n(n-1)) - lambda/2)) = 1 / a."""
    e, a = _q(epsilon), _q(a)
    return 2 * (Fraction(1, n * (n - 1)) - a / (e * e))


@dataclass(frozen=True)
class TopologyReport:
    n: int
    epsilon: Fraction
    s_sol: Fraction
    s_divisor: Fraction
    a: Fraction
    lambda_eps: Fraction

    def to_json(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.__dict__.items()}


def topology_report(d: KahlerClassData) -> TopologyReport:
    s_sol = avg_scalar_solution(d)
    s_div = avg_scalar_divisor(d.n, d.epsilon)
    a = cusp_coefficient_a(s_div, s_sol)
    return TopologyReport(d.n, d.epsilon, s_sol, s_div, a, implied_lambda(d.n, d.epsilon, a))
