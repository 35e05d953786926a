"""Exact rational functions of one variable and their closed-form antiderivatives.

Coefficients are ``Fraction`` tuples in ascending powers.  Evaluation is
generic: floats, mpmath numbers and ``Jet`` objects all go through the
same Horner loop.  Antiderivatives are built from an exact partial-fraction
split at the origin plus numerically located simple roots elsewhere, which
keeps the r(tau) and f(tau) maps accurate deep into the cusp (tau ~ 1e-12)
and far out on the AE end (tau ~ 1e12) where quadrature would struggle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .jets import Jet, _is_mp

WORKING_DPS = 60


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def poly(*coeffs) -> tuple:
    """Ascending-power coefficient tuple, trailing zeros stripped."""
    c = [_frac(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (Fraction(0),)


def padd(p, q):
    n = max(len(p), len(q))
    return poly(*[(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly(*out)


def pscale(p, s):
    return poly(*[_frac(s) * a for a in p])


def ppow(p, e: int):
    out = (Fraction(1),)
    for _ in range(e):
        out = pmul(out, p)
    return out


def pderiv(p):
    if len(p) == 1:
        return (Fraction(0),)
    return poly(*[i * p[i] for i in range(1, len(p))])


def pdivmod(num, den):
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return (Fraction(0),), poly(*num)
    q = [Fraction(0)] * (len(num) - dd)
    for i in range(len(num) - 1 - dd, -1, -1):
        c = num[i + dd] / den[-1]
        q[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    return poly(*q), poly(*num[:dd]) if dd else (Fraction(0),)


def _convert(c: Fraction, like):
    if isinstance(like, Jet):
        like = like.c[0]
    if _is_mp(like):
        return mpmath.mpf(c.numerator) / c.denominator
    return float(c)


def peval(p, x):
    acc = None
    for c in reversed(p):
        cc = _convert(c, x)
        acc = cc if acc is None else acc * x + cc
    return acc


def valuation(p) -> int:
    """Multiplicity of the root at zero."""
    for i, c in enumerate(p):
        if c != 0:
            return i
    raise ValueError("zero polynomial")


@dataclass(frozen=True)
class RationalFunction:
    num: tuple
    den: tuple = (Fraction(1),)

    def __call__(self, x):
        return peval(self.num, x) / peval(self.den, x)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            padd(pmul(self.num, other.den), pmul(other.num, self.den)), pmul(self.den, other.den)
        )

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(pmul(self.num, other.num), pmul(self.den, other.den))

    def reciprocal(self) -> "RationalFunction":
        return RationalFunction(self.den, self.num)

    def times_x(self) -> "RationalFunction":
        return RationalFunction(pmul(self.num, (Fraction(0), Fraction(1))), self.den)

    def to_sympy(self, symbol):
        import sympy

        n = sum(sympy.Rational(c.numerator, c.denominator) * symbol**i for i, c in enumerate(self.num))
        d = sum(sympy.Rational(c.numerator, c.denominator) * symbol**i for i, c in enumerate(self.den))
        return n / d

    def laurent_at_infinity(self, terms: int):
        """Coefficients a_j, j = -deg, ..., of the expansion sum a_j x^{-j} for large x.

        Returns a dict power -> coefficient, with power = -j, i.e. key 1 is the
        coefficient of x^1, key -2 the coefficient of x^-2.
        """
        dn, dd = len(self.num) - 1, len(self.den) - 1
        top = dn - dd
        # num(x)/den(x) with x = 1/y: y^{-top} * Nrev(y)/Drev(y)
        nrev = list(reversed(self.num))
        drev = list(reversed(self.den))
        series = []
        for k in range(terms):
            s = nrev[k] if k < len(nrev) else Fraction(0)
            s -= sum(drev[i] * series[k - i] for i in range(1, min(k, len(drev) - 1) + 1))
            series.append(s / drev[0])
        return {top - k: series[k] for k in range(terms)}


class LogSumAntiderivative:
    """Closed-form antiderivative of a rational function ``num/den``.

    Decomposition: polynomial part + Laurent terms at zero + simple
    nonzero poles, so that

        F(x) = P(x) + sum_j e_j x^{-j}/(-j) + e_1 log x + sum_i c_i log(x - p_i)

    with no additive constant.  Valid for x > 0 when den has no positive
    real roots.
    """

    def __init__(self, num, den):
        self.num, self.den = tuple(num), tuple(den)
        q, rem = pdivmod(self.num, self.den)
        m0 = valuation(self.den)
        M = tuple(self.den[m0:])
        # Laurent coefficients of rem/M at 0 up to order m0 - 1
        e = []
        for j in range(m0):
            s = rem[j] if j < len(rem) else Fraction(0)
            s -= sum(M[i] * e[j - i] for i in range(1, min(j, len(M) - 1) + 1))
            e.append(s / M[0])
        # remainder after removing the principal part: S/M with deg S < deg M
        principal = poly(*e) if e else (Fraction(0),)
        numer = padd(rem, pscale(pmul(M, principal), -1))
        if m0:
            if any(c != 0 for c in numer[:m0]):
                raise ArithmeticError("principal part extraction failed")
            S = poly(*numer[m0:]) if len(numer) > m0 else (Fraction(0),)
        else:
            S = numer
        self.poly_part = q
        self.zero_order = m0
        # principal part at zero: e[j] * x^{j - m0}
        self.laurent = tuple(e)
        self.M = M
        self.S = S
        self._roots_mp, self._res_mp = self._simple_poles(S, M)
        self._roots_np = np.array([complex(r) for r in self._roots_mp])
        self._res_np = np.array([complex(c) for c in self._res_mp])
        self._real = np.abs(self._roots_np.imag) < 1e-30

    @staticmethod
    def _simple_poles(S, M):
        deg = len(M) - 1
        if deg == 0 or all(c == 0 for c in S):
            return [], []
        with mpmath.workdps(WORKING_DPS):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(M)]
            roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * WORKING_DPS)
            dM = pderiv(M)
            res = []
            for r in roots:
                if abs(r) == 0:
                    raise ArithmeticError("unexpected root at zero")
                res.append(peval(S, mpmath.mpc(r)) / peval(dM, mpmath.mpc(r)))
            for i in range(len(roots)):
                for j in range(i):
                    if abs(roots[i] - roots[j]) < mpmath.mpf(10) ** (-WORKING_DPS // 3):
                        raise ArithmeticError("repeated nonzero root; not supported")
                if mpmath.im(roots[i]) == 0 and mpmath.re(roots[i]) > 0:
                    raise ArithmeticError("positive real pole; antiderivative not valid on (0, inf)")
        return list(roots), list(res)

    @property
    def log_coefficient_at_infinity(self) -> Fraction:
        """Total coefficient of log x as x -> infinity (exact)."""
        lead = RationalFunction(self.num, self.den).laurent_at_infinity(len(self.poly_part) + 2)
        return lead.get(-1, Fraction(0))

    def _poly_terms(self, x, log):
        out = 0
        for i, c in enumerate(self.poly_part):
            if c:
                out = out + _convert(c, x) * x ** (i + 1) / (i + 1)
        m0 = self.zero_order
        for j, e in enumerate(self.laurent):
            if not e:
                continue
            p = j - m0  # e * x^p
            if p == -1:
                out = out + _convert(e, x) * log(x)
            else:
                out = out + _convert(e, x) * x ** (p + 1) / (p + 1)
        return out

    def __call__(self, x):
        if _is_mp(x):
            return self.eval_mp(x)
        return self.eval_float(float(x))

    def eval_float(self, x: float) -> float:
        import math

        out = self._poly_terms(x, math.log)
        if len(self._roots_np):
            z = x - self._roots_np
            logs = np.where(self._real, np.log(np.abs(z)) + 0j, np.log(z + 0j))
            out += float(np.sum(self._res_np * logs).real)
        return float(out)

    def eval_mp(self, x):
        with mpmath.workdps(WORKING_DPS):
            x = mpmath.mpf(x)
            out = self._poly_terms(x, mpmath.log)
            for r, c in zip(self._roots_mp, self._res_mp):
                if mpmath.im(r) == 0:
                    out += mpmath.re(c) * mpmath.log(abs(x - mpmath.re(r)))
                else:
                    out += mpmath.re(c * mpmath.log(x - r))
            return +out


@lru_cache(maxsize=256)
def antiderivative(rf: RationalFunction) -> LogSumAntiderivative:
    return LogSumAntiderivative(rf.num, rf.den)
