"""Truncated Taylor jets for forward-mode differentiation of any fixed order.

A ``Jet`` holds the Taylor coefficients ``c[0], ..., c[K]`` of a function
around a point, so ``c[j] = f^{(j)}(x0) / j!``.  Arithmetic propagates the
truncated series exactly, which is what the curvature code needs: fourth
derivatives of quotients and logarithms without finite-difference noise.

Coefficients may be floats or mpmath numbers; the elementary functions
below dispatch on the argument type.
"""

from __future__ import annotations

import math
from numbers import Number

import mpmath


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)

    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        """The identity function expanded at ``x0``."""
        zero = x0 * 0
        return cls([x0, zero + 1] + [zero] * (order - 1))

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        zero = value * 0
        return cls([value] + [zero] * order)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k: int):
        """k-th derivative at the expansion point."""
        return self.c[k] * math.factorial(k)

    def derivatives(self):
        return [self.derivative(k) for k in range(len(self.c))]

    def shift(self) -> "Jet":
        """Jet of f' (one order lower)."""
        return Jet([(j + 1) * self.c[j + 1] for j in range(len(self.c) - 1)])

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if len(other.c) != len(self.c):
                n = min(len(other.c), len(self.c))
                return Jet(other.c[:n])
            return other
        return Jet.constant(other, self.order)

    def _trim(self, other: "Jet"):
        n = min(len(self.c), len(other.c))
        return self.c[:n], other.c[:n]

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet([self.c[0] + other] + self.c[1:])
        a, b = self._trim(other)
        return Jet([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([x * other for x in self.c])
        a, b = self._trim(other)
        n = len(a)
        return Jet([sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)])

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a = self.c
        if a[0] == 0:
            raise ZeroDivisionError("jet with zero constant term has no reciprocal")
        out = [1 / a[0]]
        for k in range(1, len(a)):
            s = sum(a[i] * out[k - i] for i in range(1, k + 1))
            out.append(-s / a[0])
        return Jet(out)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet([x / other for x in self.c])
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, int):
            if p == 0:
                return Jet.constant(self.c[0] * 0 + 1, self.order)
            if p < 0:
                return (self ** (-p)).reciprocal()
            result = None
            base = self
            while p:
                if p & 1:
                    result = base if result is None else result * base
                base = base * base
                p >>= 1
            return result
        return exp(log(self) * p)

    def __repr__(self):
        return f"Jet({self.c!r})"


def _is_mp(x) -> bool:
    return isinstance(x, (mpmath.mpf, mpmath.mpc))


def _series_exp(a):
    # b' = a' b
    out = [_scalar_exp(a[0])]
    for k in range(1, len(a)):
        out.append(sum(j * a[j] * out[k - j] for j in range(1, k + 1)) / k)
    return out


def _series_log(a):
    # b' = a' / a
    out = [_scalar_log(a[0])]
    for k in range(1, len(a)):
        s = sum(j * out[j] * a[k - j] for j in range(1, k))
        out.append((a[k] - s / k) / a[0])
    return out


def _scalar_exp(x):
    return mpmath.exp(x) if _is_mp(x) else math.exp(x)


def _scalar_log(x):
    if _is_mp(x):
        return mpmath.log(x)
    if x <= 0:
        raise ValueError(f"log of non-positive value {x!r}")
    return math.log(x)


def exp(x):
    if isinstance(x, Jet):
        return Jet(_series_exp(x.c))
    return _scalar_exp(x)


def log(x):
    if isinstance(x, Jet):
        return Jet(_series_log(x.c))
    return _scalar_log(x)


def sqrt(x):
    if isinstance(x, Jet):
        return exp(log(x) * 0.5) if not _is_mp(x.c[0]) else exp(log(x) * mpmath.mpf("0.5"))
    return mpmath.sqrt(x) if _is_mp(x) else math.sqrt(x)


def value_of(x):
    return x.c[0] if isinstance(x, Jet) else x


def compose_taylor(coeffs, delta: Jet) -> Jet:
    """Evaluate the polynomial sum coeffs[j] * delta**j for a jet delta with zero
    constant term (Horner)."""
    if delta.c[0] != 0:
        raise ValueError("inner jet must vanish at the expansion point")
    out = Jet.constant(coeffs[-1], delta.order)
    for c in reversed(coeffs[:-1]):
        out = out * delta + c
    return out


def taylor_of_autonomous_ode(rhs, y0, order: int):
    """Taylor coefficients of the solution of y' = rhs(y), y(0) = y0.

    Uses the standard Taylor-mode recursion: with y known to order j,
    rhs(y) is known to order j, which fixes coefficient j + 1 of y.
    """
    coeffs = [y0]
    for j in range(order):
        y = Jet(coeffs + [y0 * 0])
        f = rhs(y)
        coeffs.append(f.c[j] / (j + 1))
    return coeffs


def derivatives(f, x0, order: int):
    """[f(x0), f'(x0), ..., f^{(order)}(x0)] by forward-mode jets."""
    out = f(Jet.variable(x0, order))
    if not isinstance(out, Jet):
        zero = x0 * 0
        return [out] + [zero] * order
    return out.derivatives()


def is_number(x) -> bool:
    return isinstance(x, Number) or _is_mp(x)
