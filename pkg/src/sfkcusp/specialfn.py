"""Principal branch of the Lambert W (product log) function and its derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

MAX_DERIVATIVE_ORDER = 6


class LambertDomainError(ValueError):
    pass


class UnsupportedOrderError(ValueError):
    pass


@dataclass(frozen=True)
class WBranchValue:
    x: float
    w: float
    residual: float  # |w e^w - x|

    @property
    def relative_residual(self) -> float:
        return self.residual / self.x


def _seed(x: float) -> float:
    if x > math.e:
        lx = math.log(x)
        return lx - math.log(lx)
    if x < 0.3:
        # series W = x - x^2 + 3/2 x^3 - 8/3 x^4
        return x * (1 - x * (1 - x * (1.5 - x * 8 / 3)))
    return math.log1p(x) * 0.8


def _halley(x: float, w: float) -> float:
    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w_new = w - step
        if abs(step) <= 4e-16 * (abs(w_new) + 1e-300):
            return w_new
        w = w_new
    return w


def lambert_w0(x: float) -> WBranchValue:
    """Principal branch W(x) for x > 0, solved by Halley iteration.

    The seed is the large-argument asymptotic log x - log log x above e and
    the Taylor series near zero.
    """
    x = float(x)
    if not (x > 0) or math.isinf(x):
        raise LambertDomainError(f"lambert_w0 requires a finite positive argument, got {x!r}")
    w = _halley(x, _seed(x))
    # residual through the equivalent log form is better conditioned for large x
    if x > 1e300 / math.e:
        resid = abs(w + math.log(w) - math.log(x)) * x
    else:
        resid = abs(w * math.exp(w) - x)
    return WBranchValue(x=x, w=w, residual=resid)


def lambert_w0_exp(log_x: float) -> float:
    """W(exp(log_x)) without forming exp(log_x); solves w + log w = log_x."""
    L = float(log_x)
    if L < 700.0:
        return lambert_w0(math.exp(L)).w
    w = L - math.log(L)
    for _ in range(60):
        f = w + math.log(w) - L
        step = f / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 4e-16 * w:
            break
    return w


@lru_cache(maxsize=None)
def _derivative_polynomials(order: int):
    """Polynomials q_k with W^{(k)}(x) = W^k q_k(W) / (x^k (1+W)^{2k-1}).

    Built by differentiating the closed form with W' = W / (x (1+W)):
    d/dx [W^k q(W) x^{-k} (1+W)^{-b}] is collected over the common
    denominator x^{k+1} (1+W)^{b+2}.
    Returned as coefficient lists (ascending powers of W) of Fractions.
    """
    polys = {1: [Fraction(1)]}  # W' = W / (x (1+W))
    for k in range(1, order):
        p = polys[k]
        b = 2 * k - 1
        # numerator N(W) = W^k q(W); derivative of N/(x^k (1+W)^b):
        # [N'(W) W/(x(1+W)) x^k (1+W)^b - N k x^{k-1}(1+W)^b
        #   - N x^k b (1+W)^{b-1} W/(x(1+W))] / (x^{2k} (1+W)^{2b})
        # = [N' W (1+W) - k N (1+W)^2 - b N W] / (x^{k+1} (1+W)^{b+2})
        N = [Fraction(0)] * k + list(p)
        dN = [i * N[i] for i in range(1, len(N))]
        t1 = _pmul(_pmul(dN, [Fraction(0), Fraction(1)]), [Fraction(1), Fraction(1)])
        t2 = _pscale(_pmul(N, [Fraction(1), Fraction(2), Fraction(1)]), -k)
        t3 = _pscale(_pmul(N, [Fraction(0), Fraction(1)]), -b)
        num = _padd(_padd(t1, t2), t3)
        assert all(c == 0 for c in num[: k + 1]), "W^{k+1} must factor out"
        polys[k + 1] = num[k + 1 :]
    return polys


def _padd(p, q):
    n = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (n - len(p))
    q = list(q) + [Fraction(0)] * (n - len(q))
    return [a + b for a, b in zip(p, q)]


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _pscale(p, s):
    return [s * a for a in p]


def lambert_w0_derivative(x: float, order: int = 1) -> float:
    """order-th derivative of W at x > 0, for 1 <= order <= 6."""
    if not isinstance(order, int) or order < 1 or order > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(
            f"derivative order must be an integer in [1, {MAX_DERIVATIVE_ORDER}], got {order!r}"
        )
    x = float(x)
    if not x > 0:
        raise LambertDomainError(f"x must be positive, got {x!r}")
    w = lambert_w0(x).w
    p = _derivative_polynomials(order)[order]
    poly = 0.0
    for c in reversed(p):
        poly = poly * w + float(c)
    # W^k / (x^k (1+W)^{2k-1}) assembled in log space to survive large x
    k = order
    scale = math.exp(k * (math.log(w) - math.log(x)) - (2 * k - 1) * math.log1p(w))
    return scale * poly


def derivative_leading_coefficient(order: int) -> int:
    """Coefficient a_{n,n} of the top power of W in the derivative numerator;
    equals (-1)^{n-1} (n-1)!."""
    return int(_derivative_polynomials(order)[order][-1])
