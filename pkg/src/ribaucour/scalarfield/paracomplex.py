"""Para-complex (split-complex) numbers a + jb with j*j = 1."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ParaComplex:
    re: float
    im: float = 0.0

    def __add__(self, other):
        other = _coerce(other)
        return ParaComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return ParaComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return ParaComplex(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        return ParaComplex(self.re * other.re + self.im * other.im,
                           self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __pow__(self, n):
        return para_pow(self, n)

    def conjugate(self):
        return ParaComplex(self.re, -self.im)

    def n2(self):
        return para_n2(self)

    def sector(self):
        """Which of the four sectors cut out by the null lines re = +-im.

        Returns 'right', 'top', 'left' or 'bottom' ('right' means
        re > |im|), or None on the null lines themselves.
        """
        if abs(self.re) > abs(self.im):
            return "right" if self.re > 0 else "left"
        if abs(self.im) > abs(self.re):
            return "top" if self.im > 0 else "bottom"
        return None


J = ParaComplex(0.0, 1.0)


def _coerce(z):
    if isinstance(z, ParaComplex):
        return z
    return ParaComplex(float(z), 0.0)


def para_pow(z: ParaComplex, n: int) -> ParaComplex:
    """z**n for a positive integer n, by repeated squaring."""
    if n < 1 or int(n) != n:
        raise ValueError("para_pow needs a positive integer exponent, got %r" % (n,))
    n = int(n)
    result = None
    base = z
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def para_n2(z: ParaComplex) -> float:
    """The split norm re^2 - im^2; multiplicative, zero on the null lines."""
    return z.re * z.re - z.im * z.im


def hyperbolic_unit(t: float) -> ParaComplex:
    """cosh t + j sinh t."""
    return ParaComplex(math.cosh(t), math.sinh(t))
