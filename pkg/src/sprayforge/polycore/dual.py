"""Dual numbers a + b*eps (eps^2 = 0) over Q, for exact directional derivatives."""

from __future__ import annotations

from fractions import Fraction


class Dual:
    __slots__ = ("re", "eps")

    def __init__(self, re, eps=0):
        self.re = Fraction(re)
        self.eps = Fraction(eps)

    @staticmethod
    def _lift(x) -> Dual:
        return x if isinstance(x, Dual) else Dual(x, 0)

    def __add__(self, o):
        o = self._lift(o)
        return Dual(self.re + o.re, self.eps + o.eps)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.re, -self.eps)

    def __sub__(self, o):
        o = self._lift(o)
        return Dual(self.re - o.re, self.eps - o.eps)

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Dual(self.re * o.re, self.re * o.eps + self.eps * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if o.re == 0:
            raise ZeroDivisionError("dual division by a number with zero real part")
        return Dual(self.re / o.re, (self.eps * o.re - self.re * o.eps) / (o.re * o.re))

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __pow__(self, k: int):
        if k == 0:
            return Dual(1)
        return Dual(self.re**k, k * self.re ** (k - 1) * self.eps)

    def __eq__(self, o):
        o = self._lift(o)
        return self.re == o.re and self.eps == o.eps

    def __hash__(self):
        return hash((self.re, self.eps))

    def __repr__(self):
        return f"Dual({self.re}, {self.eps})"


def real(x):
    return x.re if isinstance(x, Dual) else Fraction(x)


def infinitesimal(x):
    return x.eps if isinstance(x, Dual) else Fraction(0)
