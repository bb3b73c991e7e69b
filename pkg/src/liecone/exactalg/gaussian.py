"""Gaussian rationals a + b i with exact Fraction parts."""

from __future__ import annotations

from fractions import Fraction


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x, 0)

    def __add__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussianRational.coerce(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, o):
        o = GaussianRational.coerce(o)
        n = o.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        p = self * o.conjugate()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, o):
        return GaussianRational.coerce(o) / self

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, GaussianRational, complex)):
            o = GaussianRational.coerce(o)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __ne__(self, o):
        r = self.__eq__(o)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re} + {self.im}i)"
