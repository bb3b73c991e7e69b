"""Certified root enclosures for integer polynomials.

Numerical roots come from mpmath's simultaneous iteration; each approximation
``z_i`` is then certified with the inclusion-disc bound

    |root - z_i| <= n |p(z_i)| / (|lc| * prod_{j != i} |z_i - z_j|),

whose discs jointly contain all roots, with each connected component holding
as many roots as discs.  Pairwise-disjoint discs therefore isolate the roots.
All residuals, products and comparisons are evaluated in exact rational
arithmetic, so floating point only ever proposes centres.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import mpmath

from . import poly as P

MAX_PREC = 1 << 14


class RefinementFailed(ArithmeticError):
    """Requested precision not reached within the iteration budget."""

    def __init__(self, message: str, enclosure=None):
        super().__init__(message)
        self.enclosure = enclosure


# ---------------------------------------------------------------------------
# exact helpers


def mpf_to_fraction(x) -> Fraction:
    if hasattr(x, "_mpi_"):
        # interval endpoint: convert the raw value, never round through mpf
        lo, hi = x._mpi_
        if lo != hi:
            raise ValueError("expected a degenerate interval endpoint")
        return _raw_to_fraction(lo)
    x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError("non-finite approximation")
    return _raw_to_fraction(x._mpf_)


def _raw_to_fraction(raw) -> Fraction:
    if raw in (mpmath.libmp.finf, mpmath.libmp.fninf, mpmath.libmp.fnan):
        raise ValueError("non-finite approximation")
    sign, man, exp, _ = raw
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def fraction_to_mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def sqrt_bounds(q: Fraction, bits: int = 200) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(q) <= hi with hi - lo <= 2^-bits (roughly)."""
    if q < 0:
        raise ValueError("negative argument")
    if q == 0:
        return Fraction(0), Fraction(0)
    scale = 1 << (2 * bits)
    n = q.numerator * scale // q.denominator
    r = isqrt(n)
    lo = Fraction(r, 1 << bits)
    r_hi = r if r * r * q.denominator == q.numerator * scale else r + 1
    hi = Fraction(r_hi, 1 << bits)
    return lo, hi


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _ceval(p, z):
    acc = (Fraction(0), Fraction(0))
    for c in reversed(p):
        acc = _cmul(acc, z)
        acc = (acc[0] + c, acc[1])
    return acc


def _abs2(z) -> Fraction:
    return z[0] * z[0] + z[1] * z[1]


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @classmethod
    def point(cls, q) -> "RationalInterval":
        q = Fraction(q)
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    def scaled(self, k) -> "RationalInterval":
        a, b = self.lo * k, self.hi * k
        return RationalInterval(min(a, b), max(a, b))

    def is_point(self) -> bool:
        return self.lo == self.hi

    def to_iv(self):
        iv = mpmath.iv
        lo = iv.mpf(self.lo.numerator) / iv.mpf(self.lo.denominator)
        hi = iv.mpf(self.hi.numerator) / iv.mpf(self.hi.denominator)
        return iv.mpf([lo.a, hi.b])


# ---------------------------------------------------------------------------
# algebraic values


@dataclass(frozen=True)
class AlgebraicValue:
    """An algebraic number given by a square-free integer polynomial and an
    isolating disc (centre ``(re, im)``, radius) containing exactly one of its
    roots.  Real values have ``im == 0`` and the disc degenerates to the
    interval ``[re - radius, re + radius]``.
    """

    poly: tuple
    re: Fraction
    im: Fraction
    radius: Fraction
    real: bool

    @classmethod
    def rational(cls, q) -> "AlgebraicValue":
        q = Fraction(q)
        return cls(P.primitive_int((-q, Fraction(1))), q, Fraction(0), Fraction(0), True)

    @property
    def is_rational(self) -> bool:
        return P.degree(self.poly) == 1

    @property
    def exact_rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not a rational value")
        return Fraction(-self.poly[0], self.poly[1])

    @property
    def interval(self) -> RationalInterval:
        if not self.real:
            raise ValueError("complex value has no real interval")
        return RationalInterval(self.re - self.radius, self.re + self.radius)

    @property
    def width(self) -> Fraction:
        return 2 * self.radius

    @property
    def precision(self) -> int:
        """Bits of accuracy of the current enclosure."""
        if self.radius == 0:
            return MAX_PREC
        return max(0, -(self.width.numerator.bit_length() - self.width.denominator.bit_length()) - 1)

    def modulus_interval(self, bits: int = 200) -> RationalInterval:
        lo, hi = sqrt_bounds(self.re * self.re + self.im * self.im, bits)
        return RationalInterval(max(Fraction(0), lo - self.radius), hi + self.radius)

    def approx(self, prec: int = 53):
        v = self.refine(prec + 8)
        with mpmath.workprec(prec + 16):
            if v.real:
                return fraction_to_mpf(v.re)
            return mpmath.mpc(fraction_to_mpf(v.re), fraction_to_mpf(v.im))

    def refine(self, bits: int) -> "AlgebraicValue":
        """A value for the same root with enclosure width <= 2^-bits."""
        target = Fraction(1, 1 << bits)
        if self.width <= target:
            return self
        if self.real:
            return _refine_real(self, target)
        return _refine_complex(self, bits)

    def sign(self) -> int:
        if not self.real:
            raise ValueError("sign of a non-real value")
        v = self
        if self.is_rational:
            q = self.exact_rational
            return (q > 0) - (q < 0)
        bits = 32
        while True:
            iv = v.interval
            if iv.lo > 0:
                return 1
            if iv.hi < 0:
                return -1
            bits *= 2
            if bits > MAX_PREC:
                raise RefinementFailed("sign undecided", iv)
            v = v.refine(bits)

    def describe(self, digits: int = 10) -> str:
        if self.real:
            return f"{mpmath.nstr(fraction_to_mpf(self.re), digits)} +- {mpmath.nstr(fraction_to_mpf(self.radius), 3)}"
        c = mpmath.mpc(fraction_to_mpf(self.re), fraction_to_mpf(self.im))
        return f"{mpmath.nstr(c, digits)} +- {mpmath.nstr(fraction_to_mpf(self.radius), 3)}"


def _refine_real(v: AlgebraicValue, target: Fraction) -> AlgebraicValue:
    p = v.poly
    lo, hi = v.re - v.radius, v.re + v.radius
    flo, fhi = P.evaluate(p, lo), P.evaluate(p, hi)
    if flo == 0:
        return AlgebraicValue.rational(lo)
    if fhi == 0:
        return AlgebraicValue.rational(hi)
    if (flo > 0) == (fhi > 0):
        raise ArithmeticError("isolating interval lost its sign change")
    bits = max(64, -(target.numerator.bit_length() - target.denominator.bit_length()) + 8)
    # Newton proposal, accepted only after an exact sign check
    with mpmath.workprec(bits + 32):
        coeffs = [mpmath.mpf(c) for c in reversed(p)]
        dcoeffs = [mpmath.mpf(c) for c in reversed(P.derivative(p))]
        x = fraction_to_mpf(v.re)
        for _ in range(int(bits).bit_length() + 8):
            d = mpmath.polyval(dcoeffs, x)
            if d == 0:
                break
            x = x - mpmath.polyval(coeffs, x) / d
        if mpmath.isfinite(x):
            c = mpf_to_fraction(x)
            h = target / 2
            a, b = c - h, c + h
            if lo <= a and b <= hi:
                fa, fb = P.evaluate(p, a), P.evaluate(p, b)
                if fa == 0:
                    return AlgebraicValue.rational(a)
                if fb == 0:
                    return AlgebraicValue.rational(b)
                if (fa > 0) != (fb > 0):
                    return AlgebraicValue(p, c, Fraction(0), h, True)
    # bisection fallback
    steps = 0
    while hi - lo > target:
        mid = (lo + hi) / 2
        fm = P.evaluate(p, mid)
        if fm == 0:
            return AlgebraicValue.rational(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        steps += 1
        if steps > MAX_PREC:
            raise RefinementFailed("bisection budget exhausted", RationalInterval(lo, hi))
    return AlgebraicValue(p, (lo + hi) / 2, Fraction(0), (hi - lo) / 2, True)


def _refine_complex(v: AlgebraicValue, bits: int) -> AlgebraicValue:
    prec = max(64, bits + 16)
    while prec <= MAX_PREC:
        for w in isolate_roots(v.poly, prec):
            if w.real:
                continue
            d2 = (w.re - v.re) ** 2 + (w.im - v.im) ** 2
            if d2 <= v.radius * v.radius and w.radius <= Fraction(1, 1 << bits) / 2:
                return w
        prec *= 2
    raise RefinementFailed("complex refinement failed", v)


# ---------------------------------------------------------------------------
# isolation


@lru_cache(maxsize=4096)
def isolate_roots(p: tuple, prec: int = 64) -> tuple[AlgebraicValue, ...]:
    """Certified isolating discs for every complex root of the square-free part of ``p``.

    Real roots come back with ``real=True`` and an interval enclosure; roots
    are ordered by decreasing modulus, then real before complex, then by
    argument.  Precision escalates automatically until the discs separate.
    """
    sf = P.squarefree_part(p)
    n = P.degree(sf)
    if n < 1:
        return ()
    if n == 1:
        return (AlgebraicValue.rational(Fraction(-sf[0], sf[1])),)
    prec = max(prec, 64)
    while prec <= MAX_PREC:
        out = _try_isolate(sf, prec)
        if out is not None:
            return tuple(sorted(out, key=_root_order))
        prec *= 2
    raise RefinementFailed(f"could not isolate roots of {P.to_str(sf)}")


def _root_order(v: AlgebraicValue):
    m = v.re * v.re + v.im * v.im
    return (-m, not v.real, -v.re, -v.im)


def _try_isolate(sf: tuple, prec: int):
    n = P.degree(sf)
    with mpmath.workprec(prec):
        try:
            approx = mpmath.polyroots(
                [mpmath.mpf(c) for c in reversed(sf)],
                maxsteps=200 + 20 * n,
                extraprec=prec,
                cleanup=True,
            )
        except mpmath.libmp.NoConvergence:
            return None
        tiny = mpmath.mpf(2) ** (-(prec // 2))
        centres = []
        for z in approx:
            z = mpmath.mpc(z)
            scale_ = max(mpmath.mpf(1), abs(z))
            im = z.imag if abs(z.imag) > tiny * scale_ else mpmath.mpf(0)
            centres.append((mpf_to_fraction(z.real), mpf_to_fraction(im)))
    fsf = P.to_fraction(sf)
    lc2 = Fraction(sf[-1]) ** 2
    rad_bits = prec + 16
    radii = []
    for i, z in enumerate(centres):
        num = _abs2(_ceval(fsf, z))
        den = lc2
        for j, w in enumerate(centres):
            if i != j:
                d2 = _abs2((z[0] - w[0], z[1] - w[1]))
                if d2 == 0:
                    return None
                den *= d2
        r2 = n * n * num / den
        radii.append(sqrt_bounds(r2, rad_bits)[1])
    for i in range(n):
        for j in range(i + 1, n):
            d2 = _abs2((centres[i][0] - centres[j][0], centres[i][1] - centres[j][1]))
            s = radii[i] + radii[j]
            if d2 <= s * s:
                return None
    out = []
    for (re, im), r in zip(centres, radii):
        if im == 0:
            out.append(AlgebraicValue(sf, re, Fraction(0), r, True))
        else:
            if im * im <= r * r:
                return None
            out.append(AlgebraicValue(sf, re, im, r, False))
    return out


def real_roots(p: tuple, prec: int = 64) -> list[AlgebraicValue]:
    """Real roots of ``p`` in increasing order."""
    return sorted((v for v in isolate_roots(P.strip(p), prec) if v.real), key=lambda v: v.re)


# ---------------------------------------------------------------------------
# spectral radius


def _modulus_polynomial(sf: tuple) -> tuple:
    """Integer polynomial having |z| as a root for every root z of ``sf``.

    Roots of the Kronecker-square characteristic polynomial are all products
    z_i z_j, in particular z zbar = |z|^2; substituting x^2 gives |z|.
    """
    from .matrix import ExactMatrix, char_poly

    n = P.degree(sf)
    comp = companion(sf)
    kron = [[comp[i // n][j // n] * comp[i % n][j % n] for j in range(n * n)] for i in range(n * n)]
    cp = char_poly(ExactMatrix(kron))
    sq = [0] * (2 * len(cp) - 1)
    for i, c in enumerate(cp):
        sq[2 * i] = c
    return P.squarefree_part(tuple(sq))


def companion(p: tuple) -> list[list[Fraction]]:
    """Companion matrix of a polynomial (normalised to monic)."""
    p = P.monic(P.to_fraction(p))
    n = P.degree(p)
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        m[i][i - 1] = Fraction(1)
    for i in range(n):
        m[i][n - 1] = -p[i]
    return m


def max_modulus_root(p: tuple, precision: int = 64) -> AlgebraicValue:
    """Certified value of max |root| of ``p`` with enclosure width <= 2^-precision.

    When the maximum is attained by a positive real root, that root itself is
    returned (defined by the square-free non-cyclotomic factor).  The value is
    exactly 1 when every nonzero root is a root of unity.
    """
    p = P.strip(tuple(int(c) if Fraction(c).denominator == 1 else Fraction(c) for c in p))
    if P.degree(p) < 1:
        raise ValueError("max_modulus_root needs a nonconstant polynomial")
    p = P.primitive_int(p)
    while p and p[0] == 0:
        p = p[1:]
    if P.degree(p) < 1:
        return AlgebraicValue.rational(0)
    exps, residual = P.cyclotomic_split(p)
    if P.degree(residual) < 1:
        return AlgebraicValue.rational(1)
    sf = P.squarefree_part(residual)
    target = Fraction(1, 1 << precision)
    prec = max(64, precision + 16)
    while True:
        roots = isolate_roots(sf, prec)
        mods = [r.modulus_interval(prec + 16) for r in roots]
        top = max(range(len(roots)), key=lambda i: mods[i].hi)
        enc = RationalInterval(max(m.lo for m in mods), mods[top].hi)
        if exps:
            if enc.hi < 1:
                return AlgebraicValue.rational(1)
            if enc.lo <= 1:
                enc = RationalInterval(max(enc.lo, Fraction(1)), max(enc.hi, Fraction(1)))
                if prec > MAX_PREC // 2:
                    raise RefinementFailed("cannot separate spectral radius from 1", enc)
                prec *= 2
                continue
        if enc.width <= target:
            break
        if prec > MAX_PREC // 2:
            raise RefinementFailed("spectral radius enclosure too wide", enc)
        prec *= 2
    # prefer the positive real root realising the maximum
    best = None
    for r, m in zip(roots, mods):
        if r.real and r.re > 0 and m.hi >= enc.lo:
            if best is None or r.re > best.re:
                best = r
    if best is not None:
        return best.refine(precision)
    for r, m in zip(roots, mods):
        if r.real and m.hi >= enc.lo:
            neg = P.primitive_int(P.shift_reflect(r.poly))
            return AlgebraicValue(neg, -r.re, Fraction(0), r.radius, True).refine(precision)
    mp_ = _modulus_polynomial(sf)
    for v in isolate_roots(mp_, prec):
        if v.real and v.re > 0:
            iv = v.interval
            if iv.hi >= enc.lo and iv.lo <= enc.hi:
                cand = v.refine(precision + 4)
                if enc.lo - target <= cand.re <= enc.hi + target:
                    return cand
    raise RefinementFailed("could not identify the maximal modulus", enc)


def spectral_radius_enclosure(p: tuple, precision: int = 64) -> RationalInterval:
    """Enclosure of max |root| of ``p`` of width <= 2^-precision.

    Unlike :func:`max_modulus_root` no defining polynomial is produced, so no
    auxiliary modulus polynomial is ever built.  The enclosure is the exact
    point 1 when every root off the unit circle has modulus below 1 and some
    root of unity is present (or nothing else is).
    """
    p = P.strip(tuple(int(c) if Fraction(c).denominator == 1 else Fraction(c) for c in p))
    if P.degree(p) < 1:
        raise ValueError("spectral radius of a constant polynomial")
    p = P.primitive_int(p)
    while p and p[0] == 0:
        p = p[1:]
    if P.degree(p) < 1:
        return RationalInterval(Fraction(0), Fraction(0))
    exps, residual = P.cyclotomic_split(p)
    if P.degree(residual) < 1:
        return RationalInterval(Fraction(1), Fraction(1))
    sf = P.squarefree_part(residual)
    target = Fraction(1, 1 << precision)
    prec = max(64, precision + 16)
    while prec <= MAX_PREC:
        roots = isolate_roots(sf, prec)
        mods = [r.modulus_interval(prec + 16) for r in roots]
        enc = RationalInterval(max(m.lo for m in mods), max(m.hi for m in mods))
        if exps and enc.hi < 1:
            return RationalInterval(Fraction(1), Fraction(1))
        if exps and enc.lo <= 1:
            pass  # cannot yet separate from the unit circle
        elif enc.width <= target:
            return enc
        prec *= 2
    raise RefinementFailed("spectral radius enclosure too wide")


def rational_roots(p: tuple, prec: int = 64) -> list[Fraction]:
    """All rational roots of ``p``.

    A rational root a/b in lowest terms has b dividing the leading coefficient
    of the primitive integer polynomial, so rounding lead * x for each real
    root x and testing exactly finds every one of them.
    """
    sf = P.squarefree_part(P.strip(p))
    if P.degree(sf) < 1:
        return []
    lc = abs(sf[-1])
    out = []
    bits = max(prec, lc.bit_length() + 8)
    for v in isolate_roots(sf, prec):
        if not v.real:
            continue
        w = v.refine(bits)
        cand = Fraction(round(w.re * lc), lc)
        if P.evaluate(sf, cand) == 0 and cand not in out:
            out.append(cand)
    return sorted(out)


def positive_real_roots(p: tuple, prec: int = 64) -> list[AlgebraicValue]:
    """Distinct positive real roots, decreasing; rational ones carry a linear polynomial."""
    sf = P.to_fraction(P.squarefree_part(P.strip(p)))
    rats = rational_roots(sf, prec)
    rest = sf
    for q in rats:
        rest = P.exact_div(rest, (-q, Fraction(1)))
    out = [AlgebraicValue.rational(q) for q in rats if q > 0]
    if P.degree(rest) >= 1:
        out += [v for v in isolate_roots(P.primitive_int(rest), prec) if v.real and v.re > 0]
    out.sort(key=lambda v: v.re, reverse=True)
    return out
