"""Exact arithmetic in Q(alpha) for an isolated algebraic number alpha.

Elements are polynomials in alpha modulo a square-free integer polynomial f
with f(alpha) = 0.  No factorisation of f is ever computed: when an element
shares a factor with f, the modulus is split by a gcd and replaced by the
factor that actually vanishes at alpha (decided from the isolating region).
Zero tests are therefore exact, and in a real field every nonzero element has
a sign that interval refinement determines in finitely many steps.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import mpmath

from . import poly as P
from .roots import (
    AlgebraicValue,
    RationalInterval,
    RefinementFailed,
    fraction_to_mpf,
    isolate_roots,
    MAX_PREC,
)


class Rationals:
    """The field Q with the same interface as :class:`NumberField`."""

    is_real = True
    degree = 1

    def __call__(self, x) -> Fraction:
        if isinstance(x, NFElement):
            raise TypeError("cannot coerce a number-field element into Q")
        return Fraction(x)

    def embed(self, x):
        return Fraction(x)

    def __repr__(self):
        return "QQ"

    def approx(self, x, prec: int = 53):
        with mpmath.workprec(prec):
            return fraction_to_mpf(Fraction(x))

    def sign(self, x) -> int:
        x = Fraction(x)
        return (x > 0) - (x < 0)


QQ = Rationals()


class NumberField:
    """Q(alpha) for the root of ``value.poly`` isolated by ``value``."""

    def __init__(self, value: AlgebraicValue, name: str = "a"):
        self.value = value
        self.modulus: tuple = P.monic(P.to_fraction(value.poly))
        self.name = name

    # -- structure --------------------------------------------------------
    @property
    def degree(self) -> int:
        return P.degree(self.modulus)

    @property
    def is_real(self) -> bool:
        return self.value.real

    @property
    def gen(self) -> "NFElement":
        return NFElement(self, (Fraction(0), Fraction(1)))

    @property
    def defining_poly(self) -> tuple:
        return P.primitive_int(self.modulus)

    def __repr__(self):
        return f"NumberField({P.to_str(self.defining_poly)}, {self.value.describe(8)})"

    def __call__(self, x) -> "NFElement":
        if isinstance(x, NFElement):
            if x.field is not self:
                raise TypeError("element belongs to a different number field")
            return x
        return NFElement(self, (Fraction(x),))

    def embed(self, x):
        return self(x)

    def element(self, coeffs: Iterable) -> "NFElement":
        return NFElement(self, tuple(Fraction(c) for c in coeffs))

    # -- exact zero test with dynamic splitting ----------------------------
    def reduce(self, coeffs: tuple) -> tuple:
        if len(coeffs) <= len(self.modulus) - 1:
            return P.strip(coeffs)
        return P.rem(coeffs, self.modulus)

    def is_zero(self, coeffs: tuple) -> bool:
        a = self.reduce(coeffs)
        if not a:
            return True
        if len(a) == 1:
            return False
        g = P.gcd(a, self.modulus)
        if P.degree(g) < 1:
            return False
        h = P.exact_div(self.modulus, g)
        if self.vanishes_at_gen(g):
            self._set_modulus(g)
            return True
        self._set_modulus(h)
        return False

    def _set_modulus(self, m: tuple) -> None:
        m = P.monic(m)
        if m == self.modulus:
            return
        self.modulus = m
        v = self.value
        self.value = AlgebraicValue(P.primitive_int(m), v.re, v.im, v.radius, v.real)

    def vanishes_at_gen(self, g: tuple) -> bool:
        """Does the factor ``g`` of the modulus vanish at alpha?"""
        g = P.primitive_int(g)
        if P.degree(g) < 1:
            return False
        v = self.value
        if v.real:
            iv = v.interval
            if P.evaluate(g, iv.lo) == 0:
                return True
            return P.count_real_roots(g, iv.lo, iv.hi) > 0
        return _complex_root_in(g, self.value)

    def split_with(self, q: tuple) -> bool:
        """Shrink the modulus to ``gcd(q, f)`` when alpha is a root of ``q``."""
        return self.is_zero(tuple(Fraction(c) for c in q))

    # -- numerics ---------------------------------------------------------
    def gen_approx(self, prec: int):
        self.value = self.value.refine(prec + 8)
        return self.value.approx(prec)

    def gen_interval(self, bits: int) -> RationalInterval:
        self.value = self.value.refine(bits)
        return self.value.interval

    def approx(self, x, prec: int = 53):
        return self(x).approx(prec)

    def sign(self, x) -> int:
        return self(x).sign()


def _complex_root_in(g: tuple, v: AlgebraicValue) -> bool:
    """Whether the unique root of ``v.poly`` inside v's disc is a root of ``g``.

    Every root of ``g`` is a root of ``v.poly``; all roots of ``v.poly`` are
    isolated at increasing precision and each root of ``g`` is matched to its
    disc.
    """
    prec = 64
    while prec <= MAX_PREC:
        f_roots = isolate_roots(v.poly, prec)
        mine = [
            w
            for w in f_roots
            if (w.re - v.re) ** 2 + (w.im - v.im) ** 2 <= (v.radius - w.radius) ** 2
            and w.radius <= v.radius
        ]
        if len(mine) == 1:
            target = mine[0]
            g_roots = isolate_roots(g, prec)
            undecided = False
            for gr in g_roots:
                hits = [
                    w
                    for w in f_roots
                    if (w.re - gr.re) ** 2 + (w.im - gr.im) ** 2 <= (w.radius + gr.radius) ** 2
                ]
                if len(hits) != 1:
                    undecided = True
                    break
                if hits[0] is target:
                    return True
            if not undecided:
                return False
        prec *= 2
    raise RefinementFailed("could not match factor root to the field generator")


class NFElement:
    """Element of a :class:`NumberField`, a polynomial in the generator."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: tuple):
        self.field = field
        self.coeffs = P.strip(coeffs)

    def _coerce(self, other):
        if isinstance(other, NFElement):
            if other.field is not self.field:
                raise TypeError("mixing elements of different number fields")
            return other.coeffs
        if isinstance(other, (int, Fraction)):
            return (Fraction(other),) if other != 0 else ()
        return NotImplemented

    def _new(self, coeffs):
        return NFElement(self.field, self.field.reduce(coeffs))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(P.add(self.coeffs, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(P.sub(self.coeffs, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(P.sub(o, self.coeffs))

    def __neg__(self):
        return NFElement(self.field, tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(P.mul(self.coeffs, o))

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        f = self.field
        if f.is_zero(self.coeffs):
            raise ZeroDivisionError("division by zero in number field")
        a = f.reduce(self.coeffs)
        g, s, _ = P.ext_gcd(a, f.modulus)
        if P.degree(g) != 0:
            raise ArithmeticError("unexpected zero divisor after splitting")
        return self._new(s)

    def __truediv__(self, other):
        if isinstance(other, NFElement):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            inv = Fraction(1) / Fraction(other)
            return NFElement(self.field, tuple(c * inv for c in self.coeffs))
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return NFElement(self.field, o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = NFElement(self.field, (Fraction(1),))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return self.field.is_zero(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.field.is_zero(P.sub(self.coeffs, o))

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None  # type: ignore[assignment]

    def is_rational(self) -> bool:
        c = self.field.reduce(self.coeffs)
        return len(c) <= 1

    def as_fraction(self) -> Fraction:
        c = self.field.reduce(self.coeffs)
        if len(c) > 1:
            raise ValueError("element is not rational")
        return c[0] if c else Fraction(0)

    # -- order (real fields) -----------------------------------------------
    def interval(self, bits: int = 64) -> RationalInterval:
        """Rational enclosure of the element's real value."""
        f = self.field
        if not f.is_real:
            raise ValueError("interval of an element of a non-real field")
        c = f.reduce(self.coeffs)
        if len(c) <= 1:
            return RationalInterval.point(c[0] if c else 0)
        iv = f.gen_interval(bits)
        return _interval_horner(c, iv)

    def sign(self) -> int:
        if self.is_zero():
            return 0
        bits = 32
        while True:
            iv = self.interval(bits)
            if iv.lo > 0:
                return 1
            if iv.hi < 0:
                return -1
            bits *= 2
            if bits > MAX_PREC:
                raise RefinementFailed("sign of a nonzero element undecided", iv)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    # -- numerics ---------------------------------------------------------
    def approx(self, prec: int = 53):
        f = self.field
        c = f.reduce(self.coeffs)
        a = f.gen_approx(prec + 2 * len(c) + 16)
        with mpmath.workprec(prec + 2 * len(c) + 16):
            acc = mpmath.mpf(0)
            for x in reversed(c):
                acc = acc * a + fraction_to_mpf(x)
            return +acc

    def __repr__(self):
        c = self.field.reduce(self.coeffs)
        return f"NFElement({P.to_str(c, self.field.name)})"

    def min_poly_candidate(self) -> tuple:
        """Square-free integer polynomial with this element as a root.

        The characteristic polynomial of multiplication by the element on
        Q[x]/(f); its square-free part.
        """
        from .matrix import ExactMatrix, char_poly

        f = self.field
        n = f.degree
        rows = []
        basis_img = []
        for i in range(n):
            e = NFElement(f, (Fraction(0),) * i + (Fraction(1),))
            img = f.reduce(P.mul(e.coeffs, self.coeffs))
            basis_img.append([img[j] if j < len(img) else Fraction(0) for j in range(n)])
        rows = [[basis_img[j][i] for j in range(n)] for i in range(n)]
        return P.squarefree_part(char_poly(ExactMatrix(rows)))

    def to_algebraic(self, bits: int = 64) -> AlgebraicValue:
        """The element as an :class:`AlgebraicValue` (defining poly + isolating region)."""
        c = self.field.reduce(self.coeffs)
        if len(c) <= 1:
            return AlgebraicValue.rational(c[0] if c else 0)
        mp_ = self.min_poly_candidate()
        prec = max(64, bits)
        while prec <= MAX_PREC:
            cands = isolate_roots(mp_, prec)
            if self.field.is_real:
                iv = self.interval(prec)
                hits = [
                    w
                    for w in cands
                    if w.real and w.re - w.radius <= iv.hi and w.re + w.radius >= iv.lo
                ]
            else:
                z = self.approx(prec)
                tol = mpmath.mpf(2) ** (-prec // 2)
                hits = [
                    w
                    for w in cands
                    if abs(mpmath.mpc(fraction_to_mpf(w.re), fraction_to_mpf(w.im)) - z)
                    <= fraction_to_mpf(w.radius) + tol
                ]
            if len(hits) == 1:
                return hits[0].refine(bits)
            prec *= 2
        raise RefinementFailed("could not identify element as an isolated root")


def _interval_horner(c: tuple, iv: RationalInterval) -> RationalInterval:
    lo = hi = Fraction(0)
    for a in reversed(c):
        prods = (lo * iv.lo, lo * iv.hi, hi * iv.lo, hi * iv.hi)
        lo, hi = min(prods) + a, max(prods) + a
    return RationalInterval(lo, hi)


# ---------------------------------------------------------------------------
# field construction


def field_of(value: AlgebraicValue, name: str = "a"):
    """Q(value): the rationals when the value is rational."""
    if value.is_rational:
        return QQ
    return NumberField(value, name)


def gaussian_field() -> NumberField:
    return NumberField(
        AlgebraicValue((1, 0, 1), Fraction(0), Fraction(1), Fraction(1, 2), False), "i"
    )


def value_in_field(field, value: AlgebraicValue):
    """Element of ``field`` equal to ``value`` when the field is Q(value) itself."""
    if value.is_rational:
        return field(value.exact_rational)
    if isinstance(field, NumberField) and field.value.poly == value.poly and (
        field.value.re == value.re and field.value.im == value.im
    ):
        return field.gen
    raise ValueError("value is not the generator of this field")


def compositum(K, beta: AlgebraicValue, name: str = "g"):
    """A field L containing K and beta.

    Returns ``(L, embed, beta_L)`` where ``embed`` maps elements of K into L.
    The algebra Q[y]/(f) (x) Q[z]/(m) is presented by a primitive element
    ``y + c z``; its characteristic polynomial defines L (square-free; split
    lazily by the dynamic zero test).
    """
    from .matrix import ExactMatrix, char_poly, inverse

    if beta.is_rational:
        return K, (lambda x: K(x) if K is QQ else K.embed(x)), K(beta.exact_rational)
    if K is QQ:
        L = NumberField(beta, name)
        return L, (lambda x: L(Fraction(x))), L.gen
    f = K.modulus
    m = P.monic(P.to_fraction(beta.poly))
    d1, d2 = P.degree(f), P.degree(m)
    D = d1 * d2

    def mult_by(y_poly: tuple, z_poly: tuple) -> list[list[Fraction]]:
        # matrix of multiplication by y_poly(y) + z_poly(z) on basis y^i z^j
        cols = []
        for i in range(d1):
            for j in range(d2):
                vec = [[Fraction(0)] * d2 for _ in range(d1)]
                yi = P.rem(P.mul((Fraction(0),) * i + (Fraction(1),), y_poly), f) if y_poly else ()
                for a, c in enumerate(yi):
                    vec[a][j] += c
                zj = P.rem(P.mul((Fraction(0),) * j + (Fraction(1),), z_poly), m) if z_poly else ()
                for b, c in enumerate(zj):
                    vec[i][b] += c
                cols.append([vec[a][b] for a in range(d1) for b in range(d2)])
        return [[cols[c][r] for c in range(D)] for r in range(D)]

    for c in (1, -1, 2, -2, 3, -3, 5, 7, 11):
        M = mult_by((Fraction(0), Fraction(1)), (Fraction(0), Fraction(c)))
        N = char_poly(ExactMatrix(M))
        N = P.to_fraction(N)
        if P.degree(P.gcd(N, P.derivative(N))) > 0:
            continue
        # powers of gamma in the tensor basis
        powers = []
        v = [Fraction(1) if k == 0 else Fraction(0) for k in range(D)]
        for _ in range(D):
            powers.append(v)
            v = [sum(M[r][k] * v[k] for k in range(D)) for r in range(D)]
        V = [[powers[k][r] for k in range(D)] for r in range(D)]
        Vinv = inverse(V)
        y_vec = [Fraction(0)] * D
        z_vec = [Fraction(0)] * D
        for a_, cf in enumerate(P.rem((Fraction(0), Fraction(1)), f)):
            y_vec[a_ * d2] = cf
        for b_, cf in enumerate(P.rem((Fraction(0), Fraction(1)), m)):
            z_vec[b_] = cf
        a_coeffs = tuple(sum(Fraction(Vinv[r][k]) * y_vec[k] for k in range(D)) for r in range(D))
        b_coeffs = tuple(sum(Fraction(Vinv[r][k]) * z_vec[k] for k in range(D)) for r in range(D))
        gamma = _locate_sum(K.value, beta, c, P.primitive_int(N))
        L = NumberField(gamma, name)
        a_poly = P.strip(a_coeffs)

        def embed(x, K=K, L=L, a_poly=a_poly):
            if isinstance(x, NFElement):
                if x.field is not K:
                    raise TypeError("element not in the base field")
                return NFElement(L, L.reduce(P.compose(K.reduce(x.coeffs), a_poly)))
            return L(x)

        beta_L = NFElement(L, L.reduce(P.strip(b_coeffs)))
        shrink_field(L)
        return L, embed, beta_L
    raise ArithmeticError("no primitive element found among small multipliers")


def _locate_sum(alpha: AlgebraicValue, beta: AlgebraicValue, c: int, N: tuple) -> AlgebraicValue:
    """Isolating disc of alpha + c*beta among the roots of N."""
    prec = 64
    while prec <= MAX_PREC:
        a = alpha.refine(prec)
        b = beta.refine(prec)
        cre = a.re + c * b.re
        cim = a.im + c * b.im
        rad = a.radius + abs(c) * b.radius
        hits = [
            w
            for w in isolate_roots(N, prec)
            if (w.re - cre) ** 2 + (w.im - cim) ** 2 <= (w.radius + rad) ** 2
        ]
        if len(hits) == 1:
            return hits[0]
        prec *= 2
    raise RefinementFailed("could not isolate the primitive element")


def shrink_field(L: NumberField, prec: int = 256) -> None:
    """Try to replace the modulus by a smaller factor found by integer-relation search.

    Purely an efficiency step: a candidate polynomial only takes effect through
    the exact dynamic zero test.
    """
    from .lll import lll_reduce

    n = L.degree
    if n <= 2:
        return
    prec = max(prec, 32 * n)
    x = L.gen_approx(prec)
    for d in range(1, n):
        with mpmath.workprec(prec):
            pw = [mpmath.mpf(1)]
            for _ in range(d):
                pw.append(pw[-1] * x)
            scale = mpmath.mpf(2) ** (prec - 16)
            if L.is_real:
                comps = [[int(mpmath.nint(p * scale))] for p in pw]
            else:
                comps = [
                    [int(mpmath.nint(mpmath.re(p) * scale)), int(mpmath.nint(mpmath.im(p) * scale))]
                    for p in pw
                ]
        rows = [[1 if i == j else 0 for j in range(d + 1)] + comps[i] for i in range(d + 1)]
        red = lll_reduce(rows)
        q = P.strip(red[0][: d + 1])
        if P.degree(q) < 1 or max(abs(c) for c in q) > (1 << 64):
            continue
        if P.degree(P.gcd(P.to_fraction(q), L.modulus)) < 1:
            continue
        if L.split_with(q) and L.degree <= d:
            return
