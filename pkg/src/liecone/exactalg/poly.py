"""Dense univariate polynomials with exact coefficients.

A polynomial is a tuple of coefficients, lowest degree first, with no
trailing zeros (the zero polynomial is the empty tuple).  The functions here
work for any coefficient type supporting exact field arithmetic (``int``,
``Fraction``, number-field elements); those that need a total order
(Sturm sequences, root counting) require rational coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd, isqrt
from typing import Iterable, Sequence

Poly = tuple


def strip(p: Iterable) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p: Poly) -> int:
    return len(p) - 1


def lead(p: Poly):
    return p[-1]


def add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return strip((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def sub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return strip((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n))


def scale(p: Poly, c) -> Poly:
    return strip(c * x for x in p)


def mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return strip(out)


def power(p: Poly, k: int) -> Poly:
    out: Poly = (1,)
    base = p
    while k:
        if k & 1:
            out = mul(out, base)
        base = mul(base, base)
        k >>= 1
    return out


def _fdiv(x, y):
    if isinstance(x, int) and isinstance(y, int):
        return Fraction(x, y)
    return x / y


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Long division over a field; ``b`` must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    if len(a) <= db:
        return (), strip(a)
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1 - db, -1, -1):
        c = a[i + db]
        if c == 0:
            continue
        c = _fdiv(c, lb)
        q[i] = c
        for j in range(db + 1):
            a[i + j] -= c * b[j]
    return strip(q), strip(a[:db])


def rem(a: Poly, b: Poly) -> Poly:
    return divmod_poly(a, b)[1]


def exact_div(a: Poly, b: Poly) -> Poly:
    q, r = divmod_poly(a, b)
    if r:
        raise ArithmeticError("polynomial division is not exact")
    return q


def divides(b: Poly, a: Poly) -> bool:
    return not rem(a, b)


def monic(p: Poly) -> Poly:
    if not p:
        return p
    c = p[-1]
    if c == 1:
        return p
    return tuple(_fdiv(x, c) for x in p)


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the coefficient field."""
    a, b = strip(a), strip(b)
    while b:
        a, b = b, rem(a, b)
    return monic(a)


def ext_gcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g``, ``g`` monic."""
    r0, r1 = strip(a), strip(b)
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    if not r0:
        return (), s0, t0
    c = r0[-1]
    inv = _fdiv(1, c)
    return scale(r0, inv), scale(s0, inv), scale(t0, inv)


def derivative(p: Poly) -> Poly:
    return strip(i * p[i] for i in range(1, len(p)))


def evaluate(p: Poly, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose(p: Poly, q: Poly) -> Poly:
    """Return ``p(q(x))``."""
    acc: Poly = ()
    for c in reversed(p):
        acc = add(mul(acc, q), (c,) if c != 0 else ())
    return acc


def shift_reflect(p: Poly) -> Poly:
    """Return ``p(-x)``."""
    return strip(c if i % 2 == 0 else -c for i, c in enumerate(p))


def reverse(p: Poly) -> Poly:
    """Return ``x^deg p * p(1/x)``."""
    return strip(reversed(p))


def to_fraction(p: Poly) -> Poly:
    return tuple(Fraction(c) for c in p)


def primitive_int(p: Poly) -> Poly:
    """Scale a rational polynomial to a primitive integer one with positive lead."""
    p = strip(p)
    if not p:
        return ()
    den = 1
    for c in p:
        d = Fraction(c).denominator
        den = den * d // igcd(den, d)
    ints = [int(Fraction(c) * den) for c in p]
    g = 0
    for c in ints:
        g = igcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def squarefree_part(p: Poly) -> Poly:
    """Square-free part as a primitive integer polynomial (rational input)."""
    p = to_fraction(strip(p))
    if len(p) <= 2:
        return primitive_int(p)
    g = gcd(p, derivative(p))
    return primitive_int(exact_div(p, g))


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: list of ``(factor, multiplicity)`` with primitive integer factors."""
    p = monic(to_fraction(strip(p)))
    out = []
    if len(p) <= 1:
        return out
    dp = derivative(p)
    a = gcd(p, dp)
    b = exact_div(p, a)
    c = exact_div(dp, a)
    d = sub(c, derivative(b))
    i = 1
    while len(b) > 1:
        a = gcd(b, d)
        b = exact_div(b, a)
        c = exact_div(d, a)
        d = sub(c, derivative(b))
        if len(a) > 1:
            out.append((primitive_int(a), i))
        i += 1
    return out


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> Poly:
    """The n-th cyclotomic polynomial with integer coefficients."""
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    num: Poly = (-1,) + (0,) * (n - 1) + (1,)
    for d in range(1, n):
        if n % d == 0:
            num = exact_div(num, cyclotomic(d))
    return tuple(int(c) for c in num)


def cyclotomic_indices(max_degree: int) -> list[int]:
    """All n with phi(n) <= max_degree, using phi(n) >= sqrt(n/2)."""
    bound = max(2, 2 * max_degree * max_degree)
    return [n for n in range(1, bound + 1) if euler_phi(n) <= max_degree]


def cyclotomic_split(p: Poly) -> tuple[dict[int, int], Poly]:
    """Divide out maximal powers of every cyclotomic factor.

    Returns ``(exponents, residual)`` where ``exponents[n]`` is the power of
    the n-th cyclotomic polynomial dividing ``p`` and ``residual`` is what is
    left (integer coefficients when ``p`` is monic integer).
    """
    p = strip(p)
    exps: dict[int, int] = {}
    if len(p) <= 1:
        return exps, p
    for n in cyclotomic_indices(degree(p)):
        phi_n = cyclotomic(n)
        if len(phi_n) > len(p):
            continue
        k = 0
        while len(p) >= len(phi_n):
            q, r = divmod_poly(p, phi_n)
            if r:
                break
            p = tuple(int(c) if Fraction(c).denominator == 1 else c for c in q)
            k += 1
        if k:
            exps[n] = k
    return exps, p


def is_cyclotomic_product(p: Poly) -> bool:
    """True iff ``p`` (monic, integer, constant term +-1) is a product of cyclotomics."""
    p = strip(p)
    if not p or p[-1] != 1 or any(Fraction(c).denominator != 1 for c in p):
        raise ValueError("expected a monic integer polynomial")
    if abs(p[0]) != 1:
        raise ValueError("constant term must be +1 or -1")
    _, residual = cyclotomic_split(p)
    return len(residual) == 1


# ---------------------------------------------------------------------------
# real root counting


def sturm_sequence(p: Poly) -> list[Poly]:
    p = to_fraction(strip(p))
    seq = [p, derivative(p)]
    while seq[-1]:
        r = rem(seq[-2], seq[-1])
        seq.append(tuple(-c for c in r))
    return seq[:-1]


def _sign_changes(values: Sequence) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _eval_at_inf(p: Poly, positive: bool):
    if not p:
        return 0
    c = p[-1]
    if not positive and degree(p) % 2 == 1:
        c = -c
    return c


def count_real_roots(p: Poly, lo=None, hi=None) -> int:
    """Number of distinct real roots of ``p`` in ``(lo, hi]``; ``None`` means infinity."""
    seq = sturm_sequence(p)

    def changes(x, positive):
        if x is None:
            return _sign_changes([_eval_at_inf(s, positive) for s in seq])
        return _sign_changes([evaluate(s, Fraction(x)) for s in seq])

    return changes(lo, False) - changes(hi, True)


# ---------------------------------------------------------------------------
# reciprocal polynomials


def is_reciprocal(p: Poly) -> bool:
    """True iff ``x^d p(1/x) = +-p(x)``."""
    p = strip(p)
    r = reverse(p)
    return r == p or r == tuple(-c for c in p)


def trace_polynomial(p: Poly) -> Poly:
    """For reciprocal ``p`` of even degree 2d, the ``T`` with ``p(x) = x^d T(x + 1/x)``."""
    p = to_fraction(strip(p))
    if degree(p) % 2 or reverse(p) != p:
        raise ValueError("trace polynomial needs a reciprocal polynomial of even degree")
    d = degree(p) // 2
    rest = list(p)
    t = [Fraction(0)] * (d + 1)
    # peel off (x + 1/x)^k from the top, working on the symmetric coefficient list
    for k in range(d, -1, -1):
        c = rest[d + k]
        t[k] = c
        if c == 0:
            continue
        # subtract c * x^d * (x + 1/x)^k
        for j in range(k + 1):
            binom = _binom(k, j)
            rest[d + k - 2 * j] -= c * binom
    if any(x != 0 for x in rest):
        raise ArithmeticError("trace polynomial reconstruction failed")
    return strip(t)


@lru_cache(maxsize=None)
def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


# ---------------------------------------------------------------------------
# display


def to_str(p: Poly, var: str = "x") -> str:
    p = strip(p)
    if not p:
        return "0"
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        neg = c < 0
        a = -c if neg else c
        if i == 0:
            body = str(a)
        else:
            mon = var if i == 1 else f"{var}^{i}"
            body = mon if a == 1 else f"{a}*{mon}"
        terms.append(("- " if neg else "+ ") + body)
    s = " ".join(terms)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def int_sqrt_ceil(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1
