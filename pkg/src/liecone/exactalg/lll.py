"""LLL lattice reduction on integer row bases (exact rational Gram-Schmidt)."""

from __future__ import annotations

from fractions import Fraction


def lll_reduce(basis: list[list[int]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Return an LLL-reduced basis of the lattice spanned by the (independent) rows."""
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n == 0:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    bstar: list[list[Fraction]] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    bnorm = [Fraction(0)] * n

    def gram_schmidt():
        bstar.clear()
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = dot(b[i], bstar[j]) / bnorm[j] if bnorm[j] else Fraction(0)
                v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
            bstar.append(v)
            bnorm[i] = dot(v, v)

    gram_schmidt()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                for i in range(j + 1):
                    mu[k][i] -= q * (mu[j][i] if i < j else 1)
        if bnorm[k] >= (delta - mu[k][k - 1] ** 2) * bnorm[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            gram_schmidt()
            k = max(k - 1, 1)
    return b


def integer_relations(values: list, scale_bits: int, max_coeff: int = 1 << 16) -> list[list[int]]:
    """Small integer vectors m with sum m_i v_i approximately 0 (candidates only).

    ``values`` are rows of mpmath reals (one row per unknown, one column per
    coordinate).  Each reduced basis row contributes its coefficient part when
    the coefficients are below ``max_coeff``.
    """
    import mpmath

    s = len(values)
    if s == 0:
        return []
    cols = len(values[0])
    scale = mpmath.mpf(2) ** scale_bits
    rows = []
    for i in range(s):
        row = [1 if i == j else 0 for j in range(s)]
        row += [int(mpmath.nint(values[i][c] * scale)) for c in range(cols)]
        rows.append(row)
    red = lll_reduce(rows)
    out = []
    for row in red:
        m = row[:s]
        if any(m) and max(abs(x) for x in m) <= max_coeff:
            out.append(m)
    return out
