"""Exact square matrices and the integer-matrix operations built on them."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import poly as P


class ExactMatrix:
    """Square matrix with exact entries (ints, Fractions or number-field elements).

    Entries are stored as a tuple of row tuples.  Integer-valued rational
    entries are normalised to ``int`` so that lattice-mode matrices stay in
    plain Python integers.
    """

    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(_norm(x) for x in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("ExactMatrix must be square and nonempty")
        self.rows = rows
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence) -> "ExactMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def block_diag(cls, *blocks: "ExactMatrix") -> "ExactMatrix":
        n = sum(b.rank for b in blocks)
        out = [[0] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.rank):
                for j in range(b.rank):
                    out[off + i][off + j] = b.rows[i][j]
            off += b.rank
        return cls(out)

    # -- basic properties -------------------------------------------------
    @property
    def rank(self) -> int:
        """Lattice rank r (the matrix is r x r)."""
        return len(self.rows)

    @property
    def is_integer(self) -> bool:
        return all(isinstance(x, int) for row in self.rows for x in row)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for row in self.rows for x in row)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return f"ExactMatrix({[list(r) for r in self.rows]!r})"

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    # -- arithmetic ---------------------------------------------------------
    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            n = self.rank
            cols = list(zip(*other.rows))
            return ExactMatrix([[_dot(self.rows[i], cols[j]) for j in range(n)] for i in range(n)])
        return tuple(_dot(row, other) for row in self.rows)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-a for a in r] for r in self.rows])

    def scaled(self, c) -> "ExactMatrix":
        return ExactMatrix([[c * a for a in r] for r in self.rows])

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self.rows))

    def minus_scalar(self, lam) -> "ExactMatrix":
        return ExactMatrix(
            [[a - lam if i == j else a for j, a in enumerate(r)] for i, r in enumerate(self.rows)]
        )

    def is_identity(self) -> bool:
        return all(
            (a == 1 if i == j else a == 0) for i, r in enumerate(self.rows) for j, a in enumerate(r)
        )

    def det(self):
        return det(self.rows)

    def is_unimodular(self) -> bool:
        """Integer entries and determinant +-1 (an element of GL(r, Z))."""
        return self.is_integer and self.det() in (1, -1)

    def inverse(self) -> "ExactMatrix":
        inv = inverse(self.rows)
        return ExactMatrix(inv)

    def __pow__(self, k: int) -> "ExactMatrix":
        if k < 0:
            return self.inverse() ** (-k)
        out = ExactMatrix.identity(self.rank)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def max_abs_entry(self) -> int:
        return max(abs(x) for r in self.rows for x in r)


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    if isinstance(x, bool):
        return int(x)
    return x


def _dot(a, b):
    acc = 0
    for x, y in zip(a, b):
        if x == 0 or y == 0:
            continue
        acc = acc + x * y
    return acc


def _fdiv(x, y):
    if isinstance(x, int) and isinstance(y, int):
        return Fraction(x, y)
    return x / y


def det(rows: Sequence[Sequence]):
    """Fraction-free (Bareiss) determinant; exact for integer input."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                if isinstance(num, int) and isinstance(prev, int):
                    m[i][j] = num // prev
                else:
                    m[i][j] = _fdiv(num, prev)
        prev = m[k][k]
    return _norm(sign * m[n - 1][n - 1])


def inverse(rows: Sequence[Sequence]) -> list[list]:
    """Gauss-Jordan inverse over the entries' field; raises ZeroDivisionError if singular."""
    n = len(rows)
    m = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = _fdiv(1, m[c][c])
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [[_norm(x) for x in r[n:]] for r in m]


def char_poly(m: ExactMatrix) -> P.Poly:
    """Characteristic polynomial det(xI - m), monic, lowest degree first.

    Berkowitz's division-free algorithm: only ring operations are used, so
    integer matrices give integer coefficients and number-field matrices give
    coefficients in the same field.
    """
    a = m.rows
    n = len(a)
    # vect holds the char poly of the leading (k x k) block, highest degree first
    vect = [1, -a[0][0]]
    for k in range(1, n):
        r_col = [a[i][k] for i in range(k)]  # column above diagonal
        s_row = a[k][:k]  # row left of diagonal
        c = a[k][k]
        # Toeplitz column: 1, -c, -s r, -s A r, -s A^2 r, ...
        toeplitz = [1, -c]
        v = r_col
        for _ in range(k):
            toeplitz.append(-_dot(s_row, v))
            v = [_dot(a[i][:k], v) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = 0
            for j in range(min(i, k) + 1):
                if i - j < len(toeplitz):
                    acc = acc + toeplitz[i - j] * vect[j]
            new.append(acc)
        vect = new
    return tuple(_norm(x) for x in reversed(vect))


def exterior_power(m: ExactMatrix, k: int) -> ExactMatrix:
    """Matrix of the induced map on the k-th exterior power.

    Basis: k-subsets of {0..r-1} in lexicographic order; entry (I, J) is the
    minor with rows I and columns J.
    """
    r = m.rank
    if not 0 <= k <= r:
        raise ValueError(f"exterior power degree {k} out of range 0..{r}")
    if k == 0:
        return ExactMatrix([[1]])
    subsets = list(combinations(range(r), k))
    rows = []
    for I in subsets:
        row = []
        for J in subsets:
            row.append(det([[m.rows[i][j] for j in J] for i in I]))
        rows.append(row)
    return ExactMatrix(rows)


def commutator(g: ExactMatrix, h: ExactMatrix) -> ExactMatrix:
    """g h g^-1 h^-1."""
    return g @ h @ g.inverse() @ h.inverse()
