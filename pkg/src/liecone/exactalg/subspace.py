"""Linear algebra over an exact field and canonical subspaces.

Vectors are tuples; the field is implicit in the entry type (``Fraction`` or
:class:`NFElement`), with zero tests exact in both cases.  Subspaces store
their basis in reduced row echelon form, so equal subspaces have identical
bases and loop-termination tests are plain comparisons.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .matrix import ExactMatrix, _fdiv, _norm
from .numfield import QQ, NFElement, field_of


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _fdiv(1, m[r][c])
        m[r] = [_norm(x * inv) for x in m[r]]
        m[r][c] = 1
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f != 0:
                    m[i] = [_norm(a - f * b) for a, b in zip(m[i], m[r])]
                    m[i][c] = 0
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def kernel(rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Basis (canonical) of {x : rows . x = 0}."""
    if not rows:
        return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(red, pivots):
            v[pc] = _norm(-row[fc])
        basis.append(v)
    return basis


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0])


def solve(rows: Sequence[Sequence], rhs: Sequence):
    """One solution x of rows . x = rhs, or None."""
    if not rows:
        return None
    n = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [0] * n
    for row, pc in zip(red, pivots):
        x[pc] = row[n]
    return x


def field_of_entries(*seqs):
    """The field of the first number-field entry found (QQ otherwise)."""
    for seq in seqs:
        for x in _flatten(seq):
            if isinstance(x, NFElement):
                return x.field
    return QQ


def _flatten(seq):
    for x in seq:
        if isinstance(x, (list, tuple)):
            yield from _flatten(x)
        elif isinstance(x, ExactMatrix):
            yield from _flatten(x.rows)
        elif isinstance(x, Subspace):
            yield from _flatten(x.basis)
        else:
            yield x


class Subspace:
    """Subspace of K^n with canonical reduced-echelon basis."""

    __slots__ = ("n", "basis", "pivots")

    def __init__(self, n: int, vectors: Sequence[Sequence] = ()):
        vectors = [list(v) for v in vectors]
        for v in vectors:
            if len(v) != n:
                raise ValueError("vector length does not match ambient rank")
        red, piv = rref(vectors) if vectors else ([], [])
        self.n = n
        self.basis = tuple(tuple(r) for r in red)
        self.pivots = tuple(piv)

    @classmethod
    def ambient(cls, n: int) -> "Subspace":
        return cls(n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, [])

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_rational(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for r in self.basis for x in r)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.pivots == other.pivots and all(
            a == b for r, s in zip(self.basis, other.basis) for a, b in zip(r, s)
        )

    def __repr__(self):
        return f"Subspace(n={self.n}, basis={[list(b) for b in self.basis]})"

    def annihilator(self) -> list[list]:
        """Rows y with y . x = 0 for every x in the subspace."""
        if not self.basis:
            return [[1 if i == j else 0 for j in range(self.n)] for i in range(self.n)]
        return kernel(self.basis, self.n)

    def contains(self, v: Sequence) -> bool:
        return all(_dotp(a, v) == 0 for a in self.annihilator())

    def contains_subspace(self, other: "Subspace") -> bool:
        ann = self.annihilator()
        return all(_dotp(a, v) == 0 for a in ann for v in other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.n != other.n:
            raise ValueError("ambient ranks differ")
        eqs = self.annihilator() + other.annihilator()
        return Subspace(self.n, kernel(eqs, self.n) if eqs else Subspace.ambient(self.n).basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.n, list(self.basis) + list(other.basis))

    def coordinates(self, v: Sequence) -> list:
        """Coordinates of v in the echelon basis (v must lie in the subspace)."""
        c = [v[p] for p in self.pivots]
        recon = [sum((ci * b[j] for ci, b in zip(c, self.basis)), 0) for j in range(self.n)]
        if any(x != y for x, y in zip(recon, v)):
            raise ValueError("vector not in subspace")
        return c

    def from_coordinates(self, c: Sequence) -> list:
        return [_norm(sum((ci * b[j] for ci, b in zip(c, self.basis)), 0)) for j in range(self.n)]

    def image(self, m: ExactMatrix) -> "Subspace":
        return Subspace(self.n, [m @ b for b in self.basis])

    def preimage(self, m: ExactMatrix) -> "Subspace":
        """{x : m x in self}."""
        ann = self.annihilator()
        eqs = [[_dotp(a, col) for col in zip(*m.rows)] for a in ann]
        eqs = [e for e in eqs if any(x != 0 for x in e)]
        if not eqs:
            return Subspace.ambient(self.n)
        return Subspace(self.n, kernel(eqs, self.n))

    def restrict_matrix(self, m: ExactMatrix) -> ExactMatrix:
        """Matrix of m on this (m-invariant) subspace in echelon-basis coordinates.

        Column j holds the coordinates of m applied to basis vector j.
        """
        cols = [self.coordinates(m @ b) for b in self.basis]
        k = self.dim
        return ExactMatrix([[cols[j][i] for j in range(k)] for i in range(k)])

    def is_invariant(self, m: ExactMatrix) -> bool:
        return self.contains_subspace(self.image(m))


def _dotp(a, b):
    acc = 0
    for x, y in zip(a, b):
        if x == 0 or y == 0:
            continue
        acc = acc + x * y
    return acc


RationalSubspace = Subspace


def fixed_space(m: ExactMatrix) -> Subspace:
    """ker(m - I) with canonical echelon basis."""
    return Subspace(m.rank, kernel(m.minus_scalar(1).rows, m.rank))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a.intersect(b)


def largest_invariant_subspace(f: Subspace, gens: Sequence[ExactMatrix]) -> Subspace:
    """Largest W inside f with g(W) = W for every generator.

    Iterates W <- W cap g(W) cap g^-1(W) until stable; each pass either keeps W
    or drops its dimension, so at most dim f passes are needed.
    """
    w = f
    invs = [g.inverse() for g in gens]
    while True:
        new = w
        for g, gi in zip(gens, invs):
            new = new.intersect(w.image(g)).intersect(w.image(gi))
        if new == w:
            return w
        w = new


def eigenspace(m: ExactMatrix, lam) -> Subspace:
    """ker(m - lam I) over the field containing lam.

    ``lam`` may be a rational, a number-field element, or an
    :class:`~liecone.exactalg.roots.AlgebraicValue` (in which case the
    computation runs in Q(lam)).  Raises ValueError if lam is not an eigenvalue.
    """
    from .roots import AlgebraicValue

    if isinstance(lam, AlgebraicValue):
        K = field_of(lam)
        lam = K(lam.exact_rational) if K is QQ else K.gen
        if K is not QQ:
            m = ExactMatrix([[K(x) if not isinstance(x, NFElement) else x for x in r] for r in m.rows])
    elif isinstance(lam, NFElement):
        K = lam.field
        m = ExactMatrix([[K(x) if not isinstance(x, NFElement) else x for x in r] for r in m.rows])
    sp = Subspace(m.rank, kernel(m.minus_scalar(lam).rows, m.rank))
    if sp.dim == 0:
        raise ValueError("not an eigenvalue: kernel of (m - lambda I) is zero")
    return sp
