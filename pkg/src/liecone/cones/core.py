"""Strictly convex closed cones: polyhedral and Lorentzian.

Cones live in K^n (K = Q or a real number field) inside an ambient subspace,
and every description is kept in the original ambient coordinates so that
restrictions compose without coordinate bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..exactalg.matrix import ExactMatrix, _fdiv
from ..exactalg.subspace import Subspace, kernel
from .dd import NotPointed, dedupe, extreme_rays, normalize_ray, sort_rays
from .lp import nonneg_solution


def _dot(a, b):
    acc = 0
    for x, y in zip(a, b):
        if x == 0 or y == 0:
            continue
        acc = acc + x * y
    return acc


def _is_rational(vals) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in vals)


def _bilinear(Q: ExactMatrix, u, v):
    return _dot(u, Q @ v)


class ConeError(ValueError):
    """Malformed cone data (dimension mismatch, bad signature, ...)."""


# ---------------------------------------------------------------------------
# polyhedral


class PolyhedralCone:
    """Nonnegative span of finitely many rays in K^n.

    Facet inequalities are derived once at construction (double description
    on the dual cone inside the span of the rays).
    """

    kind = "polyhedral"

    def __init__(self, rays: Sequence[Sequence], n: int | None = None):
        rays = [tuple(r) for r in rays]
        if n is None:
            if not rays:
                raise ConeError("ambient rank needed for an empty ray list")
            n = len(rays[0])
        for r in rays:
            if len(r) != n:
                raise ConeError("ray length does not match ambient rank")
        rays = [normalize_ray(r) for r in rays if any(x != 0 for x in r)]
        self.n = n
        self.rays = tuple(dedupe(rays))
        self.span = Subspace(n, self.rays)
        self.equations = self.span.annihilator() if self.span.dim < n else []
        self.facets = self._facets()

    def _facets(self) -> list[tuple]:
        if not self.rays:
            return []
        piv = self.span.pivots
        k = len(piv)
        coords = [[r[p] for p in piv] for r in self.rays]
        dual = extreme_rays(coords, k)
        out = []
        for y in dual:
            a = [0] * self.n
            for p, c in zip(piv, y):
                a[p] = c
            out.append(tuple(a))
        return out

    @property
    def dim(self) -> int:
        return self.span.dim

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.n:
            raise ConeError("dimension mismatch")
        if all(x == 0 for x in v):
            return True
        if not self.rays:
            return False
        if _is_rational(v) and all(_is_rational(r) for r in self.rays):
            M = [[r[i] for r in self.rays] for i in range(self.n)]
            return nonneg_solution(M, list(v)) is not None
        return self.contains_by_facets(v)

    def contains_by_facets(self, v: Sequence) -> bool:
        if any(_dot(e, v) != 0 for e in self.equations):
            return False
        return all(_dot(a, v) >= 0 for a in self.facets)

    def strict_convexity_witness(self):
        """None if strictly convex, else a ray r with the line R r inside the cone."""
        if not self.rays:
            return None
        m = len(self.rays)
        M = [[r[i] for r in self.rays] for i in range(self.n)] + [[1] * m]
        b = [0] * self.n + [1]
        sol = nonneg_solution(M, b)
        if sol is None:
            return None
        j = next(i for i, x in enumerate(sol) if x != 0)
        return self.rays[j]

    def extreme(self) -> tuple:
        """Irredundant rays (requires strict convexity)."""
        if not self.rays:
            return ()
        if self.strict_convexity_witness() is not None:
            raise NotPointed("extreme rays of a cone containing a line")
        need = self.dim - 1
        out = []
        for r in self.rays:
            tight = [a for a in self.facets if _dot(a, r) == 0]
            rows = [[a[p] for p in self.span.pivots] for a in tight]
            from ..exactalg.subspace import rank

            if need == 0 or (rows and rank(rows) == need):
                out.append(r)
        return tuple(sort_rays(out))

    def canonical(self):
        return ("polyhedral", self.n, self.extreme())

    def first_point(self):
        return self.rays[0] if self.rays else None

    def __repr__(self):
        return f"PolyhedralCone(n={self.n}, rays={[list(r) for r in self.rays]})"


# ---------------------------------------------------------------------------
# Lorentzian


def signature(gram: Sequence[Sequence]) -> tuple[int, int, int]:
    """(positive, negative, zero) inertia of a symmetric matrix, exactly."""
    m = [list(r) for r in gram]
    n = len(m)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if m[i][i] != 0), None)
        if piv is None:
            # all remaining diagonal entries zero; look for an off-diagonal pair
            pair = next(((i, j) for i in active for j in active if i < j and m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # replace e_i by e_i + e_j (congruence), making m[i][i] = 2 m[i][j] != 0
            for k in range(n):
                m[i][k] = m[i][k] + m[j][k]
            for k in range(n):
                m[k][i] = m[k][i] + m[k][j]
            continue
        d = m[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = _fdiv(m[i][piv], d)
            if f != 0:
                for k in range(n):
                    m[i][k] = m[i][k] - f * m[piv][k]
                for k in range(n):
                    m[k][i] = m[k][i] - f * m[k][piv]
    return pos, neg, n - pos - neg


def _gram_on(basis, Q: ExactMatrix):
    return [[_bilinear(Q, u, v) for v in basis] for u in basis]


class LorentzianCone:
    """{x in U : q(x) >= 0, (x, h) >= 0} for a form q of signature (1, dim U - 1) on U."""

    kind = "lorentzian"

    def __init__(self, gram, orientation: Sequence, ambient: Subspace | None = None):
        Q = gram if isinstance(gram, ExactMatrix) else ExactMatrix(gram)
        if Q != Q.transpose():
            raise ConeError("Gram matrix must be symmetric")
        n = Q.rank
        self.gram = Q
        self.n = n
        self.ambient = ambient if ambient is not None else Subspace.ambient(n)
        self.orientation = tuple(orientation)
        if len(self.orientation) != n:
            raise ConeError("orientation length does not match ambient rank")
        if not self.ambient.contains(self.orientation):
            raise ConeError("orientation vector outside the ambient subspace")
        sig = signature(_gram_on(self.ambient.basis, Q))
        if sig != (1, self.ambient.dim - 1, 0):
            raise ConeError(f"form has signature {sig[:2]} (degenerate {sig[2]}), not (1, {self.ambient.dim - 1})")
        if not self.q(self.orientation) > 0:
            raise ConeError("orientation vector must have positive square")

    def q(self, v):
        return _bilinear(self.gram, v, v)

    def pair(self, u, v):
        return _bilinear(self.gram, u, v)

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @property
    def span(self) -> Subspace:
        return self.ambient

    @property
    def rays(self):
        return ()

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.n:
            raise ConeError("dimension mismatch")
        if not self.ambient.contains(v):
            return False
        return self.q(v) >= 0 and self.pair(v, self.orientation) >= 0

    def strict_convexity_witness(self):
        return None

    def canonical(self):
        return ("lorentzian", self.n, self.ambient)

    def same_cone(self, other: "LorentzianCone") -> bool:
        return (
            self.gram == other.gram
            and self.ambient == other.ambient
            and self.pair(self.orientation, other.orientation) > 0
        )

    def first_point(self):
        return self.orientation

    def __repr__(self):
        return f"LorentzianCone(n={self.n}, dim={self.dim}, orientation={list(self.orientation)})"


# ---------------------------------------------------------------------------
# handle and operations


@dataclass
class ConeHandle:
    """A cone together with the subspace it lives in."""

    kind: str
    payload: object
    ambient: Subspace = field(default=None)

    def __post_init__(self):
        if self.ambient is None:
            self.ambient = Subspace.ambient(self.payload.n)

    @classmethod
    def polyhedral(cls, rays, n=None, ambient=None) -> "ConeHandle":
        c = PolyhedralCone(rays, n)
        return cls("polyhedral", c, ambient)

    @classmethod
    def lorentzian(cls, gram, orientation, ambient=None) -> "ConeHandle":
        c = LorentzianCone(gram, orientation, ambient)
        return cls("lorentzian", c, c.ambient)

    @classmethod
    def orthant(cls, n: int) -> "ConeHandle":
        return cls.polyhedral([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return self.payload.n

    @property
    def span(self) -> Subspace:
        return self.payload.span

    @property
    def dim(self) -> int:
        return self.payload.dim

    def coords(self):
        """Rays (polyhedral) in coordinates of the ambient subspace's echelon basis."""
        if self.kind != "polyhedral":
            raise ConeError("coordinates only defined for polyhedral payloads")
        return [self.ambient.coordinates(r) for r in self.payload.rays]

    def canonical(self):
        return (self.kind, self.ambient, self.payload.canonical())

    def __eq__(self, other):
        if not isinstance(other, ConeHandle):
            return NotImplemented
        if self.kind != other.kind or self.ambient != other.ambient:
            return False
        if self.kind == "lorentzian":
            return self.payload.same_cone(other.payload)
        a, b = self.payload.extreme(), other.payload.extreme()
        return len(a) == len(b) and all(all(x == y for x, y in zip(r, s)) for r, s in zip(a, b))

    def __repr__(self):
        return f"ConeHandle({self.kind}, {self.payload!r})"


def contains(c: ConeHandle, v: Sequence) -> bool:
    """Exact membership; algebraic coordinates are decided by exact sign tests."""
    if len(v) != c.n:
        raise ConeError("dimension mismatch")
    if not c.ambient.contains(v):
        return False
    return c.payload.contains(v)


def is_strictly_convex(c: ConeHandle):
    """(True, None) or (False, witness ray spanning a line in the cone)."""
    w = c.payload.strict_convexity_witness()
    return (w is None, w)


def is_nonzero(c: ConeHandle) -> bool:
    if c.kind == "lorentzian":
        return True
    return bool(c.payload.rays)


def preserves(g: ExactMatrix, c: ConeHandle):
    """(True, None) or (False, witness): the first ray image leaving the cone."""
    if g.rank != c.n:
        raise ConeError("dimension mismatch")
    if c.kind == "polyhedral":
        for r in c.payload.rays:
            img = g @ r
            if not contains(c, img):
                return False, tuple(img)
        return True, None
    L: LorentzianCone = c.payload
    basis = L.ambient.basis
    for b in basis:
        if not L.ambient.contains(g @ b):
            return False, tuple(g @ b)
    for u in basis:
        gu = g @ u
        for v in basis:
            if L.pair(gu, g @ v) != L.pair(u, v):
                return False, ("form", tuple(u), tuple(v))
    gh = g @ L.orientation
    if not L.contains(gh):
        return False, tuple(gh)
    return True, None


def restrict(c: ConeHandle, w: Subspace) -> ConeHandle:
    """C cap W as a cone whose ambient subspace is W."""
    if w.n != c.n:
        raise ConeError("dimension mismatch")
    if not c.ambient.contains_subspace(w):
        raise ConeError("subspace is not contained in the cone's ambient subspace")
    u = w
    if c.kind == "polyhedral":
        P: PolyhedralCone = c.payload
        u = u.intersect(P.span)
        if u.dim == 0 or not P.rays:
            return ConeHandle("polyhedral", PolyhedralCone([], c.n), w)
        rows = [[_dot(a, b) for b in u.basis] for a in P.facets]
        k = u.dim
        try:
            rays_t = extreme_rays(rows, k)
        except NotPointed as exc:
            raise ConeError("restriction of a cone that is not strictly convex") from exc
        rays = [u.from_coordinates(t) for t in rays_t]
        return ConeHandle("polyhedral", PolyhedralCone(rays, c.n), w)
    L: LorentzianCone = c.payload
    if u.dim == 0:
        return ConeHandle("polyhedral", PolyhedralCone([], c.n), w)
    G = _gram_on(u.basis, L.gram)
    pos, neg, zer = signature(G)
    if pos == 1 and zer == 0:
        t = _timelike(u, L)
        if L.pair(t, L.orientation) < 0:
            t = tuple(-x for x in t)
        if u.dim == 1:
            return ConeHandle("polyhedral", PolyhedralCone([t], c.n), w)
        return ConeHandle("lorentzian", LorentzianCone(L.gram, t, u), w)
    if pos == 0 and zer == 0:
        return ConeHandle("polyhedral", PolyhedralCone([], c.n), w)
    if pos == 0 and zer == 1:
        rad = kernel(G, u.dim)
        nvec = tuple(u.from_coordinates(rad[0]))
        s = L.pair(nvec, L.orientation)
        if s == 0:
            raise ConeError("isotropic radical orthogonal to the orientation")
        if s < 0:
            nvec = tuple(-x for x in nvec)
        return ConeHandle("polyhedral", PolyhedralCone([nvec], c.n), w)
    raise ConeError(f"impossible restricted signature {(pos, neg, zer)} for a Lorentzian form")


def _timelike(u: Subspace, L: LorentzianCone):
    """A vector of u with positive square (u known to carry signature (1, *))."""
    basis = [tuple(b) for b in u.basis]
    for b in basis:
        if L.q(b) > 0:
            return b
    for i, a in enumerate(basis):
        for b in basis[i + 1 :]:
            for s in (1, -1):
                v = tuple(x + s * y for x, y in zip(a, b))
                if L.q(v) > 0:
                    return v
    # fall back to projecting the orientation vector orthogonally onto u
    G = _gram_on(basis, L.gram)
    rhs = [L.pair(b, L.orientation) for b in basis]
    from ..exactalg.subspace import solve

    coef = solve(G, rhs)
    v = tuple(u.from_coordinates(coef))
    if L.q(v) > 0:
        return v
    raise ConeError("no timelike vector found in a Lorentzian subspace")


def span_of(c: ConeHandle) -> Subspace:
    return c.payload.span


def first_point(c: ConeHandle):
    return c.payload.first_point()


def field_of_cone(c: ConeHandle):
    from ..exactalg.subspace import field_of_entries

    if c.kind == "polyhedral":
        return field_of_entries(c.payload.rays, c.ambient.basis)
    return field_of_entries(c.payload.orientation, c.ambient.basis)


def embed_cone(c: ConeHandle, emb) -> ConeHandle:
    """Move every coordinate through the field embedding ``emb``."""

    def ev(v):
        return tuple(emb(x) for x in v)

    amb = Subspace(c.n, [ev(b) for b in c.ambient.basis])
    if c.kind == "polyhedral":
        return ConeHandle("polyhedral", PolyhedralCone([ev(r) for r in c.payload.rays], c.n), amb)
    L = c.payload
    sub = Subspace(c.n, [ev(b) for b in L.ambient.basis])
    return ConeHandle("lorentzian", LorentzianCone(L.gram, ev(L.orientation), sub), amb)
