"""Isometries of Lorentzian lattices, Salem factors, dynamical degrees and torus mode.

A Lorentzian lattice is Z^r with an integral symmetric form of signature
(1, r-1) and a chosen forward cone.  For a group of isometries the common
eigenray produced by the kolchin engine has characters in {rho, 1/rho}; that
dichotomy forces the free-abelian rank of G/N(G) to be at most 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from mpmath import iv

from .cones import ConeHandle, signature
from .entropy import (
    EntropyRankReport,
    FlagBudget,
    FlagUnavailable,
    NotTriangularizable,
    _interval_rank,
    _ivprec,
    _ivf,
    _rational_rank,
    certify_relations,
    ChiVector,
    common_flag,
    entropy_rank,
    is_null_entropy,
    log_modulus,
)
from .exactalg import poly as P
from .exactalg.gaussian import GaussianRational
from .exactalg.matrix import ExactMatrix, char_poly, exterior_power
from .exactalg.roots import (
    AlgebraicValue,
    RationalInterval,
    max_modulus_root,
    mpf_to_fraction,
    spectral_radius_enclosure,
)
from .exactalg.subspace import Subspace, eigenspace, kernel
from .kolchin import CommonEigenRay, FailureCertificate, KolchinConfig, _gens, common_eigen_ray


class AnomalyError(ArithmeticError):
    """An invariant that holds for genuine Lorentzian data failed."""


class PrecisionFault(ArithmeticError):
    """A certification step did not succeed within the precision budget."""


# ---------------------------------------------------------------------------
# lattices


@dataclass
class LorentzLattice:
    gram: ExactMatrix
    orientation: tuple

    def __post_init__(self):
        if not isinstance(self.gram, ExactMatrix):
            self.gram = ExactMatrix(self.gram)
        Q = self.gram
        if not Q.is_integer or Q != Q.transpose():
            raise ValueError("Gram matrix must be symmetric with integer entries")
        self.orientation = tuple(self.orientation)
        r = Q.rank
        if len(self.orientation) != r:
            raise ValueError("orientation length does not match the rank")
        sig = signature(Q.rows)
        if sig != (1, r - 1, 0):
            raise ValueError(f"form has signature {sig[:2]} with {sig[2]}-dimensional radical, not (1, {r - 1})")
        if not self.pair(self.orientation, self.orientation) > 0:
            raise ValueError("orientation vector must have positive square")

    @property
    def rank(self) -> int:
        return self.gram.rank

    def pair(self, u, v):
        Qv = self.gram @ tuple(v)
        return sum((a * b for a, b in zip(u, Qv)), 0)

    def forward_cone(self) -> ConeHandle:
        return ConeHandle.lorentzian(self.gram, self.orientation)

    @classmethod
    def from_sublattice(cls, gram, basis, orientation_coords) -> "LorentzLattice":
        """The form restricted to the sublattice spanned by ``basis`` (rows).

        Used for forms of signature (3, b - 3) whose Lorentzian part is
        designated by the caller.
        """
        Q = gram if isinstance(gram, ExactMatrix) else ExactMatrix(gram)
        B = [tuple(b) for b in basis]
        sub = [[sum(u[i] * (Q @ v)[i] for i in range(Q.rank)) for v in B] for u in B]
        return cls(ExactMatrix(sub), tuple(orientation_coords))


def sym2(m) -> ExactMatrix:
    """Action of a 2x2 matrix on binary quadratic forms a x^2 + b xy + c y^2.

    The form f goes to f(p x + q y, r x + s y) for m = [[p, q], [r, s]]; the
    discriminant b^2 - 4ac is multiplied by det(m)^2.
    """
    m = m if isinstance(m, ExactMatrix) else ExactMatrix(m)
    (p, q), (r, s) = m.rows
    return ExactMatrix(
        [
            [p * p, p * r, r * r],
            [2 * p * q, p * s + q * r, 2 * r * s],
            [q * q, q * s, s * s],
        ]
    )


def binary_forms_lattice() -> LorentzLattice:
    """Coefficient space of binary quadratic forms with q(a, b, c) = 4ac - b^2.

    Positive definite forms make up the forward cone, oriented by x^2 + y^2.
    """
    return LorentzLattice(ExactMatrix([[0, 0, 2], [0, -1, 0], [2, 0, 0]]), (1, 0, 1))


def check_isometry(g, lat: LorentzLattice) -> bool:
    """g^T Q g = Q exactly and g maps the forward cone to itself."""
    g = g if isinstance(g, ExactMatrix) else ExactMatrix(g)
    if g.rank != lat.rank:
        raise ValueError("rank mismatch")
    if g.transpose() @ lat.gram @ g != lat.gram:
        return False
    gh = g @ lat.orientation
    return lat.pair(gh, lat.orientation) > 0


# ---------------------------------------------------------------------------
# classification


@dataclass
class IsometryClass:
    tag: str  # elliptic | parabolic | hyperbolic
    rho: AlgebraicValue | None = None
    rho_factor: tuple | None = None
    order: int | None = None


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def finite_order(g: ExactMatrix) -> int | None:
    """Order of g when finite (only divisors of the lcm of cyclotomic indices are tried)."""
    exps, residual = P.cyclotomic_split(char_poly(g))
    if P.degree(residual) >= 1:
        return None
    L = 1
    for n in exps:
        L = L * n // gcd(L, n)
    for d in _divisors(L):
        if (g**d).is_identity():
            return d
    return None


def classify(g, lat: LorentzLattice, precision: int = 64) -> IsometryClass:
    g = g if isinstance(g, ExactMatrix) else ExactMatrix(g)
    if not check_isometry(g, lat):
        raise ValueError("not an isometry of the lattice preserving the forward cone")
    if not is_null_entropy(g):
        cp = char_poly(g)
        _, residual = P.cyclotomic_split(cp)
        return IsometryClass("hyperbolic", max_modulus_root(cp, precision), P.squarefree_part(residual))
    order = finite_order(g)
    if order is not None:
        return IsometryClass("elliptic", AlgebraicValue.rational(1), None, order)
    return IsometryClass("parabolic", AlgebraicValue.rational(1))


@dataclass
class SalemCheck:
    is_salem: bool
    factor: tuple
    outside: int  # roots of modulus > 1
    on_circle: int
    inside: int
    shape: str  # "salem", "quadratic", or a description of the anomaly


def salem_check(p) -> SalemCheck:
    """Certified root count of the non-cyclotomic factor via its trace polynomial."""
    p = P.primitive_int(P.strip(tuple(p)))
    if P.is_cyclotomic_product(p):
        raise ValueError("null-entropy polynomial: no non-cyclotomic factor")
    _, residual = P.cyclotomic_split(p)
    f = P.squarefree_part(residual)
    if not P.is_reciprocal(f):
        return SalemCheck(False, f, -1, -1, -1, "not reciprocal")
    T = P.trace_polynomial(f)
    d = P.degree(T)
    big = P.count_real_roots(T, 2, None) + P.count_real_roots(T, None, -2)
    if P.evaluate(T, -2) == 0:
        big -= 1  # the half-open count (-inf, -2] includes -2, which is a unit-circle root
    circle = P.count_real_roots(T, -2, 2)
    if P.evaluate(T, 2) == 0:
        circle -= 1
    circle += sum(1 for y in (-2, 2) if P.evaluate(T, y) == 0)
    nonreal = d - big - circle
    outside = big + nonreal  # each nonreal y contributes one root outside the circle
    ok = big == 1 and nonreal == 0
    shape = "quadratic" if ok and d == 1 else ("salem" if ok else "more than one root outside the unit circle")
    return SalemCheck(ok, f, outside, 2 * circle, outside, shape)


# ---------------------------------------------------------------------------
# the rho / 1-over-rho dichotomy


@dataclass
class DichotomyEntry:
    generator: int
    chi: AlgebraicValue
    rho: AlgebraicValue
    branch: str  # "rho", "1/rho" or "both" (null entropy)
    one_dimensional: bool


@dataclass
class DichotomyReport:
    ok: bool
    entries: list = field(default_factory=list)
    ray: CommonEigenRay | None = None
    failure: FailureCertificate | None = None


def _poly_at(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def chi_dichotomy(gens, lat: LorentzLattice, config: KolchinConfig | None = None) -> DichotomyReport:
    gens = _gens(gens)
    for i, g in enumerate(gens):
        if not check_isometry(g, lat):
            raise ValueError(f"generator {i} is not an isometry preserving the forward cone")
    res = common_eigen_ray(gens, lat.forward_cone(), config)
    if isinstance(res, FailureCertificate):
        return DichotomyReport(False, failure=res)
    entries = []
    for j, g in enumerate(gens):
        chi = res.exact_eigenvalues[j]
        cp = char_poly(g)
        if is_null_entropy(g):
            if chi != 1:
                raise AnomalyError(f"null-entropy generator {j} has character other than 1")
            entries.append(DichotomyEntry(j, AlgebraicValue.rational(1), AlgebraicValue.rational(1), "both", True))
            continue
        _, residual = P.cyclotomic_split(cp)
        f = P.squarefree_part(residual)
        if not P.is_reciprocal(f):
            raise AnomalyError(f"rho-factor of generator {j} is not reciprocal")
        if _poly_at(f, chi) != 0:
            raise AnomalyError(f"character of generator {j} is not a root of its rho-factor")
        if chi == 1:
            raise AnomalyError("character 1 for a positive-entropy generator")
        branch = "rho" if chi > 1 else "1/rho"
        rho = max_modulus_root(cp)
        E = eigenspace(g, chi)
        entries.append(DichotomyEntry(j, res.eigenvalues[j], rho, branch, E.dim == 1))
    return DichotomyReport(True, entries, res)


def surface_entropy_rank(
    gens, lat: LorentzLattice, precision: int = 128, depth: int = 8, max_word_len: int = 16
) -> EntropyRankReport:
    """Rank of G/N(G) for isometries of a Lorentzian lattice (always 0 or 1)."""
    gens = _gens(gens)
    dich = chi_dichotomy(gens, lat)
    if not dich.ok:
        raise FlagUnavailable(NotTriangularizable("no common eigenray in the forward cone", dich.failure.stage, dich.failure))
    chis = []
    for e in dich.entries:
        if e.branch == "both":
            chis.append(ChiVector([RationalInterval(Fraction(0), Fraction(0))], [True], precision, "ray"))
        else:
            chis.append(ChiVector([log_modulus(e.chi, precision)], [False], precision, "ray"))
    s = len(gens)
    lower, indep = _interval_rank([c.entries for c in chis], precision + 32)
    certs, notes = certify_relations(gens, chis, s - lower, precision, depth, max_word_len)
    upper = min(1, s - _rational_rank([c.exponents for c in certs]))
    exact = lower == upper
    return EntropyRankReport(
        lower=lower,
        independent=indep,
        upper=upper,
        relations=certs,
        bound=1,
        bound_provenance="characters at the common forward-cone ray lie in {rho, 1/rho}, so log-characters span at most a line",
        exact=exact,
        status="certified exact" if exact else "bounds only",
        precision=precision,
        flag_exact=True,
        chi=chis,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# dynamical degrees


@dataclass
class DynamicalDegrees:
    degrees: list  # RationalInterval per k = 0..r
    log_degrees: list
    exact_one: list  # d_k pinned to exactly 1
    entropy: RationalInterval
    peak: list  # indices k whose d_k may attain the maximum
    precision: int


def _log_iv(x: RationalInterval, bits: int) -> RationalInterval:
    if x.lo == 1 and x.hi == 1:
        return RationalInterval(Fraction(0), Fraction(0))
    with _ivprec(bits):
        a = iv.log(_ivf(x.lo))
        b = iv.log(_ivf(x.hi))
        return RationalInterval(mpf_to_fraction(a.a), mpf_to_fraction(b.b))


def _top_k_log_sums(g: ExactMatrix, precision: int) -> list[RationalInterval]:
    """Enclosures of the sum of the k largest log-moduli, k = 0..r (second route)."""
    from .entropy import certified_spectrum

    items = []
    for s in certified_spectrum(g, precision):
        e = RationalInterval(Fraction(0), Fraction(0)) if s.pinned else log_modulus(s.value, precision)
        items += [e] * s.multiplicity
    items.sort(key=lambda e: e.mid, reverse=True)
    out = [RationalInterval(Fraction(0), Fraction(0))]
    for e in items:
        out.append(out[-1] + e)
    return out


def dynamical_degrees(g, precision: int = 64) -> DynamicalDegrees:
    """d_k = spectral radius on the k-th exterior power, certified log-concave.

    Each d_k is enclosed from the characteristic polynomial of the exterior
    power and cross-checked against the sum of the k largest log-moduli of g.
    """
    g = g if isinstance(g, ExactMatrix) else ExactMatrix(g)
    if not g.is_integer or g.det() not in (1, -1):
        raise ValueError("dynamical degrees need an integer matrix of determinant +-1")
    r = g.rank
    bits = precision + 32
    prec = precision
    while True:
        degs = [RationalInterval(Fraction(1), Fraction(1))]
        for k in range(1, r + 1):
            degs.append(spectral_radius_enclosure(char_poly(exterior_power(g, k)), prec))
        if not (degs[0].lo == degs[0].hi == 1 and degs[r].lo == degs[r].hi == 1):
            raise AnomalyError("d_0 and d_r must be exactly 1")
        logs = [_log_iv(d, bits) for d in degs]
        sums = _top_k_log_sums(g, prec)
        consistent = all(not (a.hi < b.lo or b.hi < a.lo) for a, b in zip(logs, sums))
        concave = all(
            2 * logs[k].hi - logs[k - 1].lo - logs[k + 1].lo >= 0 for k in range(1, r)
        )
        if consistent and concave:
            break
        prec *= 2
        if prec > 4 * precision + 256:
            raise PrecisionFault("log-concavity of dynamical degrees not certified within budget")
    exact_one = [d.lo == d.hi == 1 for d in degs]
    h = RationalInterval(max(l.lo for l in logs), max(l.hi for l in logs))
    peak = [k for k, l in enumerate(logs) if l.hi >= h.lo]
    return DynamicalDegrees(degs, logs, exact_one, h, peak, precision)


# ---------------------------------------------------------------------------
# torus mode


@dataclass
class TorusAction:
    generators: list
    complex_structure: ExactMatrix

    def __post_init__(self):
        self.generators = _gens(self.generators)
        J = self.complex_structure
        if not isinstance(J, ExactMatrix):
            J = self.complex_structure = ExactMatrix(J)
        r = J.rank
        if r % 2:
            raise ValueError("complex structure needs even rank")
        if not (J @ J == ExactMatrix.identity(r).scaled(-1)):
            raise ValueError("complex structure must satisfy J^2 = -I")
        for i, g in enumerate(self.generators):
            if g.rank != r:
                raise ValueError("generator rank does not match the complex structure")
            if J @ g != g @ J:
                raise ValueError(f"generator {i} does not commute with J")

    @property
    def n(self) -> int:
        return self.complex_structure.rank // 2


def holomorphic_subspace(J: ExactMatrix) -> Subspace:
    """ker(J - i I) over the Gaussian rationals (dimension n for J of rank 2n)."""
    i = GaussianRational(0, 1)
    rows = [[GaussianRational.coerce(x) - (i if a == b else 0) for b, x in enumerate(row)] for a, row in enumerate(J.rows)]
    return Subspace(J.rank, kernel(rows, J.rank))


def torus_entropy_rank(t: TorusAction, precision: int = 128, depth: int = 8, max_word_len: int = 16) -> EntropyRankReport:
    """Rank of G/N(G) read on the holomorphic part; bounded by n - 1."""
    V = holomorphic_subspace(t.complex_structure)
    if V.dim != t.n:
        raise ValueError("holomorphic subspace has the wrong dimension")
    rep = [V.restrict_matrix(g) for g in t.generators]
    flag = common_flag(t.generators, FlagBudget(precision=precision), rep=rep)
    if isinstance(flag, NotTriangularizable):
        raise FlagUnavailable(flag)
    n = t.n
    rep_ = entropy_rank(
        t.generators,
        precision,
        depth,
        max_word_len,
        flag=flag,
        bound=n - 1,
        bound_provenance=(
            f"log-moduli on the holomorphic part sum to 0 (det of g on H^1 is +-1 and splits as |det|^2), "
            f"so the rank is at most n - 1 = {n - 1}; the bound from the full rank-{2 * n} lattice is {2 * n - 1}"
        ),
    )
    rep_.sharper_bound = n - 1
    return rep_
