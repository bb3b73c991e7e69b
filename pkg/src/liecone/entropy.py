"""Null versus positive entropy, log-modulus vectors, common flags and entropy rank.

The rank of G/N(G) is bracketed from both sides.  The lower bound comes from an
interval full-rank minor of the log-modulus vectors read along a common
triangularizing flag.  The upper bound only drops for relations proved exactly:
an integer word in the generators whose characteristic polynomial is a product
of cyclotomic polynomials.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import mpmath
from mpmath import iv

from .exactalg import poly as P
from .exactalg.gaussian import GaussianRational
from .exactalg.lll import lll_reduce
from .exactalg.matrix import ExactMatrix, char_poly, inverse
from .exactalg.roots import (
    AlgebraicValue,
    RationalInterval,
    isolate_roots,
    mpf_to_fraction,
    rational_roots,
)
from .exactalg.subspace import kernel
from .kolchin import BudgetExceeded, FailureCertificate, _gens, check_unipotent_commutators


# ---------------------------------------------------------------------------
# null entropy


def _require_lattice(g: ExactMatrix) -> None:
    if not g.is_integer:
        raise ValueError("lattice mode needs integer entries")
    if g.det() not in (1, -1):
        raise ValueError("lattice mode needs determinant +-1")


def is_null_entropy(g) -> bool:
    """Exact: char_poly(g) is a product of cyclotomic polynomials (spectral radius 1)."""
    g = g if isinstance(g, ExactMatrix) else ExactMatrix(g)
    _require_lattice(g)
    return P.is_cyclotomic_product(char_poly(g))


# ---------------------------------------------------------------------------
# certified spectrum and log moduli


@dataclass(frozen=True)
class SpectralValue:
    value: AlgebraicValue
    multiplicity: int
    pinned: bool  # root of a cyclotomic factor, so log|value| = 0 exactly


def certified_spectrum(g: ExactMatrix, precision: int = 64) -> list[SpectralValue]:
    """Distinct eigenvalues with multiplicities, ordered by decreasing modulus."""
    cp = char_poly(g)
    while cp and cp[0] == 0:
        cp = cp[1:]
    out: list[SpectralValue] = []
    if P.degree(cp) < len(char_poly(g)) - 1:
        z = len(char_poly(g)) - 1 - P.degree(cp)
        out.append(SpectralValue(AlgebraicValue.rational(0), z, False))
    exps, residual = P.cyclotomic_split(cp)
    for n, e in sorted(exps.items()):
        for v in isolate_roots(P.cyclotomic(n), precision):
            out.append(SpectralValue(v, e, True))
    for f, k in P.squarefree_decomposition(residual):
        rats = rational_roots(f, precision)
        rest = P.to_fraction(f)
        for q in rats:
            out.append(SpectralValue(AlgebraicValue.rational(q), k, False))
            rest = P.exact_div(rest, (-q, Fraction(1)))
        if P.degree(rest) >= 1:
            for v in isolate_roots(P.primitive_int(rest), precision):
                out.append(SpectralValue(v, k, False))
    out.sort(key=lambda s: -float(s.value.modulus_interval(64).mid))
    return out


@contextmanager
def _ivprec(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _ivf(q: Fraction):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def log_modulus(v: AlgebraicValue, precision: int = 64) -> RationalInterval:
    """Outward-rounded enclosure of log|v| (v nonzero)."""
    bits = precision + 16
    w = v.refine(bits)
    m = w.modulus_interval(bits + 8)
    if m.lo <= 0:
        raise ValueError("log of a value whose modulus enclosure touches 0")
    with _ivprec(bits + 16):
        a = iv.log(_ivf(m.lo))
        b = iv.log(_ivf(m.hi))
        return RationalInterval(mpf_to_fraction(a.a), mpf_to_fraction(b.b))


@dataclass
class ChiVector:
    """Log-moduli of all eigenvalues (with multiplicity) as certified intervals."""

    entries: list
    pinned: list
    precision: int
    ordered_by: str = "descending"

    def __len__(self):
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(self.pinned)

    def sum_interval(self) -> RationalInterval:
        lo = sum((e.lo for e in self.entries), Fraction(0))
        hi = sum((e.hi for e in self.entries), Fraction(0))
        return RationalInterval(lo, hi)

    def midpoints(self) -> list[float]:
        return [float(e.mid) for e in self.entries]

    def max_width(self) -> Fraction:
        return max((e.width for e in self.entries), default=Fraction(0))


def _chi_entry(v: SpectralValue | AlgebraicValue, pinned: bool, precision: int) -> RationalInterval:
    if pinned:
        return RationalInterval(Fraction(0), Fraction(0))
    return log_modulus(v, precision)


def chi_vector(g, precision: int = 64) -> ChiVector:
    """Sorted (descending) log-modulus intervals, exactly 0 on cyclotomic factors."""
    g = g if isinstance(g, ExactMatrix) else ExactMatrix(g)
    _require_lattice(g)
    items = []
    for s in certified_spectrum(g, precision):
        e = _chi_entry(s.value, s.pinned, precision)
        items += [(e, s.pinned)] * s.multiplicity
    items.sort(key=lambda t: t[0].mid, reverse=True)
    return ChiVector([e for e, _ in items], [p for _, p in items], precision)


# ---------------------------------------------------------------------------
# common flags


@dataclass(frozen=True)
class FlagBudget:
    precision: int = 128
    max_nodes: int = 200_000
    max_work_precision: int = 4096


@dataclass
class CommonFlag:
    """Basis (columns) in which every generator is upper triangular.

    ``exact`` flags are rational and make every conjugate exactly triangular.
    Otherwise the basis is a Gaussian-rational rounding of a numerical flag and
    ``residual_bits`` bounds the exactly computed subdiagonal entries by
    ``2^-residual_bits``.
    """

    basis: list
    characters: list  # per generator: AlgebraicValue per flag position
    pinned: list  # per generator: bool per flag position
    triangular: list  # per generator: the conjugated matrix, computed exactly
    exact: bool
    residual_bits: int | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class NotTriangularizable:
    reason: str
    stage: int
    certificate: FailureCertificate | None = None

    def __bool__(self):
        return False


def _as_exact(rep) -> list[ExactMatrix]:
    return [m if isinstance(m, ExactMatrix) else ExactMatrix(m) for m in rep]


def _candidates(gens, precision, pinned_for=None):
    return [certified_spectrum(g, precision) for g in gens]


def _exact_flag(rep: list[ExactMatrix], cands) -> CommonFlag | None:
    """Flag through common eigenvectors with rational eigenvalues, or None."""
    m = rep[0].rank
    B = [[1 if i == j else 0 for j in range(m)] for i in range(m)]  # columns stored as rows
    chars = [[] for _ in rep]
    pins = [[] for _ in rep]
    rat = [[s for s in c if s.value.is_rational] for c in cands]
    for k in range(m):
        Bm = ExactMatrix([[B[j][i] for j in range(m)] for i in range(m)])
        Binv = Bm.inverse()
        blocks = []
        for g in rep:
            T = Binv @ g @ Bm
            blocks.append([[T.rows[i][j] for j in range(k, m)] for i in range(k, m)])
        found = _exact_common(blocks, rat, m - k)
        if found is None:
            return None
        v, choice = found
        lifted = [sum((v[t] * B[k + t][i] for t in range(m - k)), 0) for i in range(m)]
        piv = next(t for t in range(m - k) if v[t] != 0)
        rest = [B[k + t] for t in range(m - k) if t != piv]
        B = B[:k] + [lifted] + rest
        for j, s in enumerate(choice):
            chars[j].append(s.value)
            pins[j].append(s.pinned)
    Bm = ExactMatrix([[B[j][i] for j in range(m)] for i in range(m)])
    Binv = Bm.inverse()
    tri = [Binv @ g @ Bm for g in rep]
    for T in tri:
        if any(T.rows[i][j] != 0 for i in range(m) for j in range(i)):
            return None
    return CommonFlag([tuple(b) for b in B], chars, pins, tri, True, None)


def _exact_common(blocks, cands, n):
    def dfs(j, N, choice):
        if j == len(blocks):
            return N[0], choice
        A = blocks[j]
        for s in cands[j]:
            lam = s.value.exact_rational
            AN = [[sum((A[i][t] * N[c][t] for t in range(n)), 0) - lam * N[c][i] for c in range(len(N))] for i in range(n)]
            C = kernel(AN, len(N))
            if not C:
                continue
            N2 = [[sum((c[q] * N[q][i] for q in range(len(N))), 0) for i in range(n)] for c in C]
            r = dfs(j + 1, N2, choice + [s])
            if r is not None:
                return r
        return None

    ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return dfs(0, ident, [])


def _to_mp(x):
    if isinstance(x, GaussianRational):
        return mpmath.mpc(_mpq(x.re), _mpq(x.im))
    if hasattr(x, "approx"):
        return x.approx(mpmath.mp.prec)
    return _mpq(Fraction(x))


def _mpq(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _nullspace(M, n: int, tol):
    """Orthonormal basis (columns) of the numerical kernel of an (rows x n) matrix."""
    rows = max(M.rows, n)
    A = mpmath.matrix(rows, n)
    for i in range(M.rows):
        for j in range(n):
            A[i, j] = M[i, j]
    _, S, V = mpmath.svd_c(A, full_matrices=True)
    scale = max([abs(S[i]) for i in range(min(rows, n))] + [mpmath.mpf(1)])
    null = []
    for i in range(n):
        sv = abs(S[i]) if i < min(rows, n) else mpmath.mpf(0)
        if sv <= tol * scale:
            null.append([mpmath.conj(V[i, j]) for j in range(n)])
    if not null:
        return None
    out = mpmath.matrix(n, len(null))
    for c, vec in enumerate(null):
        for j in range(n):
            out[j, c] = vec[j]
    return out


def _numeric_common(blocks, cands, n, tol, counter, budget):
    def dfs(j, N, choice):
        if j == len(blocks):
            return N, choice
        A = blocks[j]
        for s in cands[j]:
            counter[0] += 1
            if counter[0] > budget.max_nodes:
                raise BudgetExceeded("common flag search exceeded its node budget")
            lam = s.value.approx(mpmath.mp.prec)
            Al = A - lam * mpmath.eye(n)
            C = _nullspace(Al * N, N.cols, tol)
            if C is None:
                continue
            N2 = N * C
            # re-orthonormalise
            Q, _ = mpmath.qr(N2)
            N2 = Q[:, : C.cols] if C.cols < Q.cols else Q
            r = dfs(j + 1, N2, choice + [s])
            if r is not None:
                return r
        return None

    return dfs(0, mpmath.eye(n), [])


def _round_gauss(z, bits: int) -> GaussianRational:
    s = mpmath.mpf(2) ** bits
    re = int(mpmath.nint(mpmath.re(z) * s))
    im = int(mpmath.nint(mpmath.im(z) * s))
    return GaussianRational(Fraction(re, 1 << bits), Fraction(im, 1 << bits))


def _numeric_flag(rep: list[ExactMatrix], cands, budget: FlagBudget, work: int):
    m = rep[0].rank
    counter = [0]
    with mpmath.workprec(work):
        tol = mpmath.mpf(2) ** (-(work // 2))
        R = [mpmath.matrix([[_to_mp(x) for x in row] for row in g.rows]) for g in rep]
        B = mpmath.eye(m)
        chars = [[] for _ in rep]
        for k in range(m):
            Binv = mpmath.inverse(B)
            blocks = [(Binv * g * B)[k:, k:] if k else Binv * g * B for g in R]
            found = _numeric_common(blocks, cands, m - k, tol, counter, budget)
            if found is None:
                return NotTriangularizable("no common eigenvector among certified eigenvalue choices", k)
            N, choice = found
            v = [N[t, 0] for t in range(m - k)]
            lifted = [sum((v[t] * B[i, k + t] for t in range(m - k)), mpmath.mpf(0)) for i in range(m)]
            nrm = mpmath.sqrt(sum(abs(x) ** 2 for x in lifted))
            lifted = [x / nrm for x in lifted]
            piv = max(range(m - k), key=lambda t: abs(v[t]))
            cols = [[B[i, c] for i in range(m)] for c in range(k)]
            cols.append(lifted)
            cols += [[B[i, k + t] for i in range(m)] for t in range(m - k) if t != piv]
            B = mpmath.matrix([[cols[c][i] for c in range(m)] for i in range(m)])
            for j, s in enumerate(choice):
                chars[j].append(s)
        bits = work - 32
        Q = [[_round_gauss(B[i, c], bits) for c in range(m)] for i in range(m)]
    Qm = ExactMatrix(Q)
    Qinv = ExactMatrix(inverse(Q))
    tri = [Qinv @ ExactMatrix([[GaussianRational.coerce(x) for x in row] for row in g.rows]) @ Qm for g in rep]
    bound = Fraction(1, 1 << 128)
    for T, ch in zip(tri, chars):
        for i in range(m):
            for j in range(i):
                if GaussianRational.coerce(T.rows[i][j]).abs2() > bound:
                    return None
            d = GaussianRational.coerce(T.rows[i][i])
            lam = ch[i].value.refine(work // 2)
            diff = d - GaussianRational(lam.re, lam.im)
            if diff.abs2() > bound + lam.radius * lam.radius * 4:
                return None
    basis = [tuple(Q[i][c] for i in range(m)) for c in range(m)]
    return CommonFlag(
        basis,
        [[s.value for s in ch] for ch in chars],
        [[s.pinned for s in ch] for ch in chars],
        tri,
        False,
        64,
    )


def common_flag(gens, budget: FlagBudget | None = None, rep=None):
    """A common triangularizing flag, or a NotTriangularizable report.

    ``rep`` optionally gives the matrices actually to be triangularized (for
    example the restriction to a complex subspace); candidate eigenvalues always
    come from the integer generators.
    """
    budget = budget or FlagBudget()
    gens = _gens(gens)
    chk = check_unipotent_commutators(gens)
    if chk is not True:
        return NotTriangularizable("a commutator has an eigenvalue other than 1", 0, chk)
    rep = _as_exact(rep) if rep is not None else gens
    cands = _candidates(gens, budget.precision)
    flag = _exact_flag(rep, cands)
    if flag is not None:
        return flag
    work = max(256, 2 * budget.precision + 64)
    while work <= budget.max_work_precision:
        res = _numeric_flag(rep, cands, budget, work)
        if res is not None:
            return res
        work *= 2
    raise BudgetExceeded("could not certify a numerical flag within the precision budget")


def chi_along_flag(flag: CommonFlag, j: int, precision: int = 64) -> ChiVector:
    entries = [_chi_entry(v, p, precision) for v, p in zip(flag.characters[j], flag.pinned[j])]
    return ChiVector(entries, list(flag.pinned[j]), precision, "flag")


# ---------------------------------------------------------------------------
# rank of G / N(G)


@dataclass
class RelationCertificate:
    exponents: tuple
    word: ExactMatrix
    null_entropy: bool = True

    def recheck(self, gens) -> bool:
        gens = _gens(gens)
        if len(self.exponents) != len(gens) or not any(self.exponents):
            return False
        w = word_product(gens, self.exponents)
        return w == self.word and is_null_entropy(w)


def word_product(gens, exponents: Sequence[int], max_bits: int | None = None) -> ExactMatrix:
    """g_1^{m_1} g_2^{m_2} ... computed exactly (left to right)."""
    gens = _gens(gens)
    out = ExactMatrix.identity(gens[0].rank)
    for g, e in zip(gens, exponents):
        if e:
            out = out @ (g**e)
            if max_bits is not None and out.max_abs_entry().bit_length() > max_bits:
                raise BudgetExceeded("word entries exceed the size budget")
    return out


@dataclass
class EntropyRankReport:
    lower: int
    independent: list
    upper: int
    relations: list
    bound: int
    bound_provenance: str
    exact: bool
    status: str
    precision: int
    flag_exact: bool
    chi: list = field(default_factory=list)
    sharper_bound: int | None = None
    notes: list = field(default_factory=list)

    @property
    def rank(self) -> int | None:
        return self.lower if self.exact else None


def _interval_rank(rows: list[list[RationalInterval]], prec: int) -> tuple[int, list[int]]:
    """Certified lower bound on the rank of every matrix in the interval box.

    Full pivoting Gaussian elimination in interval arithmetic; each accepted
    pivot interval excludes 0, so the corresponding minor is nonzero for every
    point of the box.  Returns the count and the pivot row indices.
    """
    if not rows or not rows[0]:
        return 0, []
    with _ivprec(prec):
        M = [[iv.mpf([_ivf(e.lo).a, _ivf(e.hi).b]) for e in r] for r in rows]
        live_r = list(range(len(M)))
        live_c = list(range(len(M[0])))
        pivots = []
        while live_r and live_c:
            best = None
            for i in live_r:
                for j in live_c:
                    x = M[i][j]
                    if x.a > 0 or x.b < 0:
                        mig = min(abs(x.a), abs(x.b))
                        if best is None or mig > best[0]:
                            best = (mig, i, j)
            if best is None:
                break
            _, pi, pj = best
            pivots.append(pi)
            live_r.remove(pi)
            live_c.remove(pj)
            for i in live_r:
                f = M[i][pj] / M[pi][pj]
                for j in live_c:
                    M[i][j] = M[i][j] - f * M[pi][j]
        return len(pivots), sorted(pivots)


def _rational_rank(vecs) -> int:
    if not vecs:
        return 0
    from .exactalg.subspace import rank

    return rank([list(v) for v in vecs])


def _canonical(m):
    g = 0
    for x in m:
        g = gcd(g, x)
    if g == 0:
        return None
    m = tuple(x // g for x in m)
    first = next(x for x in m if x)
    return m if first > 0 else tuple(-x for x in m)


def _relation_candidates(chis: list[ChiVector], precision: int, depth: int, max_word_len: int):
    s = len(chis)
    width = len(chis[0]) if chis else 0
    mids = [[float(e.mid) for e in c.entries] for c in chis]
    seen = set()
    out = []

    def push(m):
        c = _canonical(m)
        if c is None or c in seen:
            return
        seen.add(c)
        out.append(c)

    # lattice reduction on [I | 2^prec * chi]
    with mpmath.workprec(precision + 32):
        scale = mpmath.mpf(2) ** precision
        rows = []
        for i, c in enumerate(chis):
            row = [1 if i == j else 0 for j in range(s)]
            row += [int(mpmath.nint(_mpq(e.mid) * scale)) for e in c.entries]
            rows.append(row)
    if rows:
        for r in lll_reduce(rows):
            m = r[:s]
            if any(m) and max(abs(x) for x in m) <= 1 << 16:
                push(tuple(m))
    # exhaustive box, shrunk so that it stays at desk scale
    d = max(0, depth)
    while d > 0 and (2 * d + 1) ** s > 200_000:
        d -= 1
    tol = 1e-6
    for m in itertools.product(range(-d, d + 1), repeat=s):
        if not any(m) or sum(abs(x) for x in m) > max_word_len:
            continue
        if all(abs(sum(mi * mids[i][k] for i, mi in enumerate(m))) <= tol for k in range(width)):
            push(m)
    out.sort(key=lambda m: (sum(abs(x) for x in m), m))
    return out


def _interval_zero(chis, m) -> bool:
    for k in range(len(chis[0].entries)):
        lo = sum((mi * (chis[i].entries[k].lo if mi > 0 else chis[i].entries[k].hi) for i, mi in enumerate(m)), Fraction(0))
        hi = sum((mi * (chis[i].entries[k].hi if mi > 0 else chis[i].entries[k].lo) for i, mi in enumerate(m)), Fraction(0))
        if lo > 0 or hi < 0:
            return False
    return True


def certify_relations(gens, chis, target: int, precision: int, depth: int, max_word_len: int, max_word_bits: int = 4096):
    """Exactly certified relations, independent over Q, at most ``target`` of them.

    Candidates come from lattice reduction and a small exhaustive box; each is
    kept only if the word it names is exactly of null entropy.
    """
    certs: list[RelationCertificate] = []
    notes: list[str] = []
    rel_vecs: list[tuple] = []
    if target <= 0 or not chis:
        return certs, notes
    for cand in _relation_candidates(chis, precision, depth, max_word_len):
        if len(rel_vecs) >= target:
            break
        if not _interval_zero(chis, cand):
            continue
        if _rational_rank(rel_vecs + [cand]) == len(rel_vecs):
            continue
        try:
            w = word_product(gens, cand, max_word_bits)
        except BudgetExceeded:
            notes.append(f"candidate {list(cand)} skipped: word entries over budget")
            continue
        if is_null_entropy(w):
            certs.append(RelationCertificate(tuple(cand), w))
            rel_vecs.append(cand)
    return certs, notes


class FlagUnavailable(ValueError):
    def __init__(self, report: NotTriangularizable):
        super().__init__(f"no common flag: {report.reason}")
        self.report = report


def entropy_rank(
    gens,
    precision: int = 128,
    depth: int = 8,
    max_word_len: int = 16,
    flag: CommonFlag | None = None,
    rep=None,
    bound: int | None = None,
    bound_provenance: str | None = None,
    max_word_bits: int = 4096,
) -> EntropyRankReport:
    """Certified bracket on rank G/N(G); refuses without a common flag."""
    gens = _gens(gens)
    if flag is None:
        flag = common_flag(gens, FlagBudget(precision=precision), rep=rep)
        if isinstance(flag, NotTriangularizable):
            raise FlagUnavailable(flag)
    m = flag.dim
    if bound is None:
        bound = m - 1
        bound_provenance = bound_provenance or f"rank of G/N(G) is at most r - 1 = {bound} for a triangularizable group of rank r = {m}"
    chis = [chi_along_flag(flag, j, precision) for j in range(len(gens))]
    lower, indep = _interval_rank([c.entries for c in chis], precision + 32)
    s = len(gens)
    certs, notes = certify_relations(gens, chis, s - lower, precision, depth, max_word_len, max_word_bits)
    upper = min(bound, s - _rational_rank([c.exponents for c in certs]))
    if lower > upper:
        raise AssertionError("certified lower bound exceeds certified upper bound")
    exact = lower == upper
    if exact and (flag.exact or upper == 0):
        # upper = 0 rests on exact relation certificates alone
        status = "certified exact"
    elif exact:
        status = f"numerically exact at precision {precision}"
    else:
        status = "bounds only"
    return EntropyRankReport(
        lower=lower,
        independent=indep,
        upper=upper,
        relations=certs,
        bound=bound,
        bound_provenance=bound_provenance,
        exact=exact,
        status=status,
        precision=precision,
        flag_exact=flag.exact,
        chi=chis,
        notes=notes,
    )


@dataclass
class WeakTitsReport:
    resolved: bool
    message: str
    rank: EntropyRankReport | None = None
    flag: CommonFlag | None = None
    failure: NotTriangularizable | None = None
    null_entropy: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)


def weak_tits_report(gens, precision: int = 128, depth: int = 8, max_word_len: int = 16, sharper_bound: int | None = None) -> WeakTitsReport:
    gens = _gens(gens)
    nulls = [is_null_entropy(g) for g in gens]
    flag = common_flag(gens, FlagBudget(precision=precision))
    r = gens[0].rank
    if isinstance(flag, NotTriangularizable):
        return WeakTitsReport(
            False,
            "not connected-solvable on the given generators; the free-abelian rank bound is not certified",
            failure=flag,
            null_entropy=nulls,
            bounds={"r-1": r - 1},
        )
    rep = entropy_rank(gens, precision, depth, max_word_len, flag=flag)
    bounds = {"r-1": r - 1}
    if sharper_bound is not None:
        bounds["sharper"] = sharper_bound
        rep.sharper_bound = sharper_bound
    msg = f"rank of G/N(G) in [{rep.lower}, {rep.upper}], bound r-1 = {r - 1}"
    if rep.exact:
        msg = f"rank of G/N(G) = {rep.lower} <= r-1 = {r - 1} ({rep.status})"
    if all(nulls):
        msg += "; every generator has null entropy, so N(G) = G"
    return WeakTitsReport(True, msg, rep, flag, None, nulls, bounds)
