"""Common eigenrays in a cone for groups with unipotent commutators.

The engine works in ambient coordinates throughout.  Nonabelian stages shrink a
rational invariant subspace W on which the commutators have more fixed
vectors; once every commutator is trivial on W, a Perron-Frobenius cascade
picks the top eigenvalue of each generator on the span of the current cone and
cuts the cone down to the corresponding eigenspace.  Irrational eigenvalues
enlarge the working number field by compositum.

Every returned ray is re-verified exactly; failures come back as
:class:`FailureCertificate` values whose data can be re-checked with the cone
and matrix primitives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cones import (
    ConeHandle,
    contains,
    embed_cone,
    is_nonzero,
    is_strictly_convex,
    preserves,
    restrict,
    span_of,
)
from .exactalg import poly as P
from .exactalg.matrix import ExactMatrix, char_poly, commutator
from .exactalg.numfield import QQ, NFElement, compositum
from .exactalg.roots import AlgebraicValue, max_modulus_root, positive_real_roots, rational_roots
from .exactalg.subspace import Subspace, eigenspace, fixed_space, largest_invariant_subspace


class BudgetExceeded(RuntimeError):
    """A resource budget ran out; carries the trace computed so far."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


@dataclass(frozen=True)
class KolchinConfig:
    max_depth: int | None = None  # defaults to the ambient rank
    max_field_degree: int = 64
    precision: int = 64


@dataclass
class GroupPresentation:
    generators: list
    labels: list | None = None
    lattice: bool = True

    def __post_init__(self):
        gens = [g if isinstance(g, ExactMatrix) else ExactMatrix(g) for g in self.generators]
        if not gens:
            raise ValueError("a group presentation needs at least one generator")
        r = gens[0].rank
        for g in gens:
            if g.rank != r:
                raise ValueError("generators have inconsistent rank")
            if self.lattice:
                if not g.is_integer:
                    raise ValueError("lattice generators must have integer entries")
                if g.det() not in (1, -1):
                    raise ValueError("lattice generators must have determinant +-1")
            elif g.det() == 0:
                raise ValueError("generators must be invertible")
        self.generators = gens
        if self.labels is None:
            self.labels = [f"g{i}" for i in range(len(gens))]
        elif len(self.labels) != len(gens):
            raise ValueError("one label per generator expected")

    @property
    def rank(self) -> int:
        return self.generators[0].rank

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


def _gens(gens) -> list[ExactMatrix]:
    if isinstance(gens, GroupPresentation):
        return gens.generators
    return [g if isinstance(g, ExactMatrix) else ExactMatrix(g) for g in gens]


@dataclass
class CommonEigenRay:
    ray: tuple
    eigenvalues: list  # AlgebraicValue per generator
    field: object  # QQ or NumberField holding the coordinates
    exact_eigenvalues: list  # the same eigenvalues as elements of ``field``
    trace: list = field(default_factory=list)
    heuristic: str | None = None  # set when produced after power_trick

    def __len__(self):
        return len(self.ray)


@dataclass
class FailureCertificate:
    stage: int
    kind: str  # not_strictly_convex | zero_cone | not_preserved | not_unipotent | empty_intersection
    datum: dict
    trace: list = field(default_factory=list)

    def recheck(self, gens, cone: ConeHandle) -> bool:
        """Re-validate the failing datum with the primitive it cites."""
        gens = _gens(gens)
        d = self.datum
        if self.kind == "not_strictly_convex":
            return not is_strictly_convex(cone)[0]
        if self.kind == "zero_cone":
            return not is_nonzero(cone)
        if self.kind == "not_preserved":
            g = gens[d["generator"]]
            w = d.get("witness")
            if w is None:
                return not preserves(g, cone)[0]
            if w[0] == "form":
                L = cone.payload
                u, v = tuple(Fraction(x) for x in w[1]), tuple(Fraction(x) for x in w[2])
                return L.pair(g @ u, g @ v) != L.pair(u, v)
            # the witness is the image of a cone point that left the cone
            w = tuple(Fraction(x) for x in w)
            pre = g.inverse() @ w
            if contains(cone, pre) and not contains(cone, w):
                return True
            # Lorentzian cones span their ambient, so leaving the ambient also counts
            if cone.kind == "lorentzian":
                amb = cone.payload.ambient
                return amb.contains(pre) and not amb.contains(w)
            return False
        if self.kind == "not_unipotent":
            c = ExactMatrix(d["commutator"])
            u = Subspace(c.rank, d["ambient"])
            cp = P.to_fraction(char_poly(u.restrict_matrix(c)))
            return cp != P.to_fraction(P.power((-1, 1), u.dim))
        if self.kind == "empty_intersection":
            w = Subspace(cone.n, d["subspace"])
            if not all(w.is_invariant(g) for g in gens):
                return False
            return not is_nonzero(restrict(cone, w))
        return False


# ---------------------------------------------------------------------------
# commutators


def commutators(gens) -> list[ExactMatrix]:
    gens = _gens(gens)
    out = []
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            c = commutator(gens[i], gens[j])
            if not c.is_identity():
                out.append(c)
    return out


def _acts_trivially(c: ExactMatrix, u: Subspace) -> bool:
    return all(all(x == y for x, y in zip(c @ b, b)) for b in u.basis)


def check_unipotent_commutators(gens, ambient: Subspace | None = None, stage: int = 0):
    """True, or a certificate naming the first commutator with an eigenvalue other than 1."""
    gens = _gens(gens)
    u = ambient if ambient is not None else Subspace.ambient(gens[0].rank)
    unip = P.to_fraction(P.power((-1, 1), u.dim))
    for c in commutators(gens):
        cp = P.to_fraction(char_poly(u.restrict_matrix(c)))
        if cp != unip:
            return FailureCertificate(
                stage,
                "not_unipotent",
                {
                    "commutator": c.tolist(),
                    "ambient": [list(b) for b in u.basis],
                    "char_poly": [Fraction(x) for x in cp],
                },
            )
    return True


def power_trick(gens, k: int) -> GroupPresentation:
    """Replace each generator by its k-th power (heuristic retry, no guarantee)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if isinstance(gens, GroupPresentation):
        return GroupPresentation([g**k for g in gens], list(gens.labels), gens.lattice)
    return GroupPresentation([g**k for g in _gens(gens)], lattice=False)


# ---------------------------------------------------------------------------
# abelian cascade


def _coerce_to(field_, x):
    if field_ is QQ:
        return x
    if isinstance(x, NFElement):
        return x
    return field_(x)


def _top_eigenvalue(g: ExactMatrix, cone: ConeHandle, field_, cfg: KolchinConfig):
    """(value, field, embed, exact value, eigenspace cone) for the spectral radius on span(cone)."""
    S = span_of(cone)
    if field_ is QQ and S.is_rational:
        cp = char_poly(S.restrict_matrix(g))
        rho = max_modulus_root(cp, cfg.precision)
        if not rho.is_rational:
            for q in rational_roots(cp, cfg.precision):
                if rho.real and rho.interval.contains(q):
                    rho = AlgebraicValue.rational(q)
        res = _cut(g, cone, field_, rho, cfg)
        if res is None:
            raise AssertionError("Perron-Frobenius eigenvalue has no eigenvector in the cone")
        return (rho,) + res
    # over a number field: scan the real positive eigenvalues of g from the top;
    # the first one whose eigenspace meets the cone is the spectral radius on span(cone)
    for lam in positive_real_roots(char_poly(g), cfg.precision):
        res = _cut(g, cone, field_, lam, cfg)
        if res is not None:
            return (lam.refine(cfg.precision),) + res
    raise AssertionError("no positive eigenvalue has an eigenvector in the cone")


def _cut(g, cone, field_, lam: AlgebraicValue, cfg):
    if lam.is_rational:
        L, emb, lam_L = field_, (lambda x: x), _coerce_to(field_, lam.exact_rational)
        c = cone
    else:
        L, emb, lam_L = compositum(field_, lam)
        if L.degree > cfg.max_field_degree:
            raise BudgetExceeded(f"field degree {L.degree} exceeds budget {cfg.max_field_degree}")
        c = embed_cone(cone, emb)
    try:
        E = eigenspace(g, lam_L)
    except ValueError:
        return None
    cut = restrict(c, E.intersect(span_of(c)))
    if not is_nonzero(cut):
        return None
    return L, emb, lam_L, cut


def abelian_common_ray(gens, cone: ConeHandle, config: KolchinConfig | None = None, trace=None) -> CommonEigenRay:
    cfg = config or KolchinConfig()
    gens = _gens(gens)
    trace = list(trace or [])
    field_ = QQ
    values: list = []
    exact: list = []
    for idx, g in enumerate(gens):
        rho, L, emb, lam_L, cut = _top_eigenvalue(g, cone, field_, cfg)
        if L is not field_:
            exact = [emb(x) for x in exact]
        field_ = L
        values.append(rho)
        exact.append(lam_L)
        cone = cut
        if not is_nonzero(cone):
            raise AssertionError("cone collapsed to zero during the abelian cascade")
        trace.append(
            {
                "stage": "abelian",
                "generator": idx,
                "eigenvalue": rho.describe(12),
                "cone_kind": cone.kind,
                "cone_dim": cone.dim,
                "field_degree": 1 if field_ is QQ else field_.degree,
            }
        )
    ray = tuple(cone.payload.first_point())
    return CommonEigenRay(ray, values, field_, exact, trace)


# ---------------------------------------------------------------------------
# full engine


def _entry_check(gens, cone, stage, trace):
    ok, w = is_strictly_convex(cone)
    if not ok:
        return FailureCertificate(stage, "not_strictly_convex", {"witness": list(w)}, trace)
    if not is_nonzero(cone):
        return FailureCertificate(stage, "zero_cone", {}, trace)
    for i, g in enumerate(gens):
        ok, w = preserves(g, cone)
        if not ok:
            return FailureCertificate(stage, "not_preserved", {"generator": i, "witness": list(w)}, trace)
    return None


def common_eigen_ray(gens, cone: ConeHandle, config: KolchinConfig | None = None):
    """A common eigenray of the generators inside the cone, or a FailureCertificate."""
    cfg = config or KolchinConfig()
    gens = _gens(gens)
    n = gens[0].rank
    if cone.n != n:
        raise ValueError("cone and generators have different ambient rank")
    max_depth = cfg.max_depth if cfg.max_depth is not None else n
    trace: list = []
    fail = _entry_check(gens, cone, 0, trace)
    if fail is not None:
        return fail
    u = Subspace.ambient(n)
    stage = 0
    while True:
        comms = commutators(gens)
        trace.append({"stage": stage, "ambient_dim": u.dim, "cone_kind": cone.kind, "cone_dim": cone.dim})
        if all(_acts_trivially(c, u) for c in comms):
            ray = abelian_common_ray(gens, cone, cfg, trace)
            if not verify_common_ray(gens, cone, ray):
                raise AssertionError("abelian cascade produced a ray that fails verification")
            return ray
        if stage >= max_depth:
            raise BudgetExceeded(f"recursion depth budget {max_depth} exhausted", trace)
        chk = check_unipotent_commutators(gens, u, stage)
        if chk is not True:
            chk.trace = trace
            return chk
        f = u
        for c in comms:
            f = f.intersect(fixed_space(c))
        w = largest_invariant_subspace(f, gens)
        sub = restrict(cone, w)
        if not is_nonzero(sub):
            return FailureCertificate(stage, "empty_intersection", {"subspace": [list(b) for b in w.basis]}, trace)
        u, cone = w, sub
        stage += 1


def verify_common_ray(gens, cone: ConeHandle, ray: CommonEigenRay) -> bool:
    """Exact re-check: nonzero, in the cone, g v = chi v with chi > 0 a root of char_poly(g)."""
    gens = _gens(gens)
    v = tuple(ray.ray)
    if len(v) != cone.n or all(x == 0 for x in v):
        return False
    if len(ray.exact_eigenvalues) != len(gens):
        return False
    try:
        if not contains(cone, v):
            return False
    except Exception:
        return False
    for g, chi in zip(gens, ray.exact_eigenvalues):
        if not chi > 0:
            return False
        gv = g @ v
        if any(a != chi * b for a, b in zip(gv, v)):
            return False
        cp = char_poly(g)
        acc = 0
        for c in reversed(cp):
            acc = acc * chi + c
        if acc != 0:
            return False
    return True


def candidate_ray(vector: Sequence, gens) -> CommonEigenRay | None:
    """Wrap a user-supplied rational vector with eigenvalues read off exactly (None if not an eigenvector)."""
    gens = _gens(gens)
    v = tuple(Fraction(x) for x in vector)
    k = next((i for i, x in enumerate(v) if x != 0), None)
    if k is None:
        return None
    vals = []
    for g in gens:
        gv = g @ v
        chi = Fraction(gv[k]) / v[k]
        if any(a != chi * b for a, b in zip(gv, v)):
            return None
        vals.append(chi)
    return CommonEigenRay(v, [AlgebraicValue.rational(c) for c in vals], QQ, vals)
