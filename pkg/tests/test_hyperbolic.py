import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from liecone.entropy import FlagUnavailable, is_null_entropy
from liecone.exactalg import poly as P
from liecone.exactalg.matrix import ExactMatrix, char_poly
from liecone.hyperbolic import (
    LorentzLattice,
    TorusAction,
    binary_forms_lattice,
    check_isometry,
    chi_dichotomy,
    classify,
    dynamical_degrees,
    finite_order,
    holomorphic_subspace,
    salem_check,
    surface_entropy_rank,
    sym2,
    torus_entropy_rank,
)
from liecone.instances import CAT, FIB, ROTATION, SHEAR, random_unimodular, sym2_suite

LAT = binary_forms_lattice()
LEHMER = (1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1)
J4 = ExactMatrix([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])

mpmath.mp.dps = 40
PHI = (1 + mpmath.sqrt(5)) / 2
BETA = (3 + mpmath.sqrt(5)) / 2


def encloses(iv, x, slack=Fraction(0)):
    x = Fraction(mpmath.nstr(x, 35))
    return iv.lo - slack <= x <= iv.hi + slack


SLACK = Fraction(1, 10**30)


# words in GL2(Z); their symmetric squares are isometries of the binary forms lattice
gl2_letters = st.sampled_from([FIB, CAT, SHEAR, SHEAR.transpose(), ROTATION, ExactMatrix([[0, 1], [1, 0]])])


@st.composite
def gl2_words(draw, max_len=5):
    m = ExactMatrix.identity(2)
    for a in draw(st.lists(gl2_letters, min_size=1, max_size=max_len)):
        m = m @ a
    return m


def test_lattice_validation():
    assert LAT.rank == 3
    with pytest.raises(ValueError):
        LorentzLattice([[1, 0], [0, 1]], (1, 0))
    with pytest.raises(ValueError):
        LorentzLattice([[1, 0], [0, -1]], (0, 1))


def test_sublattice_of_signature_three_form():
    # diag(1,1,1,-1,-1) has signature (3, 2); its first and last coordinates span a (1, 1) part
    g = ExactMatrix.diag([1, 1, 1, -1, -1])
    lat = LorentzLattice.from_sublattice(g, [(1, 0, 0, 0, 0), (0, 0, 0, 0, 1)], (1, 0))
    assert lat.gram == ExactMatrix.diag([1, -1])


def test_check_isometry_examples():
    assert check_isometry(ExactMatrix.identity(3), LAT)
    assert not check_isometry(ExactMatrix.identity(3).scaled(-1), LAT)
    assert check_isometry(sym2(FIB), LAT)
    assert not check_isometry(ExactMatrix.diag([2, 1, 1]), LAT)


@given(gl2_words())
def test_sym2_preserves_discriminant(m):
    s = sym2(m)
    assert check_isometry(s, LAT)
    assert sym2(m.inverse()) == s.inverse()


def test_classify_examples():
    c = classify(ExactMatrix.identity(3), LAT)
    assert c.tag == "elliptic" and c.order == 1
    assert classify(sym2(SHEAR), LAT).tag == "parabolic"
    h = classify(sym2(CAT), LAT)
    assert h.tag == "hyperbolic"
    assert P.to_fraction(h.rho_factor) == P.to_fraction((1, -7, 1))
    assert encloses(h.rho.interval, (7 + 3 * mpmath.sqrt(5)) / 2)
    r = classify(sym2(ROTATION), LAT)
    assert r.tag == "elliptic" and r.order == 2


def test_classify_problem_file_classes():
    hyp = ExactMatrix([[4, 2, 1], [4, 3, 2], [1, 1, 1]])
    par = ExactMatrix([[1, 0, 0], [2, 1, 0], [1, 1, 1]])
    ell = ExactMatrix([[0, 0, 1], [0, -1, 0], [1, 0, 0]])
    assert [classify(g, LAT).tag for g in (hyp, par, ell)] == ["hyperbolic", "parabolic", "elliptic"]
    assert classify(ell, LAT).order == 2


def test_finite_order_of_order_three_isometry():
    m = ExactMatrix([[0, -1], [1, -1]])
    assert finite_order(sym2(m)) == 3
    assert finite_order(sym2(FIB)) is None


@given(gl2_words())
def test_classify_inverse_invariant(m):
    g = sym2(m)
    a, b = classify(g, LAT), classify(g.inverse(), LAT)
    assert a.tag == b.tag
    if a.tag == "hyperbolic":
        assert not (a.rho.interval.hi < b.rho.interval.lo or b.rho.interval.hi < a.rho.interval.lo)
    if a.tag == "elliptic":
        assert a.order == b.order


@given(gl2_words(4), st.integers(1, 3))
def test_classify_powers(m, k):
    g = sym2(m)
    a, b = classify(g, LAT), classify(g**k, LAT)
    if a.tag == "hyperbolic":
        assert b.tag == "hyperbolic"
        lo, hi = a.rho.interval.lo ** k, a.rho.interval.hi ** k
        assert not (hi < b.rho.interval.lo or b.rho.interval.hi < lo)
    elif a.tag == "elliptic":
        assert (g ** a.order).is_identity()
        assert b.tag == "elliptic" and a.order % b.order == 0
    else:
        assert b.tag == "parabolic"


def test_salem_examples():
    s = salem_check(char_poly(sym2(CAT)))
    assert s.is_salem and s.shape == "quadratic"
    assert P.to_fraction(s.factor) == P.to_fraction((1, -7, 1))
    lehmer = salem_check(LEHMER)
    assert lehmer.is_salem and lehmer.shape == "salem"
    assert lehmer.outside == 1 and lehmer.inside == 1 and lehmer.on_circle == 8
    with pytest.raises(ValueError):
        salem_check(P.power((-1, 1), 3))


def test_salem_rejects_two_large_roots():
    # (x^2 - 3x + 1)(x^2 - 4x + 1): reciprocal but with two roots outside the circle
    s = salem_check(P.mul((1, -3, 1), (1, -4, 1)))
    assert not s.is_salem and s.outside == 2


def test_salem_non_reciprocal_flagged():
    s = salem_check((-1, -1, 1))
    assert not s.is_salem and s.shape == "not reciprocal"


def test_lehmer_number_is_the_spectral_radius():
    roots = mpmath.polyroots(list(reversed(LEHMER)), maxsteps=200, extraprec=60)
    big = max(abs(r) for r in roots)
    assert abs(big - mpmath.mpf("1.176280818259917506544070338474")) < mpmath.mpf(10) ** -25


def test_dichotomy_examples():
    rep = chi_dichotomy([sym2(SHEAR)], LAT)
    assert rep.ok and rep.entries[0].branch == "both"
    g = sym2(CAT)
    single = chi_dichotomy([g], LAT)
    assert single.entries[0].branch == "rho" and single.entries[0].one_dimensional
    pair = chi_dichotomy([g, g.inverse()], LAT)
    assert [e.branch for e in pair.entries] == ["rho", "1/rho"]
    chi, chi_inv = (pair.ray.exact_eigenvalues[j] for j in range(2))
    assert chi * chi_inv == 1


def test_dichotomy_reports_failure_for_independent_hyperbolics():
    gens = [sym2(CAT), sym2(CAT.transpose() @ SHEAR)]
    rep = chi_dichotomy(gens, LAT)
    assert not rep.ok and rep.failure.kind == "not_unipotent"
    assert rep.failure.recheck(gens, LAT.forward_cone())
    with pytest.raises(FlagUnavailable):
        surface_entropy_rank(gens, LAT)


@pytest.mark.parametrize("name,gens,expected", sym2_suite())
def test_surface_rank_suite(name, gens, expected):
    r = surface_entropy_rank(gens, LAT)
    assert r.lower == r.upper == expected, name
    assert r.bound == 1
    for rel in r.relations:
        assert rel.recheck(gens)


def test_surface_rank_power_certificate():
    g = sym2(CAT)
    r = surface_entropy_rank([g, g @ g], LAT)
    assert r.upper == 1
    assert tuple(r.relations[0].exponents) in ((2, -1), (-2, 1))


def test_surface_rank_all_elliptic():
    r = surface_entropy_rank([sym2(ROTATION), ExactMatrix.identity(3)], LAT)
    assert r.lower == r.upper == 0


@given(st.lists(gl2_words(3), min_size=1, max_size=2))
def test_surface_rank_at_most_one(words):
    gens = [sym2(m) for m in words]
    try:
        r = surface_entropy_rank(gens, LAT)
    except FlagUnavailable:
        return
    assert r.upper in (0, 1)
    assert (r.upper == 0) == all(is_null_entropy(g) for g in gens)


def test_dynamical_degrees_examples():
    ident = dynamical_degrees(ExactMatrix.identity(3))
    assert all(e for e in ident.exact_one)
    fib = dynamical_degrees(FIB, 96)
    assert fib.exact_one == [True, False, True]
    assert encloses(fib.degrees[1], PHI, SLACK)
    assert encloses(fib.entropy, mpmath.log(PHI), SLACK)
    assert fib.peak == [1]
    bb = dynamical_degrees(ExactMatrix.block_diag(CAT, CAT), 96)
    for k, e in enumerate((0, 1, 2, 1, 0)):
        assert encloses(bb.degrees[k], BETA**e, SLACK)
    assert bb.peak == [2]


def test_dynamical_degrees_rejects_non_unimodular():
    with pytest.raises(ValueError):
        dynamical_degrees(ExactMatrix([[2, 0], [0, 1]]))


@given(st.integers(2, 4), st.integers(0, 10**6))
def test_dynamical_degrees_reciprocity_and_concavity(n, seed):
    rng = random.Random(seed)
    g = random_unimodular(n, rng.randint(1, 6), rng)
    a, b = dynamical_degrees(g), dynamical_degrees(g.inverse())
    for k in range(n + 1):
        x, y = a.degrees[k], b.degrees[n - k]
        assert not (x.hi < y.lo or y.hi < x.lo)
    L = a.log_degrees
    for k in range(1, n):
        assert 2 * L[k].hi >= L[k - 1].lo + L[k + 1].lo


def test_torus_action_validation():
    with pytest.raises(ValueError):
        TorusAction([FIB], ExactMatrix.identity(2))
    with pytest.raises(ValueError):
        TorusAction([ExactMatrix.block_diag(FIB, ExactMatrix.identity(2))], J4)


def test_holomorphic_subspace_dimension():
    assert holomorphic_subspace(J4).dim == 2


def test_torus_rank_one_dimensional():
    J = ExactMatrix([[0, -1], [1, 0]])
    r = torus_entropy_rank(TorusAction([ROTATION], J))
    assert r.lower == r.upper == 0 and r.bound == 0


def test_torus_product_model():
    gens = [ExactMatrix.block_diag(CAT, CAT)]
    r = torus_entropy_rank(TorusAction(gens, J4))
    assert r.upper <= 1 and r.bound == 1 and r.sharper_bound == 1
    assert "3" in r.bound_provenance


def test_torus_finite_order_generators():
    r = torus_entropy_rank(TorusAction([J4, J4 @ J4], J4))
    assert r.lower == r.upper == 0
