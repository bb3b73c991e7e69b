import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import unimodular
from liecone.entropy import (
    CommonFlag,
    FlagUnavailable,
    NotTriangularizable,
    RelationCertificate,
    certified_spectrum,
    chi_along_flag,
    chi_vector,
    common_flag,
    entropy_rank,
    is_null_entropy,
    weak_tits_report,
    word_product,
)
from liecone.exactalg.matrix import ExactMatrix
from liecone.exactalg.subspace import rank as qrank
from liecone.instances import CAT, FIB, ROTATION, SHEAR, fibonacci_blocks, heisenberg_triple, power_pair, random_unimodular

LOG_PHI = Fraction("0.4812118250596034474977589134")


def test_null_entropy_examples():
    assert is_null_entropy(ExactMatrix.identity(4))
    assert is_null_entropy(ExactMatrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))
    assert not is_null_entropy(FIB)
    assert is_null_entropy(SHEAR)
    with pytest.raises(ValueError):
        is_null_entropy(ExactMatrix([[2, 0], [0, 1]]))


@given(unimodular(max_rank=5, max_len=6), unimodular(max_rank=5, max_len=4))
def test_null_entropy_inverse_and_conjugation_invariant(g, h):
    assert is_null_entropy(g) == is_null_entropy(g.inverse())
    if h.rank == g.rank:
        assert is_null_entropy(h @ g @ h.inverse()) == is_null_entropy(g)


def test_chi_identity_exact():
    c = chi_vector(ExactMatrix.identity(3))
    assert all(e.lo == e.hi == 0 for e in c.entries)
    assert c.is_zero()


def test_chi_fibonacci():
    c = chi_vector(FIB, 96)
    top, bottom = c.entries
    assert top.contains(LOG_PHI) or abs(top.mid - LOG_PHI) < Fraction(1, 10**27)
    assert top.width <= Fraction(1, 2**90)
    assert bottom.lo <= -top.lo and -top.hi <= bottom.hi
    s = c.sum_interval()
    assert s.lo <= 0 <= s.hi


def test_chi_block_is_concatenation():
    g = ExactMatrix.block_diag(FIB, CAT)
    whole = sorted(e.mid for e in chi_vector(g).entries)
    parts = sorted(e.mid for e in chi_vector(FIB).entries + chi_vector(CAT).entries)
    assert all(abs(a - b) < Fraction(1, 2**50) for a, b in zip(whole, parts))


@given(unimodular(max_rank=6, max_len=8))
def test_chi_invariants(g):
    c = chi_vector(g, 64)
    s = c.sum_interval()
    assert s.lo <= 0 <= s.hi
    assert c.is_zero() == is_null_entropy(g)
    assert len(c.entries) == g.rank


def test_certified_spectrum_multiplicities():
    g = ExactMatrix.block_diag(FIB, FIB, ExactMatrix.identity(1))
    roots = certified_spectrum(g)
    assert sum(s.multiplicity for s in roots) == 5
    assert any(s.pinned and s.multiplicity == 1 for s in roots)


def test_flag_heisenberg_exact():
    f = common_flag(heisenberg_triple())
    assert isinstance(f, CommonFlag) and f.exact
    for j in range(3):
        assert all(v.is_rational and v.exact_rational == 1 for v in f.characters[j])


def test_flag_commuting_diagonal():
    gens = [ExactMatrix.diag([1, -1, 1]), ExactMatrix.diag([-1, 1, 1])]
    f = common_flag(gens)
    assert f.exact
    for t in f.triangular:
        assert all(t[i, j] == 0 for i in range(3) for j in range(i))


def test_flag_unavailable_for_rotation_and_fibonacci():
    res = common_flag([ROTATION, FIB])
    assert isinstance(res, NotTriangularizable)
    assert res.certificate is not None and res.certificate.kind == "not_unipotent"
    assert res.certificate.recheck([ROTATION, FIB], None)


def test_flag_for_irrational_blocks_is_triangular_to_tolerance():
    gens = fibonacci_blocks()
    f = common_flag(gens)
    assert isinstance(f, CommonFlag)
    assert f.residual_bits >= 64
    for t in f.triangular:
        n = len(f.basis)
        for i in range(n):
            for j in range(i):
                assert abs(t[i, j]) ** 2 <= Fraction(1, 2**128) if not hasattr(t[i, j], "abs2") else t[i, j].abs2() <= Fraction(1, 2**128)


def test_chi_is_additive_along_flag():
    gens = fibonacci_blocks()
    prod = gens[0] @ gens[1]
    f = common_flag(gens + [prod])
    a, b, c = (chi_along_flag(f, j, 80) for j in range(3))
    for x, y, z in zip(a.entries, b.entries, c.entries):
        lo, hi = x.lo + y.lo, x.hi + y.hi
        assert not (hi < z.lo or z.hi < lo)


def test_rank_block_example():
    r = entropy_rank(fibonacci_blocks())
    assert r.lower == r.upper == 2
    assert r.bound == 3
    assert not r.relations


def test_rank_power_pair():
    gens = power_pair()
    r = entropy_rank(gens)
    assert r.lower == r.upper == 1
    assert len(r.relations) == 1
    rel = r.relations[0]
    assert tuple(rel.exponents) in ((2, -1), (-2, 1))
    assert rel.word == ExactMatrix.identity(4)
    assert rel.recheck(gens)


def test_rank_commuting_permutations_is_zero():
    p = ExactMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    r = entropy_rank([p, p @ p])
    assert r.lower == r.upper == 0
    assert r.status == "certified exact"


def test_rank_single_null_generator():
    rep = weak_tits_report([SHEAR])
    assert rep.resolved and rep.rank.upper == 0


def test_weak_tits_unresolved_for_non_triangularizable():
    rep = weak_tits_report([ROTATION, FIB])
    assert not rep.resolved
    assert "not connected-solvable" in rep.message


def test_entropy_rank_refuses_without_flag():
    with pytest.raises(FlagUnavailable):
        entropy_rank([ROTATION, FIB])


def test_relation_certificate_rejects_forgery():
    gens = power_pair()
    forged = RelationCertificate((1, -1), ExactMatrix.identity(4))
    assert not forged.recheck(gens)


def test_word_product():
    assert word_product([FIB], (3,)) == FIB @ FIB @ FIB
    assert word_product([FIB, CAT], (1, -1)) == FIB @ CAT.inverse()


def _brute_force_rank(gens, box=2):
    """s minus the rank of all null-entropy exponent vectors with entries in [-box, box]."""
    rels = [
        m
        for m in itertools.product(range(-box, box + 1), repeat=len(gens))
        if any(m) and is_null_entropy(word_product(gens, m))
    ]
    return len(gens) - (qrank(rels) if rels else 0)


@given(st.integers(0, 10**6))
def test_rank_matches_exponent_oracle(seed):
    # gens = diag(base^a_i, other^b_i): the word is null exactly when the exponent
    # sums vanish on every positive-entropy block, so the rank is that of the
    # exponent columns of those blocks
    rng = random.Random(seed)
    base = rng.choice([FIB, CAT, ExactMatrix([[3, 1], [2, 1]])])
    other = rng.choice([FIB, CAT, SHEAR])
    exps = [(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(rng.randint(1, 3))]
    gens = [ExactMatrix.block_diag(base**a, other**b) for a, b in exps]
    cols = [[a for a, _ in exps]]
    if other is not SHEAR:
        cols.append([b for _, b in exps])
    expected = qrank(cols)
    r = entropy_rank(gens, depth=4, max_word_len=8)
    assert r.lower <= r.upper <= 3
    assert r.lower == r.upper == expected


def test_rank_matches_brute_force_small_words():
    gens = [ExactMatrix.block_diag(FIB, CAT), ExactMatrix.block_diag(FIB**2, CAT), ExactMatrix.block_diag(FIB, CAT**2)]
    # the only relation is (3, -1, -1), just outside the box of radius 2
    assert entropy_rank(gens).upper == _brute_force_rank(gens, box=3) == 2
    assert _brute_force_rank(gens, box=2) == 3
    gens = [ExactMatrix.block_diag(FIB, SHEAR), ExactMatrix.block_diag(FIB**-1, SHEAR)]
    assert entropy_rank(gens).upper == _brute_force_rank(gens) == 1


@given(st.integers(0, 10**6))
def test_rank_bounds_on_random_triangularizable(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    g = random_unimodular(n, rng.randint(1, 5), rng)
    gens = [g, g**2] if rng.random() < 0.5 else [g]
    r = entropy_rank(gens, depth=4)
    assert r.lower <= r.upper <= n - 1
    for rel in r.relations:
        assert rel.recheck(gens)
