import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from liecone.cones import (
    ConeError,
    ConeHandle,
    contains,
    is_nonzero,
    is_strictly_convex,
    nonneg_solution,
    preserves,
    restrict,
    signature,
)
from liecone.cones.dd import extreme_rays
from liecone.exactalg.matrix import ExactMatrix
from liecone.exactalg.numfield import field_of
from liecone.exactalg.roots import max_modulus_root
from liecone.exactalg.subspace import Subspace, eigenspace
from liecone.instances import elementary

ORTHANT2 = ConeHandle.orthant(2)


def test_orthant_membership():
    assert contains(ORTHANT2, (1, 2))
    assert not contains(ORTHANT2, (1, -1))


def test_lorentzian_boundary_point():
    c = ConeHandle.lorentzian([[1, 0], [0, -1]], (1, 0))
    assert contains(c, (1, 1))
    assert not contains(c, (-1, 1))
    assert not contains(c, (1, 2))


def test_strict_convexity_examples():
    assert is_strictly_convex(ConeHandle.polyhedral([(1, 0), (0, 1)]))[0]
    ok, w = is_strictly_convex(ConeHandle.polyhedral([(1, 0), (-1, 0)]))
    assert not ok and w[1] == 0 and w[0] != 0
    assert is_strictly_convex(ConeHandle.polyhedral([(1, 0), (1, 1), (0, 1)]))[0]


def test_preserves_examples():
    assert preserves(ExactMatrix.identity(2), ORTHANT2)[0]
    assert preserves(ExactMatrix([[1, 1], [0, 1]]), ORTHANT2)[0]
    ok, w = preserves(ExactMatrix([[0, -1], [1, 0]]), ORTHANT2)
    assert not ok and tuple(w) == (-1, 0)


def test_restrict_examples():
    c3 = ConeHandle.orthant(3)
    assert restrict(c3, Subspace.ambient(3)) == c3
    r = restrict(c3, Subspace(3, [(1, 1, 0)]))
    assert [tuple(x) for x in r.payload.extreme()] == [(1, 1, 0)]
    z = restrict(ORTHANT2, Subspace(2, [(1, -1)]))
    assert not is_nonzero(z)


def test_restrict_rejects_foreign_subspace():
    c = restrict(ConeHandle.orthant(3), Subspace(3, [(1, 0, 0), (0, 1, 0)]))
    with pytest.raises(ConeError):
        restrict(c, Subspace(3, [(0, 0, 1)]))


def test_empty_cone_is_zero():
    assert not is_nonzero(ConeHandle.polyhedral([], 3))
    assert is_nonzero(ConeHandle.orthant(3))


def test_restrict_to_irrational_eigenline():
    K = field_of(max_modulus_root((-1, -1, 1), 64))
    e = eigenspace(ExactMatrix([[1, 1], [1, 0]]), K.gen)
    r = restrict(ORTHANT2, e)
    assert is_nonzero(r)
    (v,) = r.payload.extreme()
    assert all(x > 0 for x in v)


def test_signature_examples():
    assert signature([[0, 0, 2], [0, -1, 0], [2, 0, 0]]) == (1, 2, 0)
    assert signature([[0, 1], [1, 0]]) == (1, 1, 0)
    assert signature([[1, 1], [1, 1]]) == (1, 0, 1)


def test_lorentzian_rejects_bad_signature():
    with pytest.raises(ConeError):
        ConeHandle.lorentzian([[1, 0], [0, 1]], (1, 0))
    with pytest.raises(ConeError):
        ConeHandle.lorentzian([[1, 0], [0, -1]], (0, 1))


def test_lorentzian_restriction_cases():
    c = ConeHandle.lorentzian([[1, 0, 0], [0, -1, 0], [0, 0, -1]], (1, 0, 0))
    hyper = restrict(c, Subspace(3, [(1, 0, 0), (0, 1, 0)]))
    assert hyper.kind == "lorentzian"
    tangent = restrict(c, Subspace(3, [(1, 1, 0), (0, 0, 1)]))
    assert tangent.kind == "polyhedral" and len(tangent.payload.rays) == 1
    spacelike = restrict(c, Subspace(3, [(0, 1, 0)]))
    assert not is_nonzero(spacelike)


# ---------------------------------------------------------------------------
# properties


@st.composite
def pointed_rays(draw, n=3):
    """Random rays in the open half-space x_0 > 0, hence a pointed cone."""
    k = draw(st.integers(1, 6))
    rays = []
    for _ in range(k):
        tail = draw(st.lists(st.integers(-4, 4), min_size=n - 1, max_size=n - 1))
        rays.append((draw(st.integers(1, 4)),) + tuple(tail))
    return rays


@given(pointed_rays())
def test_membership_lp_agrees_with_facets(rays):
    c = ConeHandle.polyhedral(rays)
    rng = random.Random(len(rays))
    for _ in range(10):
        v = tuple(rng.randint(-5, 5) for _ in range(3))
        assert c.payload.contains(v) == c.payload.contains_by_facets(v)
    for r in rays:
        assert contains(c, r)


@given(pointed_rays())
def test_double_description_roundtrip(rays):
    c = ConeHandle.polyhedral(rays)
    ext = c.payload.extreme()
    again = ConeHandle.polyhedral(ext, 3)
    assert again == c
    # every input ray satisfies every facet inequality
    for r in rays:
        assert all(sum(a * x for a, x in zip(f, r)) >= 0 for f in c.payload.facets)


@given(pointed_rays(), st.integers(0, 10**6))
def test_restrict_composes(rays, seed):
    rng = random.Random(seed)
    c = ConeHandle.polyhedral(rays)
    w1 = Subspace(3, [[rng.randint(-3, 3) for _ in range(3)] for _ in range(2)])
    assume(w1.dim == 2)
    coeffs = [rng.randint(-3, 3) for _ in range(2)]
    w2 = Subspace(3, [w1.from_coordinates(coeffs)])
    assume(w2.dim == 1)
    a = restrict(restrict(c, w1), w2)
    b = restrict(c, w2)
    assert a.payload.canonical() == b.payload.canonical()
    assert is_strictly_convex(a)[0]


@given(st.integers(0, 10**6))
def test_preserves_is_closed_under_products(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    c = ConeHandle.orthant(n)
    mats = []
    for _ in range(2):
        m = ExactMatrix.identity(n)
        for _ in range(rng.randint(1, 4)):
            i, j = rng.sample(range(n), 2)
            m = m @ elementary(n, i, j, rng.choice((1, -1)))
        mats.append(m)
    g, h = mats
    if preserves(g, c)[0] and preserves(h, c)[0]:
        assert preserves(g @ h, c)[0]


@st.composite
def forward_vectors(draw):
    # forward cone of diag(1, -1, -1, -1): x0 >= |(x1, x2, x3)|
    tail = draw(st.lists(st.integers(-6, 6), min_size=3, max_size=3))
    norm2 = sum(t * t for t in tail)
    x0 = draw(st.integers(0, 4)) + int(norm2**0.5) + 1
    return (x0,) + tuple(tail)


@given(forward_vectors(), forward_vectors())
def test_forward_vectors_pair_nonnegatively(u, v):
    c = ConeHandle.lorentzian([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]], (1, 0, 0, 0))
    L = c.payload
    assert contains(c, u) and contains(c, v)
    p = L.pair(u, v)
    assert p >= 0
    if p == 0:
        assert L.q(u) == 0 and L.q(v) == 0
        assert all(a * v[0] == b * u[0] for a, b in zip(u, v))


def test_nonneg_solution_certificate():
    sol = nonneg_solution([[1, 0, 1], [0, 1, 1]], [2, 3])
    assert sol is not None and all(x >= 0 for x in sol)
    assert sol[0] + sol[2] == 2 and sol[1] + sol[2] == 3
    assert nonneg_solution([[1, 0], [0, 1]], [1, -1]) is None


def test_extreme_rays_of_orthant_inequalities():
    rows = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    rays = extreme_rays(rows, 3)
    assert sorted(tuple(Fraction(x) for x in r) for r in rays) == sorted(
        [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    )


@pytest.mark.parametrize(
    "u,v,zero",
    [((5, 3, 4, 0), (10, 6, 8, 0), True), ((5, 3, 4, 0), (5, -3, 4, 0), False), ((1, 1, 0, 0), (3, 0, 0, 0), False)],
)
def test_boundary_rays_pair_to_zero_only_when_parallel(u, v, zero):
    c = ConeHandle.lorentzian([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]], (1, 0, 0, 0))
    assert (c.payload.pair(u, v) == 0) == zero
