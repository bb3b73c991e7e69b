"""Reproducible instance families for tests, benchmarks and experiments."""

from __future__ import annotations

import random

from .exactalg.matrix import ExactMatrix
from .hyperbolic import binary_forms_lattice, sym2

FIB = ExactMatrix([[1, 1], [1, 0]])
CAT = ExactMatrix([[2, 1], [1, 1]])
SHEAR = ExactMatrix([[1, 1], [0, 1]])
ROTATION = ExactMatrix([[0, -1], [1, 0]])


def elementary(n: int, i: int, j: int, c: int = 1) -> ExactMatrix:
    rows = [[int(a == b) for b in range(n)] for a in range(n)]
    rows[i][j] += c
    return ExactMatrix(rows)


def signed_permutation(n: int, rng: random.Random) -> ExactMatrix:
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [[0] * n for _ in range(n)]
    for i, p in enumerate(perm):
        rows[i][p] = rng.choice((1, -1))
    return ExactMatrix(rows)


def random_unimodular(n: int, length: int, rng: random.Random, signed: bool = True) -> ExactMatrix:
    """Product of ``length`` elementary matrices E_ij(+-1), optionally with a signed permutation."""
    m = ExactMatrix.identity(n)
    for _ in range(length):
        i, j = rng.sample(range(n), 2)
        m = m @ elementary(n, i, j, rng.choice((1, -1)))
    if signed and rng.random() < 0.5:
        m = m @ signed_permutation(n, rng)
    return m


def heisenberg_triple() -> list[ExactMatrix]:
    return [elementary(3, 0, 1), elementary(3, 1, 2), elementary(3, 0, 2)]


def fibonacci_blocks() -> list[ExactMatrix]:
    """F + I2 and I2 + B with F Fibonacci and B = [[2,1],[1,1]]."""
    i2 = ExactMatrix.identity(2)
    return [ExactMatrix.block_diag(FIB, i2), ExactMatrix.block_diag(i2, CAT)]


def power_pair() -> list[ExactMatrix]:
    """{A + I2, A^2 + I2} with A Fibonacci: one multiplicative relation."""
    i2 = ExactMatrix.identity(2)
    return [ExactMatrix.block_diag(FIB, i2), ExactMatrix.block_diag(FIB @ FIB, i2)]


def _nonneg_unimodular(n: int, length: int, rng: random.Random) -> ExactMatrix:
    m = ExactMatrix.identity(n)
    for _ in range(length):
        i, j = rng.sample(range(n), 2)
        m = m @ elementary(n, i, j, 1)
    return m


def _upper_unipotent(n: int, rng: random.Random, density: float = 0.6) -> ExactMatrix:
    rows = [[int(a == b) for b in range(n)] for a in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                rows[a][b] = rng.randint(0, 2)
    return ExactMatrix(rows)


def solvable_orthant_suite(count: int = 30, seed: int = 2) -> list[tuple[str, list[ExactMatrix]]]:
    """Generator sets of solvable groups preserving the positive orthant.

    Families cycle through: commuting upper-unipotent pairs, powers of one
    nonnegative unimodular matrix, block sums of nonnegative blocks, and the
    Heisenberg triple.
    """
    rng = random.Random(seed)
    out: list[tuple[str, list[ExactMatrix]]] = [("heisenberg", heisenberg_triple())]
    k = 0
    while len(out) < count:
        n = 2 + k % 5
        fam = k % 4
        if fam == 0:
            u = _upper_unipotent(n, rng)
            out.append((f"unipotent-upper n={n}", [u, _upper_unipotent(n, rng)]))
        elif fam == 1:
            a = _nonneg_unimodular(n, rng.randint(1, 4), rng)
            out.append((f"nonneg-powers n={n}", [a, a @ a]))
        elif fam == 2:
            blocks, size = [], 0
            while size < n:
                if n - size >= 2 and rng.random() < 0.7:
                    blocks.append(rng.choice((FIB, CAT, SHEAR)))
                    size += 2
                else:
                    blocks.append(ExactMatrix.identity(1))
                    size += 1
            g = ExactMatrix.block_diag(*blocks)
            h = ExactMatrix.block_diag(*[b @ b for b in blocks])
            out.append((f"nonneg-blocks n={n}", [g, h]))
        else:
            # upper triangular with nonnegative superdiagonal block structure
            a = _nonneg_unimodular(2, rng.randint(1, 3), rng)
            rest = n - 2
            u = _upper_unipotent(rest, rng) if rest else None
            g = ExactMatrix.block_diag(a, u) if u is not None else a
            out.append((f"nonneg-block-triangular n={n}", [g]))
        k += 1
    return out[:count]


def triangularizable_suite(count: int = 50, seed: int = 4, max_rank: int = 6) -> list[list[ExactMatrix]]:
    """Commuting generator sets (simultaneously triangularizable), conjugated by a small unimodular P."""
    rng = random.Random(seed)
    out = []
    two_by_two = [FIB, CAT, SHEAR, ExactMatrix([[3, 1], [2, 1]]), ExactMatrix([[0, 1], [1, 3]])]
    while len(out) < count:
        n = rng.randint(2, max_rank)
        s = rng.randint(1, 3)
        blocks, size = [], 0
        while size < n:
            if n - size >= 2 and rng.random() < 0.7:
                blocks.append(rng.choice(two_by_two))
                size += 2
            else:
                blocks.append(ExactMatrix([[rng.choice((1, -1))]]))
                size += 1
        gens = []
        for _ in range(s):
            exps = [rng.randint(-2, 2) for _ in blocks]
            gens.append(ExactMatrix.block_diag(*[b ** e for b, e in zip(blocks, exps)]))
        p = random_unimodular(n, 2, rng, signed=False)
        pi = p.inverse()
        out.append([p @ g @ pi for g in gens])
    return out


def sym2_suite():
    """(name, generators, expected surface rank) on the binary-forms lattice."""
    a = CAT
    ai = a.inverse()
    u = SHEAR
    return [
        ("powers of A", [sym2(a), sym2(a @ a)], 1),
        ("A and A^-1", [sym2(a), sym2(ai)], 1),
        ("A, A^2, A^3", [sym2(a), sym2(a @ a), sym2(a @ a @ a)], 1),
        ("Fibonacci square", [sym2(FIB @ FIB)], 1),
        ("shears", [sym2(u), sym2(u @ u)], 0),
        ("[[3,2],[1,1]]", [sym2(ExactMatrix([[3, 2], [1, 1]]))], 1),
    ]


__all__ = [
    "CAT",
    "FIB",
    "ROTATION",
    "SHEAR",
    "binary_forms_lattice",
    "elementary",
    "fibonacci_blocks",
    "heisenberg_triple",
    "power_pair",
    "random_unimodular",
    "signed_permutation",
    "solvable_orthant_suite",
    "sym2_suite",
    "triangularizable_suite",
]
