"""Exact phase-one simplex (Bland's rule) over any ordered exact field."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..exactalg.matrix import _fdiv, _norm


def nonneg_solution(M: Sequence[Sequence], b: Sequence) -> list | None:
    """Find x >= 0 with M x = b, or return None when infeasible.

    ``M`` is m x n.  Entries may be Fractions or real number-field elements;
    comparisons are exact.  Bland's rule guarantees termination.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    tab = []
    for i in range(m):
        row = list(M[i])
        rhs = b[i]
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        tab.append(row + [1 if k == i else 0 for k in range(m)] + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m
    # reduced costs of the phase-one objective (sum of artificials)
    cost = [0] * (width + 1)
    for j in range(n):
        cost[j] = -sum((tab[i][j] for i in range(m)), 0)
    cost[width] = -sum((tab[i][width] for i in range(m)), 0)

    for _ in range(10_000):
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = _fdiv(tab[i][width], a)
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # unbounded direction cannot occur for a phase-one objective bounded below by 0
            break
        r = best[1]
        piv = tab[r][enter]
        inv = _fdiv(1, piv)
        tab[r] = [_norm(x * inv) for x in tab[r]]
        for i in range(m):
            if i != r:
                f = tab[i][enter]
                if f != 0:
                    tab[i] = [_norm(x - f * y) for x, y in zip(tab[i], tab[r])]
        f = cost[enter]
        cost = [_norm(x - f * y) for x, y in zip(cost, tab[r])]
        basis[r] = enter
    else:
        raise RuntimeError("simplex iteration budget exhausted")
    if cost[width] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = tab[i][width]
        elif tab[i][width] != 0:
            return None
    return x
