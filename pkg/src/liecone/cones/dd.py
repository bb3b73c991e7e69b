"""Double description: extreme rays of a pointed cone {x : A x >= 0}."""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Sequence

from ..exactalg.matrix import _fdiv, inverse
from ..exactalg.subspace import rank


class NotPointed(ValueError):
    """The inequality system has a nonzero lineality space."""


def _dot(a, b):
    acc = 0
    for x, y in zip(a, b):
        if x == 0 or y == 0:
            continue
        acc = acc + x * y
    return acc


def normalize_ray(v: Sequence) -> tuple:
    """Canonical positive multiple: primitive integers for rational rays,
    first nonzero coordinate of absolute value 1 otherwise."""
    v = list(v)
    if all(isinstance(x, (int, Fraction)) for x in v):
        fr = [Fraction(x) for x in v]
        den = 1
        for x in fr:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in fr]
        g = 0
        for x in ints:
            g = gcd(g, x)
        if g == 0:
            return tuple(ints)
        return tuple(x // g for x in ints)
    lead = next((x for x in v if x != 0), None)
    if lead is None:
        return tuple(v)
    s = lead if lead > 0 else -lead
    return tuple(_norm_entry(_fdiv(x, s)) for x in v)


def _norm_entry(x):
    if hasattr(x, "is_rational") and callable(x.is_rational) and x.is_rational():
        f = x.as_fraction()
        return int(f) if f.denominator == 1 else f
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def ray_cmp(a: Sequence, b: Sequence) -> int:
    for x, y in zip(a, b):
        if x != y:
            return -1 if x < y else 1
    return 0


def sort_rays(rays):
    return sorted(rays, key=cmp_to_key(ray_cmp))


def dedupe(rays):
    out = []
    for r in rays:
        if not any(all(x == y for x, y in zip(r, s)) for s in out):
            out.append(r)
    return out


def extreme_rays(A: Sequence[Sequence], k: int) -> list[tuple]:
    """Extreme rays of {x in K^k : A x >= 0}; raises NotPointed for a lineality space."""
    A = [list(row) for row in A if any(x != 0 for x in row)]
    if k == 0:
        return []
    sel: list[int] = []
    for i in range(len(A)):
        if rank([A[j] for j in sel] + [A[i]]) > len(sel):
            sel.append(i)
            if len(sel) == k:
                break
    if len(sel) < k:
        raise NotPointed("constraint matrix does not have full column rank")
    inv = inverse([A[i] for i in sel])
    rays = [tuple(inv[r][c] for r in range(k)) for c in range(k)]
    done = list(sel)
    for i in range(len(A)):
        if i in sel:
            continue
        a = A[i]
        vals = [_dot(a, r) for r in rays]
        pos = [j for j, v in enumerate(vals) if v > 0]
        neg = [j for j, v in enumerate(vals) if v < 0]
        zer = [j for j, v in enumerate(vals) if v == 0]
        new = [rays[j] for j in pos] + [rays[j] for j in zer]
        if neg:
            tight = [[_dot(A[c], r) == 0 for c in done] for r in rays]
            for p in pos:
                for q in neg:
                    common = [done[t] for t in range(len(done)) if tight[p][t] and tight[q][t]]
                    if len(common) < k - 2:
                        continue
                    if rank([A[c] for c in common]) != k - 2:
                        continue
                    vp, vq = vals[p], vals[q]
                    new.append(tuple(vp * y - vq * x for x, y in zip(rays[p], rays[q])))
        rays = new
        done.append(i)
        if not rays:
            break
    return sort_rays(dedupe([normalize_ray(r) for r in rays]))
