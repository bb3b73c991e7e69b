"""Time the engines on the generated instance suites.

    python scripts/bench_suites.py [--seed N]
"""

import argparse
import random
import time

from liecone.cones import ConeHandle
from liecone.entropy import entropy_rank, is_null_entropy
from liecone.hyperbolic import binary_forms_lattice, dynamical_degrees, surface_entropy_rank
from liecone.instances import random_unimodular, solvable_orthant_suite, sym2_suite, triangularizable_suite
from liecone.kolchin import common_eigen_ray, verify_common_ray


def timed(label, fn):
    t0 = time.perf_counter()
    summary = fn()
    print(f"{label:<28} {time.perf_counter() - t0:7.2f} s  {summary}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    def null_entropy():
        mats = [random_unimodular(rng.randint(2, 6), rng.randint(1, 8), rng) for _ in range(500)]
        return f"{sum(map(is_null_entropy, mats))}/500 null"

    def eigenrays():
        ok = 0
        for _, gens in solvable_orthant_suite(30, seed=2 + args.seed):
            c = ConeHandle.orthant(gens[0].rank)
            ok += verify_common_ray(gens, c, common_eigen_ray(gens, c))
        return f"{ok}/30 verified"

    def ranks():
        hist = {}
        for gens in triangularizable_suite(50, seed=4 + args.seed):
            r = entropy_rank(gens)
            hist[r.upper] = hist.get(r.upper, 0) + 1
        return "upper-bound histogram " + str(dict(sorted(hist.items())))

    def surfaces():
        lat = binary_forms_lattice()
        got = [surface_entropy_rank(g, lat).upper == e for _, g, e in sym2_suite()]
        return f"{sum(got)}/{len(got)} match"

    def degrees():
        for _ in range(100):
            dynamical_degrees(random_unimodular(rng.randint(2, 6), rng.randint(1, 8), rng))
        return "100 sequences certified"

    timed("null entropy (500)", null_entropy)
    timed("common eigenray (30)", eigenrays)
    timed("entropy rank (50)", ranks)
    timed("surface rank (sym2)", surfaces)
    timed("dynamical degrees (100)", degrees)


if __name__ == "__main__":
    main()
