"""Acceptance criteria 1-9, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary (see conftest).
"""

import json
import random
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from liecone.cli import cmd_verify, run
from liecone.cones import ConeHandle, preserves
from liecone.entropy import chi_vector, entropy_rank, is_null_entropy
from liecone.exactalg import poly as P
from liecone.exactalg.matrix import ExactMatrix, char_poly
from liecone.exactalg.numfield import NFElement
from liecone.exactalg.roots import max_modulus_root
from liecone.hyperbolic import (
    TorusAction,
    binary_forms_lattice,
    chi_dichotomy,
    dynamical_degrees,
    surface_entropy_rank,
    torus_entropy_rank,
)
from liecone.instances import (
    CAT,
    FIB,
    elementary,
    fibonacci_blocks,
    power_pair,
    random_unimodular,
    solvable_orthant_suite,
    sym2_suite,
    triangularizable_suite,
)
from liecone.kolchin import CommonEigenRay, common_eigen_ray, verify_common_ray

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
TWO_M64 = Fraction(1, 2**64)


def truncation_cell(decimal: str) -> tuple[Fraction, Fraction]:
    """Reals whose decimal expansion begins with ``decimal``."""
    x = Fraction(decimal)
    ulp = Fraction(1, 10 ** len(decimal.split(".")[1]))
    return x, x + ulp


def meets(iv, cell) -> bool:
    return not (iv.hi < cell[0] or cell[1] < iv.lo)


def test_criterion_1_null_entropy_oracle():
    rng = random.Random(20240501)
    t0 = time.perf_counter()
    disagreements = []
    for trial in range(500):
        n = rng.randint(2, 6)
        m = ExactMatrix.identity(n)
        for _ in range(rng.randint(1, 8)):
            i, j = rng.sample(range(n), 2)
            m = m @ elementary(n, i, j, rng.choice((1, -1)))
        a = np.array([[float(x) for x in row] for row in m.rows])
        positive = max(abs(np.linalg.eigvals(a))) > 1.01
        if is_null_entropy(m) == positive:
            disagreements.append((trial, m))
    elapsed = time.perf_counter() - t0
    assert not disagreements, disagreements[:3]
    assert elapsed < 60, elapsed


def test_criterion_2_lie_kolchin_soundness():
    t0 = time.perf_counter()
    suite = solvable_orthant_suite(30)
    assert len(suite) == 30 and suite[0][0] == "heisenberg"
    assert {g[0].rank for _, g in suite} == {2, 3, 4, 5, 6}
    algebraic = 0
    for name, gens in suite:
        cone = ConeHandle.orthant(gens[0].rank)
        r = common_eigen_ray(gens, cone)
        assert isinstance(r, CommonEigenRay), name
        # exact: membership and g v = chi v in Q or in the number field (residual 0)
        assert verify_common_ray(gens, cone, r), name
        for chi, enc in zip(r.exact_eigenvalues, r.eigenvalues):
            if isinstance(chi, NFElement) and not chi.is_rational():
                algebraic += 1
                assert enc.width <= TWO_M64, name
        for x in r.ray:
            if isinstance(x, NFElement) and not x.is_rational():
                iv = x.interval(64)
                assert iv.hi - iv.lo <= TWO_M64, name
    assert algebraic > 0
    assert time.perf_counter() - t0 < 120


def test_criterion_3_fibonacci_benchmarks():
    rho = max_modulus_root(char_poly(FIB), 64)
    assert rho.width <= Fraction(1, 10**8)
    assert meets(rho.interval, truncation_cell("1.6180339887"))
    top = max(chi_vector(FIB, 64).entries, key=lambda e: e.mid)
    assert top.width <= Fraction(1, 10**8)
    assert meets(top, truncation_cell("0.4812118250"))
    dd = dynamical_degrees(FIB)
    assert meets(dd.entropy, truncation_cell("0.4812118250"))
    d0, d1, d2 = dd.degrees
    assert d0.lo == d0.hi == 1 and d2.lo == d2.hi == 1
    assert meets(d1, truncation_cell("1.6180339887")) and d1.width <= Fraction(1, 10**8)


def test_criterion_4_rank_bound():
    for gens in triangularizable_suite(50):
        r = entropy_rank(gens)
        assert r.upper <= gens[0].rank - 1
        assert r.lower <= r.upper
        assert all(rel.recheck(gens) for rel in r.relations)
    blocks = entropy_rank(fibonacci_blocks())
    assert blocks.lower == blocks.upper == 2 and not blocks.relations
    gens = power_pair()
    pw = entropy_rank(gens)
    assert pw.lower == pw.upper == 1
    (rel,) = pw.relations
    assert tuple(rel.exponents) in ((2, -1), (-2, 1))
    assert rel.word.is_identity() and rel.recheck(gens)


def test_criterion_5_surface_dichotomy():
    t0 = time.perf_counter()
    lat = binary_forms_lattice()
    suite = sym2_suite()
    assert sum(len(g) for _, g, _ in suite) >= 5
    for name, gens, expected in suite:
        d = chi_dichotomy(gens, lat)
        assert d.ok, name
        for e, g in zip(d.entries, gens):
            chi = d.ray.exact_eigenvalues[e.generator]
            f = P.squarefree_part(P.cyclotomic_split(char_poly(g))[1])
            if e.branch == "both":
                assert chi == 1 and is_null_entropy(g)
            else:
                # chi is a root of the rho-factor, and that factor is reciprocal,
                # so chi and 1/chi are its two real roots off the unit circle
                assert sum(c * chi**k for k, c in enumerate(f)) == 0
                assert P.is_reciprocal(f)
                lo, hi = e.rho.interval.lo, e.rho.interval.hi
                c = chi if e.branch == "rho" else 1 / chi
                assert isinstance(c, NFElement), name
                civ = c.interval(64)
                assert not (civ.hi < lo or hi < civ.lo), name
        r = surface_entropy_rank(gens, lat)
        assert r.upper in (0, 1) and r.lower == r.upper == expected, name
    assert time.perf_counter() - t0 < 30


def test_criterion_6_dynamical_degree_unimodality():
    rng = random.Random(6)
    for _ in range(100):
        n = rng.randint(2, 6)
        g = random_unimodular(n, rng.randint(1, 8), rng)
        assert g.det() in (1, -1)
        dd = dynamical_degrees(g)
        assert dd.degrees[0].lo == dd.degrees[0].hi == 1
        assert dd.degrees[n].lo == dd.degrees[n].hi == 1
        L = dd.log_degrees
        assert all(2 * L[k].hi >= L[k - 1].lo + L[k + 1].lo for k in range(1, n))
        # unimodal: the indices that may attain the maximum form one block
        peak = dd.peak
        assert peak == list(range(peak[0], peak[-1] + 1))


def _all_cli_reports(tmp_path):
    jobs = []
    for f in sorted(PROBLEMS.glob("*.json")):
        for cmd in ("eigenray", "entropy", "rank", "dyndeg"):
            jobs.append([cmd, str(f)])
    jobs.append(["eigenray", str(PROBLEMS / "fibonacci_block_orthant.json"), "--max-field-degree", "1"])
    jobs.append(["eigenray", str(PROBLEMS / "rotation_orthant.json"), "--power", "4"])
    jobs.append(["rank", str(PROBLEMS / "power_relation.json"), "--precision", "96", "--depth", "4"])
    for k, job in enumerate(jobs):
        out = tmp_path / f"report{k}.json"
        code = run(job + ["--format", "machine", "-o", str(out)])
        if code != 3:
            yield job, code, out


def test_criterion_7_certificate_round_trip(tmp_path):
    count = 0
    for job, code, out in _all_cli_reports(tmp_path):
        report = json.loads(out.read_text())
        assert report["exit_code"] == code
        assert cmd_verify(report).ok, job
        assert run(["verify", str(out)]) == 0, job
        count += 1
    assert count >= 30


def test_criterion_8_failure_certificates(tmp_path):
    out = tmp_path / "rot.json"
    assert run(["eigenray", str(PROBLEMS / "rotation_orthant.json"), "--format", "machine", "-o", str(out)]) == 2
    rep = json.loads(out.read_text())
    res = rep["result"]
    assert res["kind"] == "not_preserved"
    g = ExactMatrix([[int(x) for x in row] for row in rep["problem"]["generators"][res["datum"]["generator"]]["entries"]])
    assert not preserves(g, ConeHandle.orthant(2))[0]
    w = tuple(int(x) for x in res["datum"]["witness"])
    assert min(w) < 0 and min(g.inverse() @ w) >= 0
    assert cmd_verify(rep).ok

    out = tmp_path / "nu.json"
    assert run(["eigenray", str(PROBLEMS / "non_unipotent.json"), "--format", "machine", "-o", str(out)]) == 2
    rep = json.loads(out.read_text())
    res = rep["result"]
    assert res["kind"] == "not_unipotent"
    r = int(rep["problem"]["lattice_rank"])
    cp = tuple(Fraction(x) for x in res["datum"]["char_poly"])
    assert cp != P.to_fraction(P.power((-1, 1), r))
    assert cmd_verify(rep).ok


def test_criterion_9_torus_bound(tmp_path):
    J = ExactMatrix([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])
    gens = [ExactMatrix.block_diag(CAT, CAT)]
    r = torus_entropy_rank(TorusAction(gens, J))
    assert r.upper <= 1 and r.bound == 1 < 3
    assert r.bound_provenance
    out = tmp_path / "torus.json"
    assert run(["rank", str(PROBLEMS / "torus_product.json"), "--format", "machine", "-o", str(out)]) == 0
    tor = json.loads(out.read_text())["result"]["torus"]
    assert tor["upper"] <= 1 and tor["bound"] == 1
    assert "n - 1" in tor["bound_provenance"] and "3" in tor["bound_provenance"]
