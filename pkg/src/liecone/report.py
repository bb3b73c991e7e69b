"""Report construction, serialization and from-scratch verification.

Machine reports are JSON.  Exact data is written as strings ("p/q"); every
approximate quantity is an enclosure object carrying its width.  The problem
is embedded in normalized form so that ``verify`` needs nothing else.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import mpmath

from . import __version__
from .entropy import (
    ChiVector,
    EntropyRankReport,
    NotTriangularizable,
    RelationCertificate,
    _interval_rank,
    chi_vector,
    is_null_entropy,
)
from .exactalg.matrix import ExactMatrix, char_poly
from .exactalg.numfield import QQ, NFElement, NumberField
from .exactalg.roots import AlgebraicValue, RationalInterval, spectral_radius_enclosure
from .hyperbolic import DynamicalDegrees, LorentzLattice, classify
from .kolchin import CommonEigenRay, FailureCertificate, verify_common_ray
from .problem import ProblemFile, parse_problem

SCHEMA_VERSION = "1"


# ---------------------------------------------------------------------------
# encoders


def frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def unfrac(s: str) -> Fraction:
    return Fraction(s)


def _sig(q: Fraction, digits: int = 10) -> str:
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(mpmath.mpf(q.numerator) / q.denominator, digits)


def enc_interval(iv: RationalInterval) -> dict:
    return {
        "lo": frac(iv.lo),
        "hi": frac(iv.hi),
        "mid": _sig(iv.mid),
        "width": _sig(iv.width, 3),
    }


def dec_interval(d: dict) -> RationalInterval:
    return RationalInterval(unfrac(d["lo"]), unfrac(d["hi"]))


def enc_alg(v: AlgebraicValue) -> dict:
    return {
        "poly": [str(c) for c in v.poly],
        "re": frac(v.re),
        "im": frac(v.im),
        "radius": frac(v.radius),
        "real": v.real,
        "approx": _sig(v.re) if v.real else f"{_sig(v.re)} + {_sig(v.im)}i",
        "width": _sig(2 * v.radius, 3),
    }


def dec_alg(d: dict) -> AlgebraicValue:
    return AlgebraicValue(
        tuple(int(c) for c in d["poly"]),
        unfrac(d["re"]),
        unfrac(d["im"]),
        unfrac(d["radius"]),
        bool(d["real"]),
    )


def enc_field(K) -> dict | None:
    if K is QQ:
        return None
    return {"modulus": [str(c) for c in K.defining_poly], "root": enc_alg(K.value)}


def dec_field(d):
    if d is None:
        return QQ
    v = dec_alg(d["root"])
    mod = tuple(int(c) for c in d["modulus"])
    return NumberField(AlgebraicValue(mod, v.re, v.im, v.radius, v.real))


def enc_elem(x) -> dict:
    if isinstance(x, NFElement):
        if x.is_rational():
            return {"q": frac(x.as_fraction())}
        return {"coeffs": [frac(c) for c in x.coeffs]}
    return {"q": frac(x)}


def dec_elem(d: dict, K):
    if "q" in d:
        return unfrac(d["q"])
    if K is QQ:
        raise ValueError("algebraic coordinate without a field")
    return K.element(unfrac(c) for c in d["coeffs"])


def enc_approx(x, bits: int = 64) -> dict:
    """Enclosure of an exact scalar (rational or real number-field element)."""
    if isinstance(x, NFElement):
        iv = x.interval(bits)
    else:
        q = Fraction(x)
        iv = RationalInterval(q, q)
    return enc_interval(iv)


def _plain(obj):
    """Recursively turn exact data (Fractions, tuples, matrices) into JSON-ready values."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, Fraction)):
        return frac(obj)
    if isinstance(obj, ExactMatrix):
        return [[_plain(x) for x in r] for r in obj.rows]
    if isinstance(obj, dict):
        return {str(k): (v if k in ("generator",) else _plain(v)) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, NFElement):
        return enc_elem(obj)
    return str(obj)


# ---------------------------------------------------------------------------
# result encoders


def enc_eigenray(r: CommonEigenRay) -> dict:
    return {
        "outcome": "eigenray",
        "field": enc_field(r.field),
        "ray": [enc_elem(x) for x in r.ray],
        "ray_enclosures": [enc_approx(x) for x in r.ray],
        "eigenvalues": [enc_alg(v) for v in r.eigenvalues],
        "eigenvalues_exact": [enc_elem(x) for x in r.exact_eigenvalues],
        "trace": _plain(r.trace),
        "heuristic": r.heuristic,
    }


def enc_failure(c: FailureCertificate) -> dict:
    return {
        "outcome": "failure_certificate",
        "stage": c.stage,
        "kind": c.kind,
        "datum": _plain(c.datum),
        "trace": _plain(c.trace),
    }


def dec_failure(d: dict) -> FailureCertificate:
    datum = dict(d["datum"])
    conv = {}
    for k, v in datum.items():
        if k == "generator":
            conv[k] = int(v)
        elif k in ("commutator", "ambient", "subspace"):
            conv[k] = [[unfrac(x) for x in r] for r in v]
        else:
            conv[k] = v
    return FailureCertificate(int(d["stage"]), d["kind"], conv)


def enc_chi(c: ChiVector) -> dict:
    return {
        "entries": [enc_interval(e) for e in c.entries],
        "pinned": list(c.pinned),
        "order": c.ordered_by,
        "sum": enc_interval(c.sum_interval()),
    }


def enc_relation(rc: RelationCertificate) -> dict:
    return {
        "exponents": [str(m) for m in rc.exponents],
        "word": _plain(rc.word),
        "null_entropy": rc.null_entropy,
    }


def enc_rank(r: EntropyRankReport) -> dict:
    return {
        "lower": r.lower,
        "independent_generators": r.independent,
        "upper": r.upper,
        "bound": r.bound,
        "bound_provenance": r.bound_provenance,
        "sharper_bound": r.sharper_bound,
        "exact": r.exact,
        "status": r.status,
        "precision": r.precision,
        "flag_exact": r.flag_exact,
        "chi": [enc_chi(c) for c in r.chi],
        "relations": [enc_relation(c) for c in r.relations],
        "notes": list(r.notes),
    }


def enc_not_tri(nt: NotTriangularizable) -> dict:
    return {
        "reason": nt.reason,
        "stage": nt.stage,
        "certificate": enc_failure(nt.certificate) if nt.certificate is not None else None,
    }


def enc_dyndeg(d: DynamicalDegrees) -> dict:
    return {
        "degrees": [enc_interval(x) for x in d.degrees],
        "log_degrees": [enc_interval(x) for x in d.log_degrees],
        "exact_one": d.exact_one,
        "entropy": enc_interval(d.entropy),
        "peak": d.peak,
        "precision": d.precision,
    }


# ---------------------------------------------------------------------------
# report envelope


def problem_digest(normalized: dict) -> str:
    """sha256 of the canonical serialization of the embedded problem."""
    text = json.dumps(normalized, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(text.encode("ascii")).hexdigest()


def envelope(command: str, problem: ProblemFile, result: dict, exit_code: int) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "exit_code": exit_code,
        "result": result,
        "problem": problem.normalized(),
        "reproduction": {
            "input_sha256": problem.sha256,
            "problem_sha256": problem_digest(problem.normalized()),
            "budgets": {
                "precision": problem.budgets.precision,
                "depth": problem.budgets.depth,
                "max_word_len": problem.budgets.max_word_len,
            },
            "version": __version__,
        },
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


# ---------------------------------------------------------------------------
# verification


class VerifyResult:
    def __init__(self):
        self.checks: list[tuple[str, bool]] = []

    def add(self, name: str, ok: bool):
        self.checks.append((name, bool(ok)))

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(ok for _, ok in self.checks)


def _problem_of(report: dict) -> ProblemFile:
    return parse_problem(json.dumps(report["problem"]))


def _contains(enc: AlgebraicValue, exact, bits: int = 64) -> bool:
    if isinstance(exact, NFElement):
        iv = exact.interval(bits)
    else:
        q = Fraction(exact)
        iv = RationalInterval(q, q)
    lo, hi = enc.re - enc.radius, enc.re + enc.radius
    return not (iv.hi < lo or hi < iv.lo)


def _verify_eigenray(res: dict, prob: ProblemFile, out: VerifyResult):
    gens = prob.generators
    if res.get("heuristic"):
        from .kolchin import power_trick

        k = int(res["heuristic"].split("=")[1])
        gens = power_trick(gens, k).generators
    K = dec_field(res["field"])
    ray = tuple(dec_elem(d, K) for d in res["ray"])
    exact = [dec_elem(d, K) for d in res["eigenvalues_exact"]]
    exact = [K(x) if (K is not QQ and not isinstance(x, NFElement)) else x for x in exact]
    vals = [dec_alg(d) for d in res["eigenvalues"]]
    cand = CommonEigenRay(ray, vals, K, exact)
    out.add("eigenray: g v = chi v exactly, v in cone, chi > 0 root of char poly", verify_common_ray(gens, prob.cone, cand))
    out.add("eigenray: eigenvalue enclosures contain exact eigenvalues", all(_contains(v, x) for v, x in zip(vals, exact)))


def _verify_failure(res: dict, prob: ProblemFile, out: VerifyResult, gens=None):
    cert = dec_failure(res)
    out.add(f"failure certificate ({cert.kind}) re-validates", cert.recheck(gens or prob.generators, prob.cone))


def _verify_relations(rels: list, gens, out: VerifyResult, tag: str):
    for d in rels:
        m = tuple(int(x) for x in d["exponents"])
        word = ExactMatrix([[int(x) for x in r] for r in d["word"]])
        rc = RelationCertificate(m, word)
        out.add(f"{tag}: relation {list(m)} word recomputed and null entropy", rc.recheck(gens))


def _verify_rank_block(rk: dict, gens, out: VerifyResult, tag: str):
    out.add(f"{tag}: lower <= upper <= bound", rk["lower"] <= rk["upper"] <= rk["bound"])
    chis = [[dec_interval(e) for e in c["entries"]] for c in rk["chi"]]
    if chis and chis[0]:
        lower, _ = _interval_rank(chis, int(rk["precision"]) + 32)
        out.add(f"{tag}: interval rank of serialized log-moduli >= lower", lower >= rk["lower"])
    s = len(gens)
    rel_rank = 0
    if rk["relations"]:
        from .exactalg.subspace import rank

        rel_rank = rank([[int(x) for x in d["exponents"]] for d in rk["relations"]])
    out.add(f"{tag}: upper equals min(bound, s - rank(relations))", rk["upper"] == min(rk["bound"], s - rel_rank))
    _verify_relations(rk["relations"], gens, out, tag)


def verify_report(report: dict) -> VerifyResult:
    out = VerifyResult()
    out.add("embedded problem matches its digest", report["reproduction"].get("problem_sha256") == problem_digest(report["problem"]))
    prob = _problem_of(report)
    cmd = report["command"]
    res = report["result"]
    if cmd == "eigenray":
        if res["outcome"] == "eigenray":
            _verify_eigenray(res, prob, out)
        elif res["outcome"] == "failure_certificate":
            gens = prob.generators
            if res.get("heuristic"):
                from .kolchin import power_trick

                gens = power_trick(gens, int(res["heuristic"].split("=")[1])).generators
            _verify_failure(res, prob, out, gens)
        else:
            out.add("eigenray: budget fault carries no certificate", res["outcome"] == "budget_fault")
    elif cmd == "entropy":
        lat = None
        if prob.lorentz is not None:
            lat = LorentzLattice(
                ExactMatrix([[int(x) for x in r] for r in prob.lorentz["gram"]]),
                tuple(int(x) for x in prob.lorentz["orientation"]),
            )
        for g, row in zip(prob.generators, res["generators"]):
            out.add(f"entropy[{row['label']}]: null entropy decision", is_null_entropy(g) == row["null_entropy"])
            chi = [dec_interval(e) for e in row["chi"]["entries"]]
            lo = sum((e.lo for e in chi), Fraction(0))
            hi = sum((e.hi for e in chi), Fraction(0))
            out.add(f"entropy[{row['label']}]: chi sum contains 0", lo <= 0 <= hi)
            fresh = chi_vector(g, int(res["precision"]))
            out.add(
                f"entropy[{row['label']}]: chi entries agree with recomputation",
                all(not (a.hi < b.lo or b.hi < a.lo) for a, b in zip(chi, fresh.entries)) and len(chi) == len(fresh),
            )
            out.add(f"entropy[{row['label']}]: zero vector iff null entropy", all(row["chi"]["pinned"]) == row["null_entropy"])
            rad = spectral_radius_enclosure(char_poly(g), 64)
            iv = dec_interval(row["spectral_radius"])
            out.add(f"entropy[{row['label']}]: spectral radius enclosure", not (iv.hi < rad.lo or rad.hi < iv.lo))
            if lat is not None and "class" in row:
                cl = classify(g, lat)
                out.add(f"entropy[{row['label']}]: isometry class", cl.tag == row["class"]["tag"])
    elif cmd == "rank":
        gens = prob.generators
        wt = res["weak_tits"]
        if wt["resolved"]:
            _verify_rank_block(wt["rank"], gens, out, "rank")
        else:
            nt = wt["failure"]
            if nt.get("certificate"):
                _verify_failure(nt["certificate"], prob, out)
            else:
                out.add("rank: unresolved without certificate is reported as such", True)
        if "torus" in res:
            _verify_rank_block(res["torus"], gens, out, "torus")
            out.add("torus: bound is n - 1", res["torus"]["bound"] == prob.lattice_rank // 2 - 1)
        if "surface" in res:
            _verify_rank_block(res["surface"], gens, out, "surface")
            out.add("surface: rank in {0, 1}", res["surface"]["upper"] <= 1)
    elif cmd == "dyndeg":
        from .exactalg.matrix import exterior_power

        for g, row in zip(prob.generators, res["generators"]):
            dd = row["dynamical_degrees"]
            degs = [dec_interval(x) for x in dd["degrees"]]
            r = g.rank
            out.add(f"dyndeg[{row['label']}]: d_0 = d_r = 1 exactly", degs[0].lo == degs[0].hi == 1 and degs[r].lo == degs[r].hi == 1)
            ok = True
            for k in range(1, r):
                fresh = spectral_radius_enclosure(char_poly(exterior_power(g, k)), 64)
                if fresh.hi < degs[k].lo or degs[k].hi < fresh.lo:
                    ok = False
            out.add(f"dyndeg[{row['label']}]: enclosures agree with recomputation", ok)
            logs = [dec_interval(x) for x in dd["log_degrees"]]
            out.add(
                f"dyndeg[{row['label']}]: log-concave within enclosures",
                all(2 * logs[k].hi - logs[k - 1].lo - logs[k + 1].lo >= 0 for k in range(1, r)),
            )
    else:
        out.add(f"unknown command {cmd!r}", False)
    return out
