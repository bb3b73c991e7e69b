"""Command-line interface: eigenray, entropy, rank, dyndeg, verify.

Exit statuses: 0 success, 1 verification failure, 2 failure certificate or
unresolved outcome, 3 parse error, 4 budget fault.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__
from .entropy import FlagUnavailable, chi_vector, is_null_entropy, weak_tits_report
from .exactalg.matrix import ExactMatrix, char_poly
from .exactalg.roots import RefinementFailed, spectral_radius_enclosure
from .hyperbolic import (
    LorentzLattice,
    PrecisionFault,
    TorusAction,
    check_isometry,
    classify,
    dynamical_degrees,
    surface_entropy_rank,
    torus_entropy_rank,
)
from .kolchin import BudgetExceeded, FailureCertificate, KolchinConfig, common_eigen_ray, power_trick
from .problem import Budgets, ParseError, ProblemFile, load_problem
from . import report as R

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CERTIFICATE = 2
EXIT_PARSE = 3
EXIT_BUDGET = 4


def _lattice(prob: ProblemFile) -> LorentzLattice | None:
    section = prob.lorentz
    if section is None and prob.cone_data is not None and prob.cone_data["kind"] == "lorentzian":
        section = prob.cone_data
    if section is None:
        return None
    return LorentzLattice(
        ExactMatrix([[int(x) for x in r] for r in section["gram"]]),
        tuple(int(x) for x in section["orientation"]),
    )


# ---------------------------------------------------------------------------
# commands (each returns (result dict, exit code))


def cmd_eigenray(prob: ProblemFile, power: int = 1, max_field_degree: int = 64):
    if prob.cone is None:
        raise ParseError("$.cone", "the eigenray command needs a cone")
    gens = prob.generators
    heuristic = None
    if power > 1:
        gens = power_trick(gens, power).generators
        heuristic = f"power_trick k={power}"
    cfg = KolchinConfig(max_field_degree=max_field_degree, precision=prob.budgets.precision)
    try:
        res = common_eigen_ray(gens, prob.cone, cfg)
    except BudgetExceeded as exc:
        out = {"outcome": "budget_fault", "message": str(exc), "trace": R._plain(exc.trace)}
        out["max_field_degree"] = max_field_degree
        return out, EXIT_BUDGET
    if isinstance(res, FailureCertificate):
        out = R.enc_failure(res)
        out["max_field_degree"] = max_field_degree
        out["heuristic"] = heuristic
        out["open_question"] = (
            "passing to a finite-index subgroup is not algorithmic here; "
            "retrying with --power k (k-th powers of the generators) is a heuristic without guarantee"
        )
        return out, EXIT_CERTIFICATE
    res.heuristic = heuristic
    out = R.enc_eigenray(res)
    out["max_field_degree"] = max_field_degree
    return out, EXIT_OK


def cmd_entropy(prob: ProblemFile):
    lat = _lattice(prob)
    rows = []
    p = prob.budgets.precision
    for lab, g in zip(prob.labels, prob.generators):
        row = {
            "label": lab,
            "null_entropy": is_null_entropy(g),
            "chi": R.enc_chi(chi_vector(g, p)),
            "spectral_radius": R.enc_interval(spectral_radius_enclosure(char_poly(g), 64)),
        }
        if lat is not None and check_isometry(g, lat):
            cl = classify(g, lat)
            row["class"] = {
                "tag": cl.tag,
                "rho": R.enc_alg(cl.rho) if cl.rho is not None else None,
                "rho_factor": [str(c) for c in cl.rho_factor] if cl.rho_factor else None,
                "order": cl.order,
            }
        rows.append(row)
    return {"outcome": "entropy_table", "generators": rows, "precision": p}, EXIT_OK


def cmd_rank(prob: ProblemFile):
    b = prob.budgets
    out: dict = {"outcome": "rank"}
    code = EXIT_OK
    wt = weak_tits_report(prob.generators, b.precision, b.depth, b.max_word_len)
    block = {"resolved": wt.resolved, "message": wt.message, "bounds": wt.bounds, "null_entropy": wt.null_entropy}
    if wt.resolved:
        block["rank"] = R.enc_rank(wt.rank)
        block["flag_exact"] = wt.flag.exact
    else:
        block["failure"] = R.enc_not_tri(wt.failure)
        code = EXIT_CERTIFICATE
    out["weak_tits"] = block
    if prob.complex_structure is not None:
        t = TorusAction(prob.generators, prob.complex_structure)
        try:
            out["torus"] = R.enc_rank(torus_entropy_rank(t, b.precision, b.depth, b.max_word_len))
        except FlagUnavailable as exc:
            out["torus_unresolved"] = R.enc_not_tri(exc.report)
    lat = _lattice(prob)
    if lat is not None and all(check_isometry(g, lat) for g in prob.generators):
        try:
            out["surface"] = R.enc_rank(surface_entropy_rank(prob.generators, lat, b.precision, b.depth, b.max_word_len))
        except FlagUnavailable as exc:
            out["surface_unresolved"] = R.enc_not_tri(exc.report)
    return out, code


def cmd_dyndeg(prob: ProblemFile):
    rows = []
    for lab, g in zip(prob.labels, prob.generators):
        rows.append({"label": lab, "dynamical_degrees": R.enc_dyndeg(dynamical_degrees(g, min(prob.budgets.precision, 128)))})
    return {"outcome": "dynamical_degrees", "generators": rows}, EXIT_OK


def cmd_verify(report: dict):
    return R.verify_report(report)


# ---------------------------------------------------------------------------
# human rendering


def _pm(enc: dict) -> str:
    if "mid" in enc:
        if enc["lo"] == enc["hi"]:
            return f"{enc['mid']} (exact)"
        return f"{enc['mid']} +- {enc['width']}"
    if enc.get("radius") == "0":
        return f"{enc['approx']} (exact)"
    return f"{enc['approx']} +- {enc['width']}"


def render_human(report: dict) -> str:
    lines = [f"liecone {report['reproduction']['version']} :: {report['command']}"]
    res = report["result"]
    cmd = report["command"]
    if cmd == "eigenray":
        if res["outcome"] == "eigenray":
            lines.append("common eigenray found")
            if res["field"]:
                lines.append(f"  field: Q[x]/({' '.join(res['field']['modulus'])}) (low degree first), x ~ {_pm(res['field']['root'])}")
            lines.append("  ray: " + ", ".join(_pm(e) for e in res["ray_enclosures"]))
            for lab, v in zip((g["label"] for g in report["problem"]["generators"]), res["eigenvalues"]):
                lines.append(f"  chi({lab}) = {_pm(v)}")
            if res.get("heuristic"):
                lines.append(f"  obtained after {res['heuristic']} (heuristic)")
        elif res["outcome"] == "failure_certificate":
            lines.append(f"FAILURE CERTIFICATE at stage {res['stage']}: {res['kind']}")
            for k, v in sorted(res["datum"].items()):
                lines.append(f"  {k}: {json.dumps(v)}")
            lines.append(f"  note: {res['open_question']}")
        else:
            lines.append(f"BUDGET FAULT: {res['message']}")
    elif cmd == "entropy":
        for row in res["generators"]:
            kind = "null entropy" if row["null_entropy"] else "positive entropy"
            lines.append(f"{row['label']}: {kind}, spectral radius {_pm(row['spectral_radius'])}")
            lines.append("  chi: (" + ", ".join(_pm(e) for e in row["chi"]["entries"]) + ")")
            if "class" in row:
                c = row["class"]
                extra = f" order {c['order']}" if c["order"] else ""
                lines.append(f"  isometry class: {c['tag']}{extra}")
    elif cmd == "rank":
        wt = res["weak_tits"]
        lines.append(wt["message"])
        blocks = []
        if wt["resolved"]:
            blocks.append(("group", wt["rank"]))
        else:
            lines.append(f"  reason: {wt['failure']['reason']}")
        for key in ("torus", "surface"):
            if key in res:
                blocks.append((key, res[key]))
        for name, rk in blocks:
            lines.append(f"[{name}] rank in [{rk['lower']}, {rk['upper']}], bound {rk['bound']} ({rk['status']})")
            lines.append(f"  bound provenance: {rk['bound_provenance']}")
            for rel in rk["relations"]:
                lines.append(f"  relation m = ({', '.join(rel['exponents'])}): word has null entropy")
    elif cmd == "dyndeg":
        for row in res["generators"]:
            dd = row["dynamical_degrees"]
            lines.append(f"{row['label']}: d_k = " + ", ".join(_pm(x) for x in dd["degrees"]))
            lines.append(f"  entropy log max d_k = {_pm(dd['entropy'])}, peak at k in {dd['peak']}")
    r = report["reproduction"]
    lines.append(f"reproduction: sha256 {r['input_sha256']}, budgets {json.dumps(r['budgets'], sort_keys=True)}")
    lines.append(f"exit status {report['exit_code']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liecone", description="Certified cone eigenrays and entropy ranks for integer matrix groups.")
    ap.add_argument("--version", action="version", version=f"liecone {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("eigenray", "entropy", "rank", "dyndeg"):
        sp = sub.add_parser(name)
        sp.add_argument("input")
        sp.add_argument("--precision", type=int, default=None)
        sp.add_argument("--depth", type=int, default=None)
        sp.add_argument("--max-word-len", type=int, default=None)
        sp.add_argument("--format", choices=("human", "machine"), default="human")
        sp.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
        if name == "eigenray":
            sp.add_argument("--power", type=int, default=1, help="replace generators by k-th powers first (heuristic)")
            sp.add_argument("--max-field-degree", type=int, default=64, help="largest number-field degree before a budget fault")
    sp = sub.add_parser("verify")
    sp.add_argument("report")
    sp.add_argument("--format", choices=("human", "machine"), default="human")
    return ap


def _apply_flags(prob: ProblemFile, args) -> ProblemFile:
    b = prob.budgets
    nb = Budgets(
        args.precision if args.precision is not None else b.precision,
        args.depth if args.depth is not None else b.depth,
        args.max_word_len if args.max_word_len is not None else b.max_word_len,
    )
    return dataclasses.replace(prob, budgets=nb)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "verify":
        try:
            with open(args.report, encoding="utf-8") as fh:
                report = json.load(fh)
            vr = cmd_verify(report)
        except (OSError, json.JSONDecodeError, KeyError, ParseError) as exc:
            sys.stderr.write(f"parse error: {exc}\n")
            return EXIT_PARSE
        if args.format == "machine":
            sys.stdout.write(json.dumps({"pass": vr.ok, "checks": [{"check": n, "pass": ok} for n, ok in vr.checks]}, indent=2, sort_keys=True) + "\n")
        else:
            for n, ok in vr.checks:
                sys.stdout.write(f"{'PASS' if ok else 'FAIL'}  {n}\n")
            sys.stdout.write("verify: PASS\n" if vr.ok else "verify: FAIL (certificate anomaly)\n")
        return EXIT_OK if vr.ok else EXIT_VERIFY_FAILED
    try:
        prob = _apply_flags(load_problem(args.input), args)
    except ParseError as exc:
        sys.stderr.write(f"parse error at {exc.where}: {exc.message}\n")
        return EXIT_PARSE
    except OSError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    try:
        if args.command == "eigenray":
            result, code = cmd_eigenray(prob, args.power, args.max_field_degree)
        elif args.command == "entropy":
            result, code = cmd_entropy(prob)
        elif args.command == "rank":
            result, code = cmd_rank(prob)
        else:
            result, code = cmd_dyndeg(prob)
    except ParseError as exc:
        sys.stderr.write(f"parse error at {exc.where}: {exc.message}\n")
        return EXIT_PARSE
    except (BudgetExceeded, RefinementFailed, PrecisionFault) as exc:
        result, code = {"outcome": "budget_fault", "message": str(exc), "trace": R._plain(getattr(exc, "trace", []))}, EXIT_BUDGET
    report = R.envelope(args.command, prob, result, code)
    text = R.dumps(report) if args.format == "machine" else render_human(report)
    _emit(text, args.output)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
