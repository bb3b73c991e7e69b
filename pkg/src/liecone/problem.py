"""Problem files: JSON with integers written as decimal strings.

Every field is validated before any engine runs; the first violation is
reported with its JSON path (and line/column for syntax errors).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .cones import ConeError, ConeHandle
from .exactalg.matrix import ExactMatrix

_INT = re.compile(r"^[+-]?\d+$")
_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")


class ParseError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


@dataclass(frozen=True)
class Budgets:
    precision: int = 128
    depth: int = 8
    max_word_len: int = 16


@dataclass
class ProblemFile:
    lattice_rank: int
    generators: list
    labels: list
    cone: ConeHandle | None = None
    cone_data: dict | None = None
    lorentz: dict | None = None
    complex_structure: ExactMatrix | None = None
    budgets: Budgets = field(default_factory=Budgets)
    raw: dict = field(default_factory=dict)
    sha256: str = ""

    def normalized(self) -> dict:
        """Canonical JSON-ready form, embedded in reports for re-verification."""
        out = {
            "lattice_rank": str(self.lattice_rank),
            "generators": [
                {"label": lab, "entries": [[str(x) for x in row] for row in g.rows]}
                for lab, g in zip(self.labels, self.generators)
            ],
        }
        if self.cone_data is not None:
            out["cone"] = self.cone_data
        if self.lorentz is not None:
            out["lorentz"] = self.lorentz
        if self.complex_structure is not None:
            out["complex_structure"] = [[_fstr(x) for x in row] for row in self.complex_structure.rows]
        out["budgets"] = {
            "precision": str(self.budgets.precision),
            "depth": str(self.budgets.depth),
            "max_word_len": str(self.budgets.max_word_len),
        }
        return out


def _fstr(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _int(v, where: str) -> int:
    if isinstance(v, bool):
        raise ParseError(where, "expected an integer string, got a boolean")
    if isinstance(v, int):
        return v
    if isinstance(v, str) and _INT.match(v.strip()):
        return int(v.strip())
    raise ParseError(where, f"expected an integer written as a decimal string, got {v!r}")


def _rat(v, where: str) -> Fraction:
    if isinstance(v, bool):
        raise ParseError(where, "expected a rational string, got a boolean")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str) and _RAT.match(v.strip()):
        return Fraction(v.strip())
    raise ParseError(where, f"expected a rational like \"3\" or \"-2/5\", got {v!r}")


def _matrix(v, n: int, where: str, parse=_int) -> list[list]:
    if not isinstance(v, list) or len(v) != n:
        raise ParseError(where, f"expected {n} rows")
    rows = []
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"{where}[{i}]", f"expected {n} entries")
        rows.append([parse(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    return rows


def _vector(v, n: int, where: str) -> list[int]:
    if not isinstance(v, list) or len(v) != n:
        raise ParseError(where, f"expected a list of {n} entries")
    return [_int(x, f"{where}[{j}]") for j, x in enumerate(v)]


def _cone(section, n: int, where: str) -> tuple[ConeHandle, dict]:
    if not isinstance(section, dict) or "kind" not in section:
        raise ParseError(where, "expected an object with a \"kind\" field")
    kind = section["kind"]
    try:
        if kind == "orthant":
            return ConeHandle.orthant(n), {"kind": "orthant"}
        if kind == "polyhedral":
            rays = section.get("rays")
            if not isinstance(rays, list) or not rays:
                raise ParseError(f"{where}.rays", "expected a nonempty list of rays")
            rr = [_vector(r, n, f"{where}.rays[{i}]") for i, r in enumerate(rays)]
            return ConeHandle.polyhedral(rr, n), {"kind": "polyhedral", "rays": [[str(x) for x in r] for r in rr]}
        if kind == "lorentzian":
            gram = _matrix(section.get("gram"), n, f"{where}.gram")
            h = _vector(section.get("orientation"), n, f"{where}.orientation")
            c = ConeHandle.lorentzian(gram, h)
            return c, {
                "kind": "lorentzian",
                "gram": [[str(x) for x in r] for r in gram],
                "orientation": [str(x) for x in h],
            }
    except ConeError as exc:
        raise ParseError(where, str(exc)) from exc
    raise ParseError(f"{where}.kind", f"unknown cone kind {kind!r} (orthant, polyhedral, lorentzian)")


def parse_problem(text: str) -> ProblemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc
    if not isinstance(data, dict):
        raise ParseError("$", "top level must be an object")
    if "lattice_rank" not in data:
        raise ParseError("$.lattice_rank", "missing")
    n = _int(data["lattice_rank"], "$.lattice_rank")
    if n < 1:
        raise ParseError("$.lattice_rank", "must be positive")
    gens_raw = data.get("generators")
    if not isinstance(gens_raw, list) or not gens_raw:
        raise ParseError("$.generators", "expected a nonempty list")
    gens, labels = [], []
    for i, g in enumerate(gens_raw):
        where = f"$.generators[{i}]"
        if isinstance(g, dict):
            entries = g.get("entries")
            label = g.get("label", f"g{i}")
            if not isinstance(label, str):
                raise ParseError(f"{where}.label", "expected a string")
        else:
            entries, label = g, f"g{i}"
        m = ExactMatrix(_matrix(entries, n, f"{where}.entries"))
        d = m.det()
        if d not in (1, -1):
            raise ParseError(where, f"determinant is {d}, lattice mode needs +-1")
        gens.append(m)
        labels.append(label)
    cone = cone_data = None
    if "cone" in data:
        cone, cone_data = _cone(data["cone"], n, "$.cone")
    lorentz = None
    if "lorentz" in data:
        section = data["lorentz"]
        if not isinstance(section, dict):
            raise ParseError("$.lorentz", "expected an object with gram and orientation")
        gram = _matrix(section.get("gram"), n, "$.lorentz.gram")
        h = _vector(section.get("orientation"), n, "$.lorentz.orientation")
        from .hyperbolic import LorentzLattice

        try:
            LorentzLattice(ExactMatrix(gram), tuple(h))
        except ValueError as exc:
            raise ParseError("$.lorentz", str(exc)) from exc
        lorentz = {"gram": [[str(x) for x in r] for r in gram], "orientation": [str(x) for x in h]}
    J = None
    if "complex_structure" in data:
        J = ExactMatrix(_matrix(data["complex_structure"], n, "$.complex_structure", _rat))
        if J @ J != ExactMatrix.identity(n).scaled(-1):
            raise ParseError("$.complex_structure", "J^2 = -I fails")
        for i, g in enumerate(gens):
            if J @ g != g @ J:
                raise ParseError(f"$.generators[{i}]", "does not commute with the complex structure")
    b = data.get("budgets", {})
    if not isinstance(b, dict):
        raise ParseError("$.budgets", "expected an object")
    unknown = set(b) - {"precision", "depth", "max_word_len"}
    if unknown:
        raise ParseError("$.budgets", f"unknown keys {sorted(unknown)}")
    budgets = Budgets(
        _int(b.get("precision", 128), "$.budgets.precision"),
        _int(b.get("depth", 8), "$.budgets.depth"),
        _int(b.get("max_word_len", 16), "$.budgets.max_word_len"),
    )
    if budgets.precision < 16 or budgets.depth < 0 or budgets.max_word_len < 0:
        raise ParseError("$.budgets", "precision must be >= 16, depth and max_word_len >= 0")
    return ProblemFile(
        n,
        gens,
        labels,
        cone,
        cone_data,
        lorentz,
        J,
        budgets,
        data,
        hashlib.sha256(text.encode("utf-8")).hexdigest(),
    )


def load_problem(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())
