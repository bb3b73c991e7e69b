import json
from pathlib import Path

import pytest

from liecone.cli import cmd_verify, run

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
ALL = sorted(PROBLEMS.glob("*.json"))
COMMANDS = ("eigenray", "entropy", "rank", "dyndeg")

EXPECTED = {
    ("fibonacci_block_orthant", "eigenray"): 0,
    ("rotation_orthant", "eigenray"): 2,
    ("non_unipotent", "eigenray"): 2,
    ("non_unipotent", "rank"): 2,
    ("heisenberg", "eigenray"): 0,
    ("sym2_surface", "rank"): 0,
    ("block_rank", "rank"): 0,
    ("power_relation", "rank"): 0,
    ("torus_product", "rank"): 0,
}


def produce(tmp_path, command, problem, *extra):
    out = tmp_path / f"{problem.stem}.{command}.json"
    code = run([command, str(problem), "--format", "machine", "-o", str(out), *extra])
    return code, out


def load(path):
    return json.loads(Path(path).read_text())


@pytest.mark.parametrize("key,code", sorted(EXPECTED.items()))
def test_exit_codes(tmp_path, key, code):
    stem, command = key
    got, _ = produce(tmp_path, command, PROBLEMS / f"{stem}.json")
    assert got == code


@pytest.mark.parametrize("problem", ALL, ids=lambda p: p.stem)
@pytest.mark.parametrize("command", COMMANDS)
def test_every_report_verifies(tmp_path, capsys, problem, command):
    code, out = produce(tmp_path, command, problem)
    if code == 3:
        # command not applicable to this file (e.g. eigenray without a cone)
        assert "parse error" in capsys.readouterr().err
        return
    report = load(out)
    assert report["exit_code"] == code
    assert cmd_verify(report).ok
    assert run(["verify", str(out)]) == 0


def test_fibonacci_block_eigenray_report(tmp_path):
    _, out = produce(tmp_path, "eigenray", PROBLEMS / "fibonacci_block_orthant.json")
    res = load(out)["result"]
    assert res["outcome"] == "eigenray"
    a, b, c, d = res["ray_enclosures"]
    assert c["hi"] == c["lo"] == "0" and d["hi"] == d["lo"] == "0"


def test_rotation_certificate_report(tmp_path):
    code, out = produce(tmp_path, "eigenray", PROBLEMS / "rotation_orthant.json")
    res = load(out)["result"]
    assert code == 2
    assert res["kind"] == "not_preserved" and res["datum"]["witness"] == ["-1", "0"]
    assert res["open_question"]


def test_budget_fault(tmp_path):
    code, out = produce(tmp_path, "eigenray", PROBLEMS / "fibonacci_block_orthant.json", "--max-field-degree", "1")
    assert code == 4
    report = load(out)
    assert report["result"]["outcome"] == "budget_fault"
    assert run(["verify", str(out)]) == 0


def test_tampered_relation_fails_verify(tmp_path):
    _, out = produce(tmp_path, "rank", PROBLEMS / "power_relation.json")
    report = load(out)
    rel = report["result"]["weak_tits"]["rank"]["relations"][0]
    rel["exponents"] = ["1", "-1"]
    out.write_text(json.dumps(report))
    assert not cmd_verify(report).ok
    assert run(["verify", str(out)]) == 1


def test_tampered_witness_fails_verify(tmp_path):
    _, out = produce(tmp_path, "eigenray", PROBLEMS / "rotation_orthant.json")
    report = load(out)
    report["result"]["datum"]["witness"] = ["1", "1"]
    out.write_text(json.dumps(report))
    assert run(["verify", str(out)]) == 1


def test_tampered_ray_fails_verify(tmp_path):
    _, out = produce(tmp_path, "eigenray", PROBLEMS / "fibonacci.json")
    report = load(out)
    report["result"]["ray"] = [{"q": "1"}, {"q": "1"}]
    out.write_text(json.dumps(report))
    assert run(["verify", str(out)]) == 1


def test_tampered_problem_hash_fails_verify(tmp_path):
    _, out = produce(tmp_path, "rank", PROBLEMS / "block_rank.json")
    report = load(out)
    report["problem"]["generators"][0]["entries"][0][0] = "3"
    out.write_text(json.dumps(report))
    assert run(["verify", str(out)]) == 1


@pytest.mark.parametrize(
    "payload,where",
    [
        ('{"lattice_rank": "2", "generators": [{"entries": [["1","x"],["0","1"]]}]}', "$.generators[0].entries[0][1]"),
        ('{"lattice_rank": "2", "generators": [{"entries": [["2","0"],["0","1"]]}]}', "$.generators[0]"),
        ('{"lattice_rank": "3", "generators": [{"entries": [["1","0"],["0","1"]]}]}', "$.generators[0]"),
        ('{"lattice_rank": "2", "generators": [', "line 1"),
    ],
)
def test_parse_errors_carry_location(tmp_path, capsys, payload, where):
    f = tmp_path / "bad.json"
    f.write_text(payload)
    assert run(["entropy", str(f)]) == 3
    assert where in capsys.readouterr().err


def test_missing_file_is_parse_error(tmp_path):
    assert run(["entropy", str(tmp_path / "nope.json")]) == 3
    assert run(["verify", str(tmp_path / "nope.json")]) == 3


def test_deterministic_output(tmp_path):
    for command in COMMANDS[1:]:
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        run([command, str(PROBLEMS / "fibonacci_block_orthant.json"), "--format", "machine", "-o", str(a)])
        run([command, str(PROBLEMS / "fibonacci_block_orthant.json"), "--format", "machine", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_human_output(capsys):
    assert run(["entropy", str(PROBLEMS / "fibonacci.json")]) == 0
    text = capsys.readouterr().out
    assert "0.4812118251" in text and "+-" in text


def test_flags_override_budgets(tmp_path):
    _, out = produce(tmp_path, "rank", PROBLEMS / "power_relation.json", "--precision", "96", "--depth", "4", "--max-word-len", "8")
    rep = load(out)["reproduction"]["budgets"]
    assert rep == {"depth": 4, "max_word_len": 8, "precision": 96}


def test_no_bare_floats_in_machine_output(tmp_path):
    _, out = produce(tmp_path, "entropy", PROBLEMS / "sym2_classes.json")

    def walk(x):
        if isinstance(x, float):
            raise AssertionError(f"bare float {x}")
        if isinstance(x, dict):
            if "mid" in x:
                assert "width" in x or "radius" in x
            for v in x.values():
                walk(v)
        if isinstance(x, list):
            for v in x:
                walk(v)

    walk(load(out))
