import json
import subprocess
import sys
from pathlib import Path

import pytest

import chulog
from chulog.cli import main

CORPUS = Path(chulog.__file__).parent / "corpus"

# non-ultrametric distances on three points, stored as eq = 1 - d
LUK_STRUCTURE = {
    "model": "luk:grid5",
    "domains": {"A": ["x", "y", "z"]},
    "preds": {"eq": {"x,x": "1", "y,y": "1", "z,z": "1", "x,y": "1/2", "y,x": "1/2",
                     "y,z": "1/2", "z,y": "1/2", "x,z": "1/4", "z,x": "1/4"}},
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def structure(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(LUK_STRUCTURE))
    return str(p)


def test_parse_formula_file(tmp_path, capsys):
    f = tmp_path / "f.llf"
    f.write_text("# formulas\np * ~p\n\n!(p & q) -o ?r\n")
    code, out, _ = run(capsys, "parse", str(f))
    assert code == 0
    assert out.splitlines() == ["(tensor (atom p) (neg (atom p)))",
                                "(limp (bang (with (atom p) (atom q))) (whynot (atom r)))"]


def test_parse_error_location(tmp_path, capsys):
    f = tmp_path / "bad.llf"
    f.write_text("p\n\np * q + r\n")
    code, _, err = run(capsys, "parse", str(f))
    assert code == 1
    assert err.strip() == f"{f}:3:7: mixing '*' and '+' requires parentheses"
    code, _, err = run(capsys, "parse", "-e", "p * q + r")
    assert code == 1 and ":1:7:" in err


def test_parse_missing_file(capsys):
    code, _, err = run(capsys, "parse", "/nonexistent/x.llf")
    assert code == 2 and "cannot read" in err


def test_parse_theory_json(capsys):
    code, out, _ = run(capsys, "parse", str(CORPUS / "set-equality.llt"), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "chulog.parse/1"
    assert [i["axiom"] for i in doc["items"]] == ["refl", "sym", "trans"]


def test_laws_chu_special(capsys):
    code, out, _ = run(capsys, "laws", "--suite", "chu-special", "--model", "chu0:chain3")
    rows = [l for l in out.splitlines() if not l.startswith("#")]
    assert code == 0
    assert len(rows) == 7 and all(" HOLDS" in r for r in rows)


def test_laws_documented_failure_keeps_exit_zero(capsys):
    code, out, _ = run(capsys, "laws", "--suite", "chu-special", "--model", "luk:grid5")
    assert code == 0
    [row] = [l for l in out.splitlines() if l.startswith("bang-squaring")]
    assert "FAILED" in row and "P=3/4" in row


def test_laws_mix_units(capsys):
    code, out, _ = run(capsys, "laws", "--suite", "core", "--model", "chu1:chain2")
    assert code == 0
    assert any(l.startswith("mix-units") and "HOLDS" in l for l in out.splitlines())


def test_laws_json_is_deterministic(capsys):
    argv = ("laws", "--suite", "core", "--model", "luk:grid5", "--format", "json", "--seed", "4")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert json.loads(first)["schema"] == "chulog.laws/1"


def test_laws_bad_model(capsys):
    code, _, err = run(capsys, "laws", "--model", "chu0:nope")
    assert code == 2 and "nope" in err


def test_format_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("CHULOG_FORMAT", "json")
    code, out, _ = run(capsys, "models")
    assert code == 0 and json.loads(out)["schema"] == "chulog.models/1"
    monkeypatch.setenv("CHULOG_FORMAT", "yaml")
    code, _, err = run(capsys, "models")
    assert code == 2 and "CHULOG_FORMAT" in err


def test_translate_diff(tmp_path, capsys):
    llt = str(CORPUS / "group.llt")
    code, _, _ = run(capsys, "translate", llt, "--diff", str(CORPUS / "group.iseq"))
    assert code == 0
    golden = (CORPUS / "group.iseq").read_text().splitlines()
    dropped = next(l for l in golden if l.startswith("runit.proof"))
    bad = tmp_path / "g.iseq"
    bad.write_text("\n".join(l for l in golden if l != dropped) + "\nextra.proof: |- eq(e,e)\n")
    code, out, _ = run(capsys, "translate", llt, "--diff", str(bad))
    assert code == 1
    lines = out.splitlines()
    # "-" marks golden-only rows, "+" rows only the translator produced
    assert "+ runit.proof: |- eq(m(x,e),x)" in lines
    assert "- extra.proof: |- eq(e,e)" in lines


def test_translate_output_file_and_json(tmp_path, capsys):
    out_file = tmp_path / "o.iseq"
    code, out, _ = run(capsys, "translate", str(CORPUS / "set-equality.llt"), "-o", str(out_file))
    assert code == 0 and out == ""
    assert out_file.read_text().startswith("# standard interpretation of theory set-equality")
    code, out, _ = run(capsys, "translate", str(CORPUS / "set-equality.llt"), "--format", "json")
    doc = json.loads(out)
    assert doc["schema"] == "chulog.iseq/1"


def test_translate_undeclared_dual(tmp_path, capsys):
    f = tmp_path / "u.llt"
    f.write_text("theory u\nsort A\npred V(A)\naxiom a: [x:A] V(x) |- V(x)\n")
    code, _, err = run(capsys, "translate", str(f))
    assert code == 1 and "neither affirmative nor paired with a dual" in err


def test_check_reports_failing_axiom(structure, capsys):
    code, out, _ = run(capsys, "check", str(CORPUS / "strong-set.llt"), structure)
    assert code == 1
    lines = out.splitlines()
    assert lines[0].split() == ["refl", "HOLDS"]
    assert lines[2].startswith("trans") and "FAILED" in lines[2]
    assert "x=x, y=y, z=z" in lines[2]


def test_check_plain_transitivity_holds(structure, capsys):
    code, out, _ = run(capsys, "check", str(CORPUS / "set-equality.llt"), structure, "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]


def test_check_incomplete_table(tmp_path, capsys):
    obj = json.loads(json.dumps(LUK_STRUCTURE))
    del obj["preds"]["eq"]["x,z"]
    p = tmp_path / "s.json"
    p.write_text(json.dumps(obj))
    code, _, err = run(capsys, "check", str(CORPUS / "strong-set.llt"), str(p))
    assert code == 1 and "missing x,z" in err


def test_eval(structure, capsys):
    code, out, _ = run(capsys, "eval", "eq(a,b) * eq(b,c)", "--structure", structure,
                       "--let", "a=x", "--let", "b=y", "--let", "c=z")
    assert code == 0 and out.strip() == "0"
    code, out, _ = run(capsys, "eval", "eq(a,b) & eq(b,c)", "--structure", structure,
                       "--let", "a=x", "--let", "b=y", "--let", "c=z", "--format", "json")
    assert json.loads(out)["value"] == "1/2"


def test_search_law(capsys):
    code, out, _ = run(capsys, "search", "--law", "plus-excluded-middle", "--model", "chu0:chain2")
    assert code == 0 and "countermodel found" in out and "P() = N" in out
    code, out, _ = run(capsys, "search", "--law", "par-excluded-middle", "--model", "chu0:chain2")
    assert code == 0 and "none up to bound" in out


def test_search_sequent_json(capsys):
    code, out, _ = run(capsys, "search", "--sequent", "[x:D] p(x) |- /\\y:D. p(y)",
                       "--model", "chu0:chain2", "--format", "json")
    assert code == 0
    [res] = json.loads(out)["results"]
    assert res["found"] and res["schema"] == "chulog.search/1"


def test_search_theory_axiom(capsys):
    code, out, _ = run(capsys, "search", str(CORPUS / "set-equality.llt"), "--axiom", "sym",
                       "--model", "chu0:chain2", "--max-domain", "2")
    assert code == 0 and "countermodel found" in out


def test_search_usage_errors(capsys):
    assert run(capsys, "search", "--model", "chu0:chain2")[0] == 2
    assert run(capsys, "search", "--axiom", "sym")[0] == 2
    assert run(capsys, "search", "--law", "nope")[0] == 2
    assert run(capsys, "search", str(CORPUS / "set-equality.llt"), "--axiom", "nope")[0] == 2


def test_search_cap_exit(capsys):
    code, out, _ = run(capsys, "search", "--sequent", "[x:D] p(x) |- p(x) + q(x)",
                       "--model", "chu0:chain2", "--cap", "5")
    assert code == 1 and "resource cap" in out


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "laws", "--jobs", "0")[0] == 2


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "chulog.cli", "models"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "chu0:chain2" in proc.stdout
