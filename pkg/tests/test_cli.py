from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from walt import combinators as cb
from walt.cli import main
from walt.derivations import derivation_to_json

PROG = "len := rec[1;0](z[0;0]; comp[1;1;0;1](s1; pi[1;1;2]); comp[1;1;0;1](s1; pi[1;1;2]))\n"


@pytest.fixture(autouse=True)
def cache(tmp_path, monkeypatch):
    monkeypatch.setenv("WALT_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path / "cache"


@pytest.fixture
def prog(tmp_path):
    p = tmp_path / "prog.srn"
    p.write_text(PROG)
    return str(p)


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    out = json.loads(capsys.readouterr().out)
    assert out["schema"] == 1
    return code, out


def test_compile(capsys, prog):
    code, out = run_json(capsys, "compile", prog, "len")
    assert code == 0 and out["m"] >= 1 and out["clause"] == "rec"
    assert {"source", "term", "formula", "m", "derivation_ref"} <= out.keys()


def test_compile_missing_definition(capsys, prog):
    assert main(["compile", prog, "nope"]) == 2
    assert "nope" in capsys.readouterr().err


def test_compile_bad_arity(capsys, tmp_path):
    p = tmp_path / "bad.srn"
    p.write_text("f := comp[0;1;0;1](s0; pi[0;2;1])\n")
    assert main(["compile", str(p), "f"]) == 2
    assert "arity" in capsys.readouterr().err


def test_compile_then_typecheck(capsys, cache):
    code, out = run_json(capsys, "compile", "@corpus", "proj3")
    ref = out["derivation_ref"]
    assert code == 0 and ref
    assert main(["typecheck", str(cache / f"{ref}.json")]) == 0
    assert capsys.readouterr().out.startswith("OK")


def test_run_both_branch(capsys, prog):
    code, out = run_json(capsys, "run", prog, "b(z[0;0](), 2, 3)", "--both")
    assert code == 0 and out["oracle"] == 2 and out["compiled"]["value"] == 2 and out["equal"]
    main(["run", prog, "b(z[0;0](), 2, 3)"])
    assert "EQUAL" in capsys.readouterr().out


def test_run_numeral_compiled(capsys, prog):
    code, out = run_json(capsys, "run", prog, "9", "--compiled")
    assert code == 0 and out["compiled"]["value"] == 9 and "oracle" not in out


def test_run_oracle_only(capsys):
    code, out = run_json(capsys, "run", "@corpus", "append(5, 1)", "--oracle")
    assert code == 0 and out["oracle"] == 13 and "compiled" not in out


def test_run_budget_exit(capsys):
    assert main(["run", "@corpus", "deep(7)", "--max-steps", "5"]) == 4


def test_run_open_term(capsys, prog):
    assert main(["run", prog, "len(x)"]) == 2


def test_run_trace(capsys, tmp_path, prog):
    path = tmp_path / "trace.jsonl"
    assert main(["run", prog, "s0(1)", "--compiled", "--trace", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert json.loads(lines[0])["step"] == 0 and len(lines) > 1


def test_run_sweep_csv(capsys, prog):
    assert main(["run", prog, "len(x)", "--sweep", "x=1..6"]) == 0
    rows = capsys.readouterr().out.split()
    assert rows[0] == "length,steps" and len(rows) == 7
    steps = [int(r.split(",")[1]) for r in rows[1:]]
    assert steps == sorted(steps)


def test_typecheck_word_derivation(capsys, tmp_path):
    p = tmp_path / "w0.json"
    p.write_text(json.dumps(derivation_to_json(cb.word(0).derivation)))
    code, out = run_json(capsys, "typecheck", str(p))
    assert code == 0 and out["ok"]


def test_typecheck_tampered_bang(capsys, tmp_path):
    raw = derivation_to_json(cb.coerce(1).derivation)
    node = next(n for n in raw["nodes"] if n["rule"] == "!")
    node["params"]["pair"]["pair"]["phi"] = [["0", "a -o a"], ["q", "a -o a"]]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(raw))
    assert main(["typecheck", str(p)]) == 3
    assert "VIOLATION [!]" in capsys.readouterr().out


def test_list(capsys):
    code, out = run_json(capsys, "list")
    assert code == 0 and any(e["name"] == "sqcomp" for e in out["combinators"])


def test_sweep(capsys):
    code, out = run_json(capsys, "sweep", "--names", "quad", "lsb", "--bound", "4", "--jobs", "2")
    assert code == 0
    assert all(r["runs"] > 0 and not r["mismatches"] for r in out["results"])


def test_sweep_unknown(capsys):
    assert main(["sweep", "--names", "nothing"]) == 2


@pytest.mark.skipif(shutil.which("walt") is None, reason="entry point not installed")
def test_entry_point():
    r = subprocess.run(["walt", "run", "@corpus", "quad(3)", "--json"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["equal"]


def test_module_invocation():
    r = subprocess.run([sys.executable, "-m", "walt.cli", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "iterator" in r.stdout
