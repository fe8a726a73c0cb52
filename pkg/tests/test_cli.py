from __future__ import annotations

import json
from pathlib import Path

import pytest

from lpmr import corpus as C
from lpmr.cli import FAILED, OK, USAGE, CliConfig, main
from lpmr.loader import CORPUS_DIR
from lpmr.parser import pretty_file
from lpmr.skeleton import fill_skeleton, generate_skeleton, morphism_bodies

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS_FILES = sorted(str(p) for p in CORPUS_DIR.rglob("*.dk"))


def test_corpus_checks():
    assert main(["check", "-j", "4", *CORPUS_FILES]) == OK


def test_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.dk"
    path.write_text("")
    assert main(["check", str(path)]) == OK
    assert "OK" in capsys.readouterr().out


def test_misdeclared_rule_fails(capsys):
    assert main(["check", str(FIXTURES / "pl_bad_imp_i.dk")]) == FAILED
    assert "classifier mismatch" in capsys.readouterr().out


def test_json_diagnostics(capsys):
    main(["check", "--format", "json", str(FIXTURES / "pl_bad_imp_i.dk")])
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert records and all(r["severity"] == "error" and r["line"] > 0 for r in records)


def test_parse_error_is_located(tmp_path, capsys):
    path = tmp_path / "bad.dk"
    path.write_text("Prop : Type\nfoo")
    assert main(["check", str(path)]) == USAGE
    assert "bad.dk:2" in capsys.readouterr().out


def test_failed_assert(tmp_path):
    path = tmp_path / "assert.dk"
    path.write_text("#REQUIRE mulgr.\n#ASSERT times 1 1 == inv 1.\n#ASSERT times 1 (inv 1) == 1.\n")
    assert main(["check", str(path)]) == OK
    path.write_text("#REQUIRE mulgr.\nx : iota.\n#ASSERT times x 1 == 1.\n")
    assert main(["check", str(path)]) == FAILED


def test_usage_errors():
    assert main(["frobnicate"]) == USAGE
    assert main(["translate", "--source", "no_such_theory", "--target", "pl"]) == USAGE
    with pytest.raises(ValueError):
        CliConfig(mode="translate", kind="relation", arity=0)


def test_translate_prints_skeleton(capsys):
    assert main(["translate", "--source", "deduction", "--target", "computation"]) == OK
    out = capsys.readouterr().out
    assert out.count("_mu") >= 6 and "TODO" in out


def _filled(tmp_path, m, name="filled.dk") -> Path:
    sk = fill_skeleton(generate_skeleton(m.source, m.target), morphism_bodies(m))
    path = tmp_path / name
    path.write_text(pretty_file(sk.source_file()))
    return path


def test_transport_demo(tmp_path):
    filled = _filled(tmp_path, C.demo_morphism())
    out = tmp_path / "out.dk"
    argv = ["transport", "--source", "deduction", "--target", "computation", "--filled", str(filled), "--out", str(out)]
    assert main(argv) == OK
    text = out.read_text()
    assert "thm lemma_imp_mu" in text
    assert main(["check", str(out)]) == OK


def test_transport_empty_library(tmp_path):
    m = C.identities()["computation"]
    filled = _filled(tmp_path, m)
    out = tmp_path / "out.dk"
    argv = ["transport", "--source", "computation", "--target", "computation", "--filled", str(filled), "--out", str(out)]
    assert main(argv) == OK
    assert "thm" not in out.read_text()


def test_transport_rejects_bad_morphism(tmp_path):
    filled = _filled(tmp_path, C.mul_div_sabotaged())
    argv = ["transport", "--source", "mulgr", "--target", "divgr", "--filled", str(filled), "--out", str(tmp_path / "o.dk")]
    assert main(argv) == FAILED
    assert not (tmp_path / "o.dk").exists()


def test_transport_relation_mode_is_usage_error(tmp_path):
    filled = _filled(tmp_path, C.demo_morphism())
    argv = ["transport", "--mode", "relation", "--arity", "2", "--source", "deduction", "--target", "computation", "--filled", str(filled)]
    assert main(argv) == USAGE


def test_demo_walkthrough_script(tmp_path, capsys):
    import runpy

    script = runpy.run_path(str(Path(__file__).parents[1] / "scripts" / "demo_walkthrough.py"))
    script["main"](tmp_path)
    assert "OK" in capsys.readouterr().out
    assert main(["check", str(tmp_path / "transported.dk")]) == OK
