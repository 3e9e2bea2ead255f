import json
from pathlib import Path

import pytest

from dertype.cli import CERT_FAIL, OK, OUT_OF_SCOPE, PARSE, SCHEMA, USAGE, main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", SAMPLES / "T2_16.alg")
    assert code == OK
    assert out.strip() == "derived_discrete (Table 2 entry 16, gentle)"


def test_classify_nodal(capsys):
    code, out, _ = run(capsys, "classify", SAMPLES / "T1_9.alg")
    assert code == OK and out.startswith("derived_tame") and "nodal" in out


def test_classify_wild_is_a_verdict(capsys):
    code, out, _ = run(capsys, "classify", SAMPLES / "cubic_loop.alg", "--json")
    data = json.loads(out)
    assert code == OK and data["verdict"] == "derived_wild"
    assert data["evidence"]["template"] == "thmA-ladder"


def test_out_of_scope_exit(capsys):
    code, out, _ = run(capsys, "classify", SAMPLES / "three_points.alg")
    assert code == OUT_OF_SCOPE


def test_tits_form(capsys):
    code, out, _ = run(capsys, "tits-form", "--box", "W5", "--dim", "2,2,2,4,4,2,2,2,1")
    assert code == OK and out.strip() == "-1"


def test_tits_form_bad_dim(capsys):
    code, _, err = run(capsys, "tits-form", "--box", "W5", "--dim", "1,2")
    assert code == USAGE and "vertices" in err


def test_sabotaged_complex(capsys):
    code, out, _ = run(capsys, "verify-complex", SAMPLES / "sabotaged.json")
    assert code == CERT_FAIL and "square_zero" in out


def test_valid_complex(capsys):
    code, out, _ = run(capsys, "verify-complex", SAMPLES / "cubic_complex.json")
    assert code == OK


def test_homology(capsys):
    code, out, _ = run(capsys, "homology", SAMPLES / "cubic_complex.json", "--json")
    assert code == OK and json.loads(out)["stable"]


def test_predicates(capsys):
    assert run(capsys, "check-gentle", SAMPLES / "T2_16.alg")[1].strip() == "true"
    code, out, _ = run(capsys, "check-sb", SAMPLES / "T1_9.alg")
    assert code == OK and out.startswith("false")
    assert run(capsys, "check-nodal", SAMPLES / "L4.alg")[1].startswith("true")


def test_witness(capsys):
    code, out, _ = run(capsys, "witness", "--case", "lemma3.2", "--module", SAMPLES / "module_2.json", "--json")
    data = json.loads(out)
    assert code == OK and data["check"]["ok"]


def test_specialize(capsys):
    code, out, _ = run(capsys, "specialize", SAMPLES / "family_L4.json", "--m", "2", "--lambda", "3", "--json")
    assert code == OK and json.loads(out)["check"]["ok"]
    code, _, _ = run(capsys, "specialize", SAMPLES / "family_L4.json", "--m", "1", "--lambda", "0")
    assert code == USAGE


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == OK and "T2.24" in out
    code, out, _ = run(capsys, "catalog", "show", "D1", "--json")
    assert code == OK and json.loads(out)["id"] == "D1"
    assert run(capsys, "catalog", "show", "T9.9")[0] == USAGE


def test_crosscheck(capsys):
    code, out, _ = run(capsys, "crosscheck")
    assert code == OK and out.strip() == "crosscheck ok"


# --- exit codes for bad input ------------------------------------------------------------

def test_usage_errors(capsys):
    assert run(capsys, "classify")[0] == USAGE
    assert run(capsys, "no-such-command")[0] == USAGE
    assert run(capsys, "classify", SAMPLES / "L1.alg", "-N", "1")[0] == USAGE
    assert run(capsys, "classify", SAMPLES / "L1.alg", "--field", "6")[0] == USAGE


def test_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("quiver { v 1; x:1->2 } rel { }")
    assert run(capsys, "classify", bad)[0] == PARSE
    assert run(capsys, "classify", tmp_path / "missing.alg")[0] == PARSE
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    assert run(capsys, "verify-complex", broken)[0] == PARSE


def test_truncation_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("DERTYPE_TRUNCATION", "6")
    data = json.loads(run(capsys, "classify", SAMPLES / "L4.alg", "--json")[1])
    assert data["truncation"] == 6


# --- JSON contract ---------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["classify", "T2_16.alg"], ["classify", "cubic_loop.alg"], ["check-gentle", "T1_9.alg"],
    ["tits-form", "--box", "W1", "--dim", "2,2,1", "--bound", "3"], ["catalog", "show", "T2.16"],
    ["homology", "cubic_complex.json"],
])
def test_json_round_trip_and_determinism(capsys, argv):
    argv = [str(SAMPLES / a) if a.endswith((".alg", ".json")) else a for a in argv] + ["--json", "--seed", "7"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    data = json.loads(first)
    assert data["schema"] == SCHEMA and data["command"] == argv[0]
    assert json.dumps(data, sort_keys=True) == first.strip()
