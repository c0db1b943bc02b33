import json

import pytest

from gwh_cli import main


def run(capsys, *argv):
    code = main(["--quiet", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_hurwitz_bruteforce(capsys):
    code, payload = run(capsys, "hurwitz", "--d", "2", "--profiles", "2;2", "--method", "bruteforce")
    assert code == 0
    assert payload["value"] == "1/2"
    assert payload["values"] == {"bruteforce": "1/2"}


def test_hurwitz_all_methods(capsys):
    code, payload = run(capsys, "hurwitz", "--profiles", "2,1;2,1;2,1;2,1", "--method", "all")
    assert code == 0
    assert payload["values"] == {"bruteforce": "4", "class-algebra": "4", "tropical": "4"}
    code, payload = run(capsys, "hurwitz", "--profiles", "2,1;2,1;2,1;2,1", "--disconnected")
    assert payload["value"] == "9/2"


def test_hurwitz_elliptic_target(capsys):
    code, payload = run(capsys, "hurwitz", "--d", "2", "--h", "1", "--method", "all")
    assert code == 0
    assert payload["value"] == "3/2"


def test_completed_cycle(capsys):
    code, payload = run(capsys, "coeffs", "--k", "1")
    assert code == 0
    assert payload == {"completed_cycle": {"2": "1"}}
    _, payload = run(capsys, "coeffs", "--k", "2")
    assert payload == {"completed_cycle": {"3": "1", "1,1": "1", "1": "1/12"}}


def test_descendant_example(capsys):
    code, payload = run(capsys, "descendant", "--mu", "1,1,1,1", "--nu", "1,1,1,1", "--k", "3,3",
                        "--disconnected", "--method", "all")
    assert code == 0
    assert payload["value"] == "457/2304"
    assert set(payload["values"]) == {"tropical", "fock", "substitution"}
    assert len(payload["covers"]) == 6
    assert payload["genus"] == 0


def test_descendant_cycle_target(capsys):
    code, payload = run(capsys, "descendant", "--target", "cycle", "--d", "2", "--k", "2",
                        "--disconnected", "--method", "all")
    assert code == 0
    assert payload["value"] == "7/6"


def test_connected_descendants_are_tropical_only(capsys):
    code, payload = run(capsys, "descendant", "--mu", "2", "--nu", "2", "--k", "2", "--method", "fock")
    assert code == 1
    assert payload["error"]["relation"] == "usage"
    code, payload = run(capsys, "descendant", "--mu", "2", "--nu", "2", "--k", "2")
    assert code == 0
    assert payload["value"] == "7/24"


@pytest.mark.parametrize("argv, relation", [
    (["hurwitz", "--profiles", "2;2;2"], "riemann-hurwitz"),
    (["hurwitz", "--profiles", "2;1"], "degree"),
    (["descendant", "--mu", "2", "--nu", "2", "--k", "1"], "dimension"),
    (["descendant", "--mu", "2", "--nu", "1", "--k", "0"], "degree"),
    (["descendant", "--target", "cycle", "--k", "0"], "degree"),
    (["hurwitz", "--d", "x"], "usage"),
    (["bogus"], "usage"),
    (["coeffs", "--k", "-1"], "usage"),
    (["fock", "--expr", "bra 2 a(0) ket 2"], "expression"),
])
def test_errors_exit_one(capsys, argv, relation):
    code, payload = run(capsys, *argv)
    assert code == 1
    assert payload["error"]["relation"] == relation


def test_covers_with_dot(capsys):
    code, payload = run(capsys, "covers", "--mu", "2", "--nu", "1,1", "--k", "1", "--dot")
    assert code == 0
    assert payload["value"] == "1/2"
    assert len(payload["covers"]) == len(payload["dot"]) == 1
    assert payload["dot"][0].startswith("digraph cover0 {")
    code, payload = run(capsys, "covers", "--kind", "caterpillar", "--profiles", "2;2", "--disconnected")
    assert payload["value"] == "1/2"
    code, payload = run(capsys, "covers", "--kind", "cycle", "--d", "2", "--disconnected")
    assert payload["value"] == "2"


def test_fock_expression(capsys):
    code, payload = run(capsys, "fock", "--expr", "bra 2 a(-2) a(1)^2 ket 1,1", "--dot")
    assert code == 0
    assert payload["value"] == {"0": "4"}
    assert len(payload["dot"]) == 2


def test_pretty_output(capsys):
    assert main(["--quiet", "--pretty", "coeffs", "--k", "0"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("{\n  ")
    assert json.loads(out) == {"completed_cycle": {"1": "1"}}


def test_verify_single_suite(capsys, tmp_path):
    report = tmp_path / "verify.json"
    code, payload = run(capsys, "verify", "--suite", "completion", "--json", "--report", str(report))
    assert code == 0
    assert payload["passed"] is True
    assert payload["table"][0]["suite"] == "completion"
    assert payload["table"][0]["failed"] == 0
    detail = json.loads(report.read_text())
    assert len(detail["checks"]) == payload["table"][0]["instances"]
    assert detail["digest"] == payload["digest"]


def test_verify_prints_table(capsys):
    assert main(["--quiet", "verify", "--suite", "completion"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["suite", "instances", "passed", "failed", "seconds"]
    assert "completion" in out and "PASS" in out
