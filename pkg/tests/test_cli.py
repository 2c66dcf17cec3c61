import json
import subprocess
import sys

import pytest

from soc import cli, schema
from soc.fixtures import fixture, fixture_names

VALID = {
    "spectrum": "block",
    "decompose": "nogo-b",
    "analytic": "triangle",
    "naive": "trivial",
    "network": "two-cycle",
    "basechange": "block",
    "validate": "trivial",
}
# well formed inputs that fail validation
INVALID = ("spectrum", "decompose", "analytic", "naive", "basechange", "validate")


def write(tmp_path, name, doc):
    p = tmp_path / f"{name}.json"
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def run_json(tmp_path, *args):
    out = tmp_path / "report.json"
    code = cli.main([*args, "--format", "json", "--output", str(out)])
    report = json.loads(out.read_text())
    schema.check_report(report)
    return code, report


def broken_algebra():
    # the unit acts as 2I
    doc = fixture("trivial")
    doc["structure"]["id"]["entries"] = [[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [2.0, 0.0]]
    return doc


@pytest.mark.parametrize("command,name", sorted(VALID.items()))
def test_valid_inputs_exit_zero(tmp_path, command, name):
    path = write(tmp_path, name, fixture(name))
    code, report = run_json(tmp_path, command, "--input", path)
    assert code == 0 and report["ok"], report


@pytest.mark.parametrize("command", INVALID)
def test_invalid_inputs_exit_one(tmp_path, command):
    path = write(tmp_path, "broken", broken_algebra())
    code, report = run_json(tmp_path, command, "--input", path)
    assert code == 1 and not report["ok"]


@pytest.mark.parametrize("command,name", [("spectrum", "broken-operad"), ("network", "block"),
                                          ("analytic", "trivial-operad")])
def test_wrong_input_kind_exits_two(tmp_path, command, name):
    doc = {"colors": ["*"], "spaces": []} if name == "trivial-operad" else fixture(name)
    code, _ = run_json(tmp_path, command, "--input", write(tmp_path, name, doc))
    assert code == 2


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_malformed_inputs_exit_two(tmp_path, command):
    for doc in ('{"colors": [\n', '[1, 2]', '{"nothing": 1}', '{"vertices": "x", "edges": []}'):
        path = write(tmp_path, "bad", doc)
        code, report = run_json(tmp_path, command, "--input", path)
        assert code == 2 and report["result"]["error"]["kind"] == "parse"


def test_parse_error_reports_position(tmp_path, capsys):
    path = write(tmp_path, "bad", '{"vertices": ["a"],\n  "edges": [,]}')
    assert cli.main(["validate", "--input", path]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err
    _, report = run_json(tmp_path, "validate", "--input", path)
    assert report["result"]["error"]["line"] == 2


def test_missing_file_and_unknown_fixture():
    assert cli.main(["spectrum", "--input", "/nonexistent/in.json"]) == 2
    assert cli.main(["spectrum", "--fixture", "no-such"]) == 2
    assert cli.main(["spectrum"]) == 2
    assert cli.main(["explode"]) == 2


def test_validate_reports_violations(tmp_path):
    code, report = run_json(tmp_path, "validate", "--fixture", "broken-operad")
    assert code == 1 and report["result"]["violations"]
    code, _ = run_json(tmp_path, "validate", "--input", write(tmp_path, "alg", broken_algebra()))
    assert code == 1


def test_nogo_demo(capsys):
    assert cli.main(["nogo-demo"]) == 0
    out = capsys.readouterr().out
    assert "4" in out and "6" in out


def test_network_analytic(tmp_path):
    code, report = run_json(tmp_path, "network", "--fixture", "two-cycle", "--analytic")
    assert code == 0
    inter = report["result"]["analytic"]["interaction"]["values"]
    assert inter == [[6.0, 0.0]]


def test_naive_without_distinguished_is_empty(tmp_path):
    code, report = run_json(tmp_path, "naive", "--fixture", "two-cycle")
    assert code == 0 and report["result"] == {}


def test_basechange_functor_selection(tmp_path):
    code, report = run_json(tmp_path, "basechange", "--fixture", "trivial", "--functor", "rebasing",
                            "--coeffs", "1,0,2i")
    assert code == 0
    assert {r["functor"] for r in report["result"]["checks"]} == {"rebasing"}
    assert cli.main(["basechange", "--fixture", "trivial", "--functor", "nope"]) == 1


def test_every_fixture_runs_every_command(tmp_path):
    for name in fixture_names():
        for command in cli.COMMANDS:
            code, _ = run_json(tmp_path, command, "--fixture", name)
            assert code in (0, 1, 2)


def test_json_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        cli.main(["basechange", "--fixture", "block", "--format", "json", "--output", str(out), "--seed", "7"])
    assert a.read_bytes() == b.read_bytes()


def test_tolerance_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SOC_TOLERANCE", "1e-6")
    _, report = run_json(tmp_path, "spectrum", "--fixture", "block")
    assert report["config"]["tolerance"] == 1e-6
    _, report = run_json(tmp_path, "spectrum", "--fixture", "block", "--tolerance", "1e-4")
    assert report["config"]["tolerance"] == 1e-4
    monkeypatch.setenv("SOC_TOLERANCE", "-1")
    assert cli.main(["spectrum", "--fixture", "block"]) == 2
    monkeypatch.setenv("SOC_TOLERANCE", "abc")
    assert cli.main(["spectrum", "--fixture", "block"]) == 2


def test_bad_flag_values():
    assert cli.main(["analytic", "--fixture", "block", "--max-loop-length", "0"]) == 2
    assert cli.main(["analytic", "--fixture", "block", "--seed", "-3"]) == 2
    assert cli.main(["spectrum", "--fixture", "block", "--format", "xml"]) == 2


def test_text_mode_writes_json_to_output(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["decompose", "--fixture", "nogo-b", "--output", str(out)]) == 0
    assert capsys.readouterr().out.strip()
    schema.check_report(json.loads(out.read_text()))


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "soc", "nogo-demo", "--format", "json"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    schema.check_report(json.loads(r.stdout))
