import json
import subprocess
import sys

import pytest

from frankl_forge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "chain": "-\n1\n",
        "union": "1\n2\n1,2\n",
        "open": "1\n2\n",
        "single": "-\n",
        "broken": '{"n": 2, "sets": [[1], [7]]}',
        "json": '{"n": 2, "sets": [[], [1], [2], [1, 2]]}',
    }.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def test_check_pass(capsys, files):
    code, out, _ = run(capsys, "check", files["chain"], "--k", "5", "--m", "2")
    assert code == 0
    assert "best_value: 5/7" in out and "input_hash:" in out


def test_check_json(capsys, files):
    code, out, _ = run(capsys, "check", files["json"], "--k", "5,5", "--m", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["result"]["best_value"] == "5/7" and data["result"]["best_element"] == 1
    assert data["config"]["subcommand"] == "check" and len(data["input_hash"]) == 64


def test_check_boltzmann(capsys, files):
    code, out, _ = run(capsys, "check", files["chain"], "--t", "2/5")
    assert code == 0 and "5/7" in out


def test_check_union_closed(capsys, files):
    code, out, err = run(capsys, "check", files["union"], "--format", "json")
    data = json.loads(out)
    assert code == 0 and "complement" in err
    assert data["result"]["form"] == "union" and data["result"]["dual_consistent"] is True


def test_check_input_errors(capsys, files):
    assert run(capsys, "check", files["open"])[0] == 2
    assert run(capsys, "check", files["broken"])[0] == 2
    assert run(capsys, "check", files["single"])[0] == 2
    assert run(capsys, "check", files["chain"], "--k", "x")[0] == 2
    assert run(capsys, "check", files["chain"], "--k", "5,5")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_check_failure_exit(capsys, tmp_path):
    # the three-set chain with heavy weight on the top set has every abundance below 1/2
    p = tmp_path / "f.txt"
    p.write_text("-\n1\n1,2\n")
    code, out, _ = run(capsys, "check", str(p), "--k", "1", "--m", "9")
    assert code == 1 and "passed: False" in out


def test_exhaustive(capsys):
    code, out, _ = run(capsys, "exhaustive", "--n", "3", "--k", "5", "--m", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["result"]["counterexamples"] == 0 and data["result"]["families"] > 0


def test_exhaustive_jobs_identical(capsys):
    a = run(capsys, "exhaustive", "--n", "3", "--format", "json")[1]
    b = run(capsys, "exhaustive", "--n", "3", "--format", "json", "--jobs", "2")[1]
    ra, rb = json.loads(a), json.loads(b)
    assert ra["result"] == rb["result"]


def test_exhaustive_cap(capsys):
    assert run(capsys, "exhaustive", "--n", "5")[0] == 2


def test_entropy_verify(capsys, files):
    code, out, _ = run(capsys, "entropy-verify", files["chain"], "--k", "2", "--m", "1", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["result"]["max_residual"] < 1e-9
    assert data["result"]["measures"]["1"] == [["2/3", "1/1"]]


def test_entropy_verify_random_and_budget(capsys):
    assert run(capsys, "entropy-verify", "--n", "2", "--k", "3", "--m", "2", "--seed", "4")[0] == 0
    code, _, err = run(capsys, "entropy-verify", "--n", "4", "--density", "1", "--k", "5", "--budget", "100")
    assert code == 3 and "1296" in err  # (5 + 1)^4 over the full power set


def test_threshold_and_scan(capsys):
    code, out, _ = run(capsys, "threshold", "--k", "5", "--m", "2", "--grid", "128", "--tol", "0.01", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["result"]["phi_star"] == 0.5
    code, out, _ = run(capsys, "scan", "--k", "5..6", "--grid", "128", "--tol", "0.01", "--format", "csv")
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert code == 0 and lines[0].startswith("k,m,phi_star") and len(lines) == 5


def test_sample(capsys):
    code, out, _ = run(capsys, "sample", "--n", "3", "--count", "4", "--k", "5", "--m", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["rows"]) == 4 and all(r["passed"] for r in data["rows"] if "passed" in r)
    again = run(capsys, "sample", "--n", "3", "--count", "4", "--k", "5", "--m", "2", "--format", "json")[1]
    assert again == out


def test_reports_reproducible(capsys, files):
    a = run(capsys, "check", files["json"], "--k", "5", "--m", "2")[1]
    b = run(capsys, "check", files["json"], "--k", "5", "--m", "2")[1]
    assert a == b


def test_module_entry_point(files):
    p = subprocess.run([sys.executable, "-m", "frankl_forge", "check", files["chain"]], capture_output=True, text=True)
    assert p.returncode == 0 and "best_value: 1/2" in p.stdout
