import json
import subprocess
import sys

import pytest

from hamext.cli import main, run
from hamext.config import ConfigError, parse_config

RANDOM = {"n": 1, "interval": {"a": 0, "b": 5},
          "coefficients": {"mode": "random", "rho": 0.5, "instances": 3},
          "lambdas": [[0, 0], [0, 1]], "window": {"a": 0, "b": 2}, "seed": 7}


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def invoke(tmp_path, doc, command, *extra):
    out = tmp_path / f"{command}.json"
    code = main(["--config", write(tmp_path, doc), "--command", command, "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_check_zero_weight_fails(tmp_path):
    doc = {"n": 1, "interval": {"a": 0, "b": 3}, "window": {"a": 0, "b": 2},
           "coefficients": {"mode": "constant", "W1": [[0]], "W2": [[0]]}}
    code, rep, _ = invoke(tmp_path, doc, "check")
    assert code == 1 and rep["verdict"] == "fail"
    for c in rep["paper_checks"]:
        assert set(c) == {"name", "paper_anchor", "pass", "detail"}


@pytest.mark.parametrize("command", ["check", "solve", "fundamental", "identities", "bvp",
                                     "relations", "extensions"])
def test_random_instances_pass(tmp_path, command):
    code, rep, _ = invoke(tmp_path, RANDOM, command)
    assert code == 0, rep["paper_checks"]
    assert rep["command"] == command and rep["instances"] == 3 and rep["verdict"] == "pass"


def test_identities_on_hundred_instances(tmp_path):
    doc = dict(RANDOM, coefficients={"mode": "random", "rho": 0.5, "instances": 100})
    code, rep, _ = invoke(tmp_path, doc, "identities")
    assert code == 0 and rep["instances"] == 100


def test_classify_free_system(tmp_path):
    csv_path = tmp_path / "scan.csv"
    doc = {"n": 1, "halfline": {"generator": "free", "expect": "limit point"},
           "output": {"csv": str(csv_path)}, "seed": 1}
    code, rep, _ = invoke(tmp_path, doc, "classify")
    assert code == 0
    assert rep["results"][0]["scan"]["verdict"] == "limit point"
    assert csv_path.read_text().startswith("lambda,horizon,singular_values,estimate")


def test_classify_toy(tmp_path):
    doc = {"n": 1, "halfline": {"generator": "decaying", "expect": "not limit point"}}
    code, rep, _ = invoke(tmp_path, doc, "classify")
    assert code == 0 and rep["results"][0]["criterion"]["verdict"] == "not limit point"


def test_determinism(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    for d in (a, b):
        assert invoke(d, RANDOM, "identities")[0] == 0
    assert (a / "identities.json").read_bytes() == (b / "identities.json").read_bytes()


def test_flags_override(tmp_path):
    single = dict(RANDOM, coefficients={"mode": "random", "instances": 1})
    code, rep, _ = invoke(tmp_path, single, "solve", "--seed", "11", "--lambda", "0,2",
                          "--lambda", "1,-1", "--tol-override", "residual=1e-9")
    assert code == 0 and rep["seed"] == 11
    lams = [r["lambda"] for r in rep["results"]]
    assert [0.0, 2.0] in lams and [1.0, -1.0] in lams


@pytest.mark.parametrize("doc", [
    {"n": 0, "interval": {"a": 0, "b": 3}},
    {"n": 1, "interval": {"a": 0}},
    {"n": 1, "interval": {"a": 0, "b": 3}, "tolerances": {"bogus": 1}},
    {"n": 1, "interval": {"a": 0, "b": 3}, "coefficients": {"mode": "random", "rho": 1.5}},
    {"n": 1, "interval": {"a": 0, "b": 3}, "coefficients": {"mode": "constant", "A": [[1, 0]]}},
])
def test_bad_config_exit_2(tmp_path, doc):
    code, rep, _ = invoke(tmp_path, doc, "check")
    assert code == 2 and rep is None


def test_bad_flags_exit_2(tmp_path):
    assert invoke(tmp_path, RANDOM, "check", "--tol-override", "angle")[0] == 2
    assert invoke(tmp_path, RANDOM, "check", "--lambda", "x,y")[0] == 2
    assert main(["--config", str(tmp_path / "missing.json"), "--command", "check"]) == 2


def test_internal_error_exit_3(tmp_path, monkeypatch):
    import hamext.cli as cli

    def boom(cfg):
        raise RuntimeError("unexpected")

    monkeypatch.setitem(cli.COMMANDS, "check", boom)
    assert invoke(tmp_path, RANDOM, "check")[0] == 3


def test_run_rejects_unknown_command():
    with pytest.raises(ConfigError):
        run("nope", parse_config(RANDOM))


def test_console_script(tmp_path):
    cfg = write(tmp_path, RANDOM)
    proc = subprocess.run([sys.executable, "-m", "hamext.cli", "--config", cfg, "--command", "check"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pass"


def test_double_reports_converse_counterexamples(tmp_path):
    doc = {"n": 1, "interval": {"a": 0, "b": 3}, "seed": 3,
           "coefficients": {"mode": "random", "instances": 1}, "qc": {"samples": 10}}
    code, rep, _ = invoke(tmp_path, doc, "double")
    # every check but the converse direction of the equivalence passes
    failed = [c["name"] for c in rep["paper_checks"] if not c["pass"]]
    assert code == 1 and failed == ["correspondence equivalence [0]"]
    counter = rep["results"][0]["counterexamples"]
    assert counter and all(c["dim_Qc"] != 2 and c["bold_self_adjoint"] for c in counter)
