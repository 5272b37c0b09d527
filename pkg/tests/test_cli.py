import json
import subprocess
import sys

import pytest

from spinscape.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_profile_json(capsys):
    code, out, _ = run(["profile", "--mixture", "2:1.0"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["class"] == "Critical"
    assert d["G"] == 0.0
    assert d["mixture"] == "2:1.0"


def test_profile_csv(capsys):
    code, out, _ = run(["profile", "--mixture", "3:1.0", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "key,value"
    assert "class,PureLike" in out


def test_complexity_csv(capsys):
    code, out, _ = run(["complexity", "--mixture", "2:0.9,10:0.1", "--k", "total", "--u", "-3", "0", "7"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "u,theta,regime" and len(lines) == 8


def test_complexity_gamma(capsys):
    code, out, _ = run(
        ["complexity", "--mixture", "2:0.9,10:0.1", "--gamma", "0.3", "--u", "-1", "1", "3", "--format", "json"],
        capsys,
    )
    assert code == 0
    assert json.loads(out)["index"] == 0.3


def test_ek_and_parisi(capsys):
    code, out, _ = run(["ek", "--mixture", "2:0.9,10:0.1", "--k", "3"], capsys)
    d = json.loads(out)
    assert code == 0 and d["E_k"] == pytest.approx(d["e_inf_plus"])
    code, out, _ = run(["parisi", "--mixture", "2:0.9,10:0.1"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "Less"


def test_duality(capsys):
    code, out, _ = run(["duality", "--mixture", "3:1.0", "--u", "-3", "-1.7", "20"], capsys)
    assert code == 0
    assert json.loads(out)["max_residual"] < 1e-6
    code, out, _ = run(["duality", "--mixture", "3:1.0", "--u", "-3", "-1.7", "20", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "u,theta0,dual,b,residual"


def test_euler_modes(capsys, tmp_path):
    path = tmp_path / "e.csv"
    args = ["euler", "--mixture", "2:0.9,10:0.1", "--n", "21", "--u", "-1.5", "1.5", "7"]
    assert main(args + ["--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "u,sign,log_abs,mode" and len(lines) == 8
    code, out, _ = run(args + ["--mode", "asymptotic", "--format", "json"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["rows"] and d["descriptors"]


def test_goe_validate_small(capsys):
    code, out, _ = run(["goe-validate", "--samples", "2000", "--seed", "4"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["mixture"] == "2:0.5,3:0.3,4:0.2"
    assert len(d["rows"]) == 6


def test_deterministic_output(capsys):
    args = ["goe-validate", "--samples", "1000", "--seed", "9", "--format", "csv"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        ["profile", "--mixture", "2:0.5,2:0.5"],
        ["profile", "--mixture", "2:0.4"],
        ["profile"],
        ["complexity", "--mixture", "3:1.0"],
        ["complexity", "--mixture", "3:1.0", "--u", "0", "-1", "5"],
        ["complexity", "--mixture", "3:1.0", "--u", "-1", "0", "5", "--k", "1", "--gamma", "0.2"],
        ["euler", "--mixture", "2:0.9,10:0.1", "--u", "-1", "0", "5"],
        ["goe-validate", "--n", "3"],
        ["profile", "--mixture", "3:1.0", "--bogus"],
        ["nonsense"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err


def test_library_error_exit(capsys):
    code, _, err = run(["euler", "--mixture", "3:1.0", "--n", "5", "--u", "-1", "0", "3"], capsys)
    assert code == 1
    assert err.startswith("PureMixture")


def test_console_entry():
    res = subprocess.run(
        [sys.executable, "-m", "spinscape.cli", "profile", "--mixture", "3:1.0"], capture_output=True, text=True
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["class"] == "PureLike"
