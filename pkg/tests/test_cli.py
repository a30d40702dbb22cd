import json
import subprocess
import sys

import numpy as np
import pytest

from degen_kpp import __version__, cli
from degen_kpp.outputs import SCHEMA


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def error(err):
    doc = json.loads(err)
    assert doc["status"] == "error" and doc["reason"]
    return doc


def test_lambda_json(capsys):
    code, out, _ = run(capsys, "lambda", "--c", "2.1")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == SCHEMA and doc["version"] == __version__
    assert doc["lambda_minus"] == pytest.approx(0.729844, abs=1e-6)
    assert doc["plus_bell_quarter"] == pytest.approx(0.117339, abs=1e-5)
    assert doc["config"]["c"] == 2.1


def test_no_waves_below_two(capsys):
    code, out, err = run(capsys, "lambda", "--c", "1.5")
    assert code == cli.EXIT_USAGE and out == ""
    doc = error(err)
    assert doc["reason"] == "no waves for c<2" and doc["code"] == "no_waves"


@pytest.mark.parametrize("argv,code_name", [(["lambda"], "missing_c"),
                                            (["lambda", "--c", "-1"], "domain"),
                                            (["lambda", "--c", "2.1", "--format", "svg"], "format"),
                                            (["wave", "--c", "2.1"], "missing_alpha"),
                                            (["lambda", "--c", "2.1", "--samples", "3"], "config"),
                                            (["classify", "--c", "2.1", "--tol-bisect", "1e-17"],
                                             "config")])
def test_usage_errors(capsys, argv, code_name):
    code, _, err = run(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert error(err)["code"] == code_name


def test_argparse_rejects_bad_choice(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


def test_config_file_and_precedence(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nc = 2.5\nformat = csv  # table\ntol-ode = 1e-11\n")
    code, out, _ = run(capsys, "lambda", "--config", str(cfg))
    assert code == 0 and out.startswith(f"# schema={SCHEMA}")
    conf = json.loads(out.splitlines()[1][len("# config="):])
    assert conf["c"] == 2.5 and conf["tol_ode"] == 1e-11
    # flags override the file
    code, out, _ = run(capsys, "lambda", "--config", str(cfg), "--c", "3", "--format", "json")
    assert json.loads(out)["c"] == 3.0
    # environment variable supplies the file
    monkeypatch.setenv("DEGEN_KPP_CONFIG", str(cfg))
    code, out, _ = run(capsys, "lambda")
    assert code == 0 and "lambda_minus" in out


@pytest.mark.parametrize("text", ["c 2.1\n", "speed = 2\n", "c = fast\n", "format = xml\n"])
def test_bad_config(capsys, tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, err = run(capsys, "lambda", "--config", str(cfg))
    assert code == cli.EXIT_USAGE and error(err)["code"] == "config"


def test_missing_config(capsys, tmp_path):
    code, _, err = run(capsys, "lambda", "--config", str(tmp_path / "none.cfg"))
    assert code == cli.EXIT_USAGE and error(err)["code"] == "config"


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--c", "2.1", "--alpha", "0.5")
    doc = json.loads(out)
    assert code == 0 and doc["class"] == "SaturatedC" and doc["chain_failures"] == []
    code, out, _ = run(capsys, "classify", "--c", "2.1", "--format", "csv")
    assert code == 0 and "alpha_max," in out


def test_wave_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "wave", "--c", "2.1", "--special", "small")
    doc = json.loads(out)
    assert code == 0 and doc["class"] == "NonSaturated" and doc["z_star"] == "-inf"
    assert doc["tw_residual"] < 1e-4 and len(doc["z"]) == len(doc["u"])
    csv_path = tmp_path / "wave.csv"
    code, _, _ = run(capsys, "wave", "--c", "2.1", "--alpha", "0.5", "--format", "csv",
                     "--out", str(csv_path))
    assert code == 0
    report = json.loads(csv_path.with_suffix(".json").read_text())
    assert report["class"] == "SaturatedC" and report["z_star"] < 0
    data = np.loadtxt(csv_path, delimiter=",", comments="#", skiprows=3)
    assert data.shape[1] == 2 and np.all(np.diff(data[:, 0]) > 0)
    svg = tmp_path / "wave.svg"
    assert run(capsys, "wave", "--c", "2.1", "--special", "max", "--format", "svg",
               "--out", str(svg))[0] == 0
    assert svg.read_text().startswith("<svg")


def test_wave_outside_family(capsys):
    code, _, err = run(capsys, "wave", "--c", "2.1", "--alpha", "0.001")
    doc = error(err)
    assert code == cli.EXIT_USAGE and doc["code"] == "no_wave"
    assert doc["details"]["class"] == "BelowSmall"


def test_deterministic_csv(capsys, tmp_path):
    outs = []
    p = tmp_path / "w.csv"
    for _ in range(2):
        run(capsys, "wave", "--c", "2.1", "--special", "large", "--format", "csv", "--out", str(p))
        outs.append(p.read_text())
    assert outs[0] == outs[1]
    first = outs[0].splitlines()[3].split(",")
    assert all(len(v.lstrip("-").replace(".", "").split("e")[0]) >= 15 for v in first if v != "0")


def test_figure(capsys, tmp_path):
    code, out, _ = run(capsys, "figure", "--c", "2.1", "--out", str(tmp_path))
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "ok"
    names = {p.name for p in tmp_path.iterdir()}
    for kind in ("waves", "phase", "phase-log"):
        assert {f"{kind}_c2.1.svg", f"{kind}_c2.1.csv"} <= names
    check = doc["waves_check"]
    assert check["ordering_ok"] and not check["off_zero_crossings"]


def test_figure_custom_alphas(capsys, tmp_path):
    code, out, _ = run(capsys, "figure", "--c", "2.1", "--which", "waves", "--alpha", "0.5",
                       "1.0", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["config"]["alphas"] == [0.5, 1.0]
    code, _, err = run(capsys, "figure", "--c", "2.1", "--alpha", "5", "--out", str(tmp_path))
    assert code == cli.EXIT_USAGE and error(err)["code"] == "no_wave"


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "recursions")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "ok" and doc["failed"] == []
    code, out, _ = run(capsys, "verify", "--suite", "focusing")
    assert code == 0
    code, _, err = run(capsys, "verify", "--suite", "focusing", "--format", "csv")
    assert code == cli.EXIT_USAGE and error(err)["code"] == "format"


def test_entry_point_and_module():
    for argv in (["degen-kpp"], [sys.executable, "-m", "degen_kpp"]):
        proc = subprocess.run(argv + ["--version"], capture_output=True, text=True, check=True)
        assert __version__ in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "degen_kpp", "lambda", "--c", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and json.loads(proc.stderr)["code"] == "no_waves"
