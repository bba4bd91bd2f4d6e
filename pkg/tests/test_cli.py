import csv
import json
import math
import shutil
import subprocess
import sys

import pytest

from sgreg.cli import main, write_atomic
from sgreg.config import RunConfig, default_config, default_config_text, load_config, loads_config
from sgreg.errors import ConfigurationError

SMALL = """
discretization: {n_modes: 8, n_quad: 32, n_x: 21}
output: {dir: %s}
"""


def write_cfg(tmp_path, body, name="run.yaml"):
    out = tmp_path / "out"
    path = tmp_path / name
    path.write_text(body.replace("%s", str(out)))
    return path, out


def test_round_trip_default():
    cfg = default_config()
    assert loads_config(cfg.dump()) == cfg
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_round_trip_custom(tmp_path):
    path, _ = write_cfg(tmp_path, SMALL + "regularization: {epsilon: 1e-3, beta: 1.0e-4}\n")
    cfg = load_config(path)
    assert cfg.regularization.epsilon == 1e-3
    assert cfg.regularization_obj().beta == 1e-4
    assert loads_config(cfg.dump()) == cfg


def test_empty_config_is_default():
    assert loads_config("") == default_config()


@pytest.mark.parametrize(
    "text,match",
    [
        ("problem: [1, 2", "line"),
        ("problem: {a: oops}", "problem.a"),
        ("nonsense: {}", "unknown section"),
        ("problem: {zeta: 1}", "unknown key"),
        ("problem: {recipe: nope}", "unknown recipe"),
        ("discretization: {n_modes: 32, n_quad: 64}", "n_quad"),
        ("regularization: {beta: 2.0}", "Lemma-1"),
        ("plan: {epsilons: [1e-3, 1e-2]}", "decreasing"),
        ("plan: {stability_seeds: [1]}", "two seeds"),
    ],
)
def test_malformed_config_messages(text, match):
    with pytest.raises(ConfigurationError, match=match):
        loads_config(text)


def test_missing_file_exit_2(tmp_path, capsys):
    assert main(["verify", "--config", str(tmp_path / "missing.yaml")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_beta_above_one_exit_2_names_hypothesis(tmp_path, capsys):
    path, _ = write_cfg(tmp_path, SMALL + "regularization: {beta: 2.0}\n")
    assert main(["solve", "--config", str(path)]) == 2
    assert "Lemma-1" in capsys.readouterr().err


def test_verify_shipped_config(tmp_path):
    assert main(["verify", "--out", str(tmp_path)]) == 0
    verdicts = json.loads((tmp_path / "verify.json").read_text())["verdicts"]
    assert all(verdicts.values())


def test_solve_decaying_mode(tmp_path):
    path, out = write_cfg(
        tmp_path, SMALL + "problem: {recipe: decaying_mode}\nregularization: {add_noise: false}\n"
    )
    assert main(["solve", "--config", str(path)]) == 0
    with open(out / "trajectory.csv") as fh:
        rows = list(csv.DictReader(fh))
    first = [(float(r["x"]), float(r["u_coeff"])) for r in rows if r["mode"] == "1"]
    assert len(first) == 21
    assert max(abs(u - math.exp(-x)) for x, u in first) <= 1e-10
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["converged"] and diag["max_error_vs_truth"] <= 1e-10


def test_solve_zero_recipe(tmp_path):
    path, out = write_cfg(tmp_path, SMALL + "problem: {recipe: zero}\nregularization: {add_noise: false}\n")
    assert main(["solve", "--config", str(path)]) == 0
    with open(out / "trajectory.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert all(float(r["u_coeff"]) == 0.0 and float(r["v_coeff"]) == 0.0 for r in rows)


def test_solve_nonconvergence_exit_3(tmp_path):
    body = """
problem: {gamma1: 1000.0, gamma2: 1000.0, delta: [[1.0, 1.0], [1.0, 1.0]]}
discretization: {n_modes: 8, n_quad: 32, n_x: 21, picard_max_iters: 20}
output: {dir: %s}
"""
    path, out = write_cfg(tmp_path, body)
    assert main(["solve", "--config", str(path)]) == 3
    assert json.loads((out / "diagnostics.json").read_text())["converged"] is False


def test_study_verdict_failure_exit_4(tmp_path):
    # m < 1 on a harmonic truth: the measured rate follows the noise term, not m(1 - x/a)
    body = SMALL + """
regularization: {m: 0.5}
plan: {epsilons: [1.0e-2, 1.0e-3, 1.0e-4], seeds: [1], probe_x: [0.0, 0.5]}
"""
    path, out = write_cfg(tmp_path, body)
    assert main(["study", "convergence", "--config", str(path)]) == 4
    report = json.loads((out / "study_convergence.json").read_text())
    assert report["verdicts"]["rate_ok(0)"] is False
    assert (out / "study_convergence_slopes.csv").exists()


def test_stability_inapplicable_exit_4(tmp_path):
    body = SMALL + """
problem: {a: 0.5}
regularization: {beta: 0.9, theorem_mode: false}
plan: {probe_x: [0.0, 0.25, 0.5]}
"""
    path, out = write_cfg(tmp_path, body)
    assert main(["study", "stability", "--config", str(path)]) == 4
    report = json.loads((out / "study_stability.json").read_text())
    assert report["details"]["status"] == "inapplicable"


def test_loglaw_single_epsilon_exit_2(tmp_path):
    path, _ = write_cfg(tmp_path, SMALL + "plan: {epsilons: [1.0e-2]}\n")
    assert main(["study", "loglaw", "--config", str(path)]) == 2


def test_stability_study_passes(tmp_path):
    path, out = write_cfg(tmp_path, SMALL)
    assert main(["study", "stability", "--config", str(path)]) == 0
    with open(out / "study_stability.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["epsilon", "seed", "x", "error", "beta", "iterations", "converged"]


def test_seed_override_changes_output(tmp_path):
    path, _ = write_cfg(tmp_path, SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["solve", "--config", str(path), "--out", str(a), "--seed", "1"]) == 0
    assert main(["solve", "--config", str(path), "--out", str(b), "--seed", "2"]) == 0
    assert (a / "trajectory.csv").read_text() != (b / "trajectory.csv").read_text()
    c = tmp_path / "c"
    assert main(["solve", "--config", str(path), "--out", str(c), "--seed", "1"]) == 0
    assert (a / "trajectory.csv").read_text() == (c / "trajectory.csv").read_text()


def test_write_atomic_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "f.txt"
    write_atomic(target, "hello\n")
    write_atomic(target, "again\n")
    assert target.read_text() == "again\n"
    assert [p.name for p in target.parent.iterdir()] == ["f.txt"]


def test_default_config_text_parses():
    assert "problem:" in default_config_text()


@pytest.mark.skipif(shutil.which("sgreg") is None, reason="console script not installed")
def test_console_script_help():
    res = subprocess.run(["sgreg", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify" in res.stdout


def test_module_invocation_bad_kind():
    res = subprocess.run([sys.executable, "-m", "sgreg.cli", "study", "nope"], capture_output=True, text=True)
    assert res.returncode == 2
