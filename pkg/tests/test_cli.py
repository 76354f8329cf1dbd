import json
import subprocess
import sys

import pytest

from markovgap.cli import main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path / "out")])


def test_sweep_and_byte_identical_reruns(tmp_path):
    args = ["sweep", "--grid", "1,1,2; 2,1,1", "--quantities", "entropy,markov_gap", "--samples", "3",
            "--seed", "5"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["master_seed"] == 5


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("grid = 1,1,1\nquantities = entropy\nsamples = 2\nseed = 3\n")
    assert main(["sweep", "--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "o")]) == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["master_seed"] == 4


def test_exit_codes(tmp_path, capsys):
    assert run(tmp_path, "sweep") == 1
    assert run(tmp_path, "sweep", "--grid", "1,1,1", "--quantities", "nope") == 1
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--samples", "zero"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    assert run(tmp_path, "sweep", "--grid", "6,6,1; 1,1,1", "--quantities", "markov_gap", "--samples", "2") == 2
    assert (tmp_path / "out" / "sweep.csv").exists()
    assert run(tmp_path, "ep-estimate", "--state", "ghz", "--restarts", "2") == 0
    assert run(tmp_path, "mp-check", "--d-sys", "4", "--d-env", "2", "--samples", "3", "--check") == 3


def test_subcommands_smoke(tmp_path, capsys):
    assert run(tmp_path, "phase-diagram", "--n-ab", "3", "--n-c-max", "3", "--samples", "3") == 0
    assert (tmp_path / "out" / "markov_gap_analytic.svg").exists()
    assert run(tmp_path, "threshold-scan", "--n-a", "1", "--n-b", "1", "--n-c-range", "1..6",
               "--samples", "20") == 0
    assert run(tmp_path, "concentration", "--point", "1,1,2", "--samples", "20", "--check") == 0
    assert run(tmp_path, "stab-sample", "--point", "2,2,2", "--samples", "5") == 0
    assert run(tmp_path, "sots-check", "--specs", "5", "--restarts", "2", "--check") == 0
    out = capsys.readouterr().out
    assert "crossing N_C" in out and "PASS" in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "markovgap", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
