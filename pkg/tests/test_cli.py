import csv
import json
from pathlib import Path

import pytest

from cazackit import __version__, cli


def run(argv):
    return cli.main(argv)


def test_version(capsys):
    assert run(["version"]) == 0
    assert capsys.readouterr().out.strip() == f"cazackit {__version__}"


def test_usage_errors_exit_1(capsys):
    assert run([]) == 1
    assert run(["frobnicate"]) == 1
    assert run(["gen"]) == 1                       # missing --out
    assert run(["gen", "--out", "x"]) == 1         # missing --family
    assert run(["analyze", "--out", "x"]) == 1     # missing --input


def test_validation_errors_exit_2(tmp_path, capsys):
    out = str(tmp_path / "x")
    assert run(["gen", "--family", "bjorck", "--q", "8", "--out", out]) == 2
    assert run(["gen", "--family", "bjorck", "--q", "7", "--out", out,
                "--config", str(tmp_path / "missing.cfg")]) == 2


def test_gen_prime_sequence(tmp_path):
    out = str(tmp_path / "b7")
    assert run(["gen", "--family", "bjorck", "--q", "7", "--out", out]) == 0
    rows = list(csv.DictReader(open(out + ".csv")))
    assert len(rows) == 7
    manifest = json.load(open(out + ".manifest.json"))
    assert manifest["version"] == __version__
    assert manifest["command"] == "gen"


def test_gen_extended_set(tmp_path):
    out = str(tmp_path / "g")
    assert run(["gen", "--family", "bjorck", "--extend", "goldbach",
                "--n", "120", "--split", "113,7", "--count", "10",
                "--out", out]) == 0
    meta = json.load(open(out + ".meta.json"))
    assert meta["n"] == 120
    assert meta["columns"] == 10


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("[gen]\nfamily = bjorck\nq = 7\n")
    out = str(tmp_path / "cfgd")
    assert run(["gen", "--config", str(cfg), "--q", "11",
                "--out", out]) == 0  # flag overrides file value
    rows = list(csv.DictReader(open(out + ".csv")))
    assert len(rows) == 11
    manifest = json.load(open(out + ".manifest.json"))
    assert int(manifest["config"]["q"]) == 11


def test_analyze_rms(tmp_path):
    gout = str(tmp_path / "g")
    run(["gen", "--family", "bjorck", "--extend", "goldbach", "--n", "120",
         "--split", "113,7", "--out", gout])
    aout = str(tmp_path / "rms")
    assert run(["analyze", "--input", gout + ".csv", "--what", "rms",
                "--split", "113,7", "--out", aout]) == 0
    rows = {r["case"]: r for r in csv.DictReader(open(aout + ".csv"))}
    assert float(rows["PERIODIC_CASE1"]["rel_err"]) < 0.15


def test_ambiguity_command(tmp_path, capsys):
    out = str(tmp_path / "amb")
    assert run(["ambiguity", "--rx-shift", "2", "--rx-doppler=-28e3",
                "--out", out]) == 0
    printed = capsys.readouterr().out
    assert "freq=2000" in printed  # one-SCS misidentification peak
    assert len(list(csv.DictReader(open(out + ".csv")))) > 0


def test_simulate_csv_schema_and_determinism(tmp_path, monkeypatch):
    args = ["simulate", "--scenario", "tn", "--trials", "40",
            "--sinr", "5", "--calib-trials", "2000", "--target-pfa", "0.01"]
    out1, out2 = str(tmp_path / "r1"), str(tmp_path / "r2")
    monkeypatch.setenv("CAZACKIT_THREADS", "1")
    assert run(args + ["--out", out1]) == 0
    monkeypatch.setenv("CAZACKIT_THREADS", "4")
    assert run(args + ["--out", out2]) == 0
    b1 = open(out1 + ".csv", "rb").read()
    b2 = open(out2 + ".csv", "rb").read()
    assert b1 == b2  # byte-identical regardless of worker count
    rows = list(csv.DictReader(open(out1 + ".csv")))
    assert list(rows[0]) == ["scenario", "family", "extension", "sinr_db",
                             "pd", "time_rmse_s", "freq_rmse_hz", "trials",
                             "seed"]
    assert len(rows) == 2  # bjorck + zc curves at one SINR


def test_threads_env_validation(monkeypatch, capsys):
    monkeypatch.setenv("CAZACKIT_THREADS", "nope")
    assert run(["version"]) == 0  # version never touches the env knob
    assert run(["gen", "--family", "bjorck", "--q", "7",
                "--out", "/tmp/cazackit-env-check"]) == 2


@pytest.mark.parametrize("name", ["fig4a", "fig5c", "fig6b"])
def test_figure_configs_run(name, tmp_path):
    cfg = Path(__file__).resolve().parents[1] / "configs" / f"{name}.cfg"
    assert run(["ambiguity", "--config", str(cfg),
                "--out", str(tmp_path / name)]) == 0
