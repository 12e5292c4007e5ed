import csv
import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from rcmlab import cli, runner, spectral
from rcmlab.config import ConfigError, ExperimentConfig
from rcmlab.plot import plot_spectrum, spectrum_svg
from rcmlab.rng import derive_seed, make_rng

SVG = "{http://www.w3.org/2000/svg}"


def markers(svg_text):
    root = ET.fromstring(svg_text.encode())
    return [c for c in root.iter(f"{SVG}circle") if c.get("class") == "eig"]


def test_rng_streams():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    a = make_rng(5).random(4)
    assert np.array_equal(a, make_rng(5).random(4))


def test_config_round_trip():
    cfg = ExperimentConfig(kind="esd", n=100, d=8, d_values=[2, 8], z_re=0.5, z_im=-0.25, trials=3, seed=7)
    again = ExperimentConfig.from_json(cfg.to_json())
    assert again == cfg
    assert again.z == complex(0.5, -0.25) and again.degrees == [2, 8]


@pytest.mark.parametrize("obj", [
    {"kind": "esd", "n": 10, "d": 2, "colour": "red"},
    {"kind": "esd", "n": 10},
    {"kind": "nope", "n": 10, "d": 2},
    {"kind": "esd", "n": 10, "d": 11},
    {"kind": "esd", "n": 10, "d": 10},
    {"kind": "esd", "n": 10, "d": 2, "version": 2},
    {"kind": "oracle", "n": 8, "d": 4},
    {"kind": "distance", "n": 10, "d": 2, "k": 10},
    {"kind": "esd", "n": 10, "d": 2, "trials": 0},
])
def test_config_rejections(obj):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(obj)


def test_config_bad_json():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("[1, 2]")


def test_svg_single_eigenvalue_at_center():
    text = spectrum_svg([0j])
    root = ET.fromstring(text.encode())
    assert root.get("version") == "1.1" and root.get("viewBox") == "-1.6 -1.6 3.2 3.2"
    (m,) = markers(text)
    assert float(m.get("cx")) == 0 and float(m.get("cy")) == 0
    circle = [c for c in root.iter(f"{SVG}circle") if c.get("class") == "unit-circle"]
    assert len(circle) == 1 and circle[0].get("r") == "1" and circle[0].get("stroke-dasharray")


def test_svg_roots_of_unity_on_circle(tmp_path):
    n = 12
    roots = np.exp(2j * math.pi * np.arange(n) / n)
    path = plot_spectrum(roots, tmp_path / "sub" / "r.svg")
    ms = markers(path.read_text())
    assert len(ms) == n
    for m in ms:
        assert math.hypot(float(m.get("cx")), float(m.get("cy"))) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        spectrum_svg([])


def test_svg_d2_has_mass_off_disk(tmp_path):
    cfg = ExperimentConfig(kind="esd", n=500, d=2, trials=1, seed=0)
    runner.run(cfg, tmp_path, workers=1)
    ms = markers((tmp_path / "plots" / "esd.svg").read_text())
    off = sum(math.hypot(float(m.get("cx")), float(m.get("cy"))) > 1 for m in ms)
    assert len(ms) == 500 and off > 0


def test_esd_bundle(tmp_path):
    cfg = ExperimentConfig(kind="esd", n=500, d=32, trials=1, seed=3)
    summary = runner.run(cfg, tmp_path, workers=1)
    for name in ("config.json", "trials.csv", "summary.json", "timing.json", "plots/esd.svg"):
        assert (tmp_path / name).exists()
    assert len(markers((tmp_path / "plots" / "esd.svg").read_text())) == 500
    assert ExperimentConfig.from_json((tmp_path / "config.json").read_text()) == cfg
    assert summary["by_d"][0]["d"] == 32


def test_determinism_and_worker_independence(tmp_path):
    cfg = ExperimentConfig(kind="ssv_sweep", n=40, d=4, d_values=[3, 5], trials=4, seed=11)
    runner.run(cfg, tmp_path / "a", workers=1)
    runner.run(cfg, tmp_path / "b", workers=1)
    runner.run(cfg, tmp_path / "c", workers=3)
    for name in ("trials.csv", "summary.json", "config.json"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes() == (tmp_path / "c" / name).read_bytes()


def test_ssv_sweep_summary(tmp_path):
    cfg = ExperimentConfig(kind="ssv_sweep", n=64, d=8, d_values=[8, 16, 32], trials=3, seed=1)
    summary = json.loads(json.dumps(runner.run(cfg, tmp_path, workers=1)))
    assert [e["d"] for e in summary["by_d"]] == [8, 16, 32]
    for e in summary["by_d"]:
        assert {"min", "median", "max"} <= set(e["s_min"])


def test_csv_round_trip(tmp_path):
    cfg = ExperimentConfig(kind="replacement", n=30, d=6, z_re=0.5, z_im=0.5, trials=5, seed=2)
    recs = runner.run_trials(cfg, workers=1)
    runner.write_trials_csv(recs, tmp_path / "t.csv")
    rows = list(csv.DictReader(open(tmp_path / "t.csv")))
    assert [float(r["gap"]) for r in rows] == [r.payload["gap"] for r in recs]
    assert [int(r["seed"]) for r in rows] == [derive_seed(2, 6, t) for t in range(5)]


def test_fmt_round_trip():
    for v in (0.1, 1 / 3, 1e-300, math.pi * 1e17, -2.5):
        assert float(runner.fmt(v)) == v
    assert runner.fmt(True) == "1" and runner.fmt(np.int64(7)) == "7"


@pytest.mark.parametrize("kind,extra", [
    ("norm_sweep", {"trials": 2}),
    ("expansion", {"k": 2, "eps": 0.5, "trials": 2}),
    ("distance", {"k": 20, "trials": 30}),
    ("threshold", {"d_values": [2, 4], "trials": 5, "s_threshold": 1e-12}),
    ("oracle", {"n": 3, "d": 1}),
])
def test_other_kinds(tmp_path, kind, extra):
    obj = {"kind": kind, "n": 40, "d": 4, "seed": 5, **extra}
    summary = runner.run(ExperimentConfig.from_dict(obj), tmp_path, workers=1)
    assert (tmp_path / "summary.json").exists()
    if kind == "threshold":
        rows = list(csv.DictReader(open(tmp_path / "sweep.csv")))
        assert [int(r["d"]) for r in rows] == [2, 4]
    if kind == "oracle":
        assert summary["P_singular"] == "7/9"


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("RCMLAB_THREADS", "2")
    assert runner.worker_count(10) == 2
    assert runner.worker_count(1) == 1


def test_cli_success_and_config_error(tmp_path, capsys):
    out = tmp_path / "o"
    assert cli.main(["ssv_sweep", "--n", "20", "--d", "3", "--trials", "2", "--out", str(out), "--workers", "1"]) == 0
    assert (out / "trials.csv").exists()
    assert cli.main(["esd", "--n", "20", "--d", "30", "--out", str(out)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 10, "d": 2, "mystery": 1}))
    assert cli.main(["esd", "--config", str(bad)]) == 2


def test_cli_config_file_with_override(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"n": 20, "d": 3, "trials": 1, "seed": 4}))
    out = tmp_path / "o"
    assert cli.main(["ssv_sweep", "--config", str(conf), "--d", "5", "--out", str(out), "--workers", "1"]) == 0
    assert json.loads((out / "config.json").read_text())["d"] == 5


def test_cli_numeric_failure(tmp_path, monkeypatch):
    def boom(a):
        raise spectral.NumericalBackendError("no convergence")
    monkeypatch.setattr(spectral, "eigenvalues", boom)
    assert cli.main(["esd", "--n", "10", "--d", "2", "--out", str(tmp_path), "--workers", "1"]) == 3


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "rcmlab.cli", "oracle", "--n", "2", "--d", "1", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads((tmp_path / "summary.json").read_text())["P_singular"] == "1/2"
