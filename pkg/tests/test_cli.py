import json
import math

import pytest

from corrmem.cli import main
from corrmem.config import ConfigDocument, InputState, config_to_dict, load_config, parse_config
from corrmem.report import emit_report, to_csv
from corrmem.scenarios import RunSpec, run
from corrmem.schedule import storage_ramp
from corrmem.system import ConfigError, cross_line, straight_line


def test_spec_invariants():
    with pytest.raises(ValueError):
        RunSpec("store", T=0.0)
    with pytest.raises(ValueError):
        RunSpec("store", steps=0)
    with pytest.raises(ValueError):
        RunSpec("store", alpha0=(math.inf,))
    with pytest.raises(ValueError):
        RunSpec("teleport")


def test_config_round_trip(tmp_path):
    cfg = cross_line(1, 0.5, 0.7, 1.2, [storage_ramp(1.0, 5.0)] * 3, atoms=[1, 2, 3])
    doc = config_to_dict(cfg, InputState("cat2", 1.0, -1.0, -1), {"T": 5.0})
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    back = load_config(path)
    assert back.system == cfg
    assert back.input_state == InputState("cat2", 1.0, -1.0, -1)
    assert back.run == {"T": 5.0}


def test_malformed_config():
    with pytest.raises(ConfigError):
        parse_config({"photons": []})
    with pytest.raises(ConfigError):
        parse_config({"ensembles": [], "photons": [], "input_state": {"kind": "squeezed"}})


def test_store_csv_rows(tmp_path):
    report = run(RunSpec("store", T=100.0, steps=4))
    files = emit_report(report, tmp_path / "s")
    csv_text = (tmp_path / "s.csv").read_bytes().decode("utf-8")
    assert "\r" not in csv_text
    lines = csv_text.splitlines()
    assert lines[0].startswith("t,theta,phi_1,")
    assert lines[0].endswith("dark_overlap")
    assert len(lines) == 1 + 5
    assert [p.suffix for p in files] == [".csv", ".json"]
    assert "fidelity" in json.loads((tmp_path / "s.json").read_text())


def test_floats_round_trip(tmp_path):
    report = run(RunSpec("store", T=100.0, steps=4))
    emit_report(report, tmp_path / "s")
    rows = (tmp_path / "s.csv").read_text().splitlines()[1:]
    parsed = [[float(x) for x in r.split(",")] for r in rows]
    assert parsed == report.rows


@pytest.mark.parametrize("scenario", ["entangle2", "crossline"])
def test_fidelity_key(tmp_path, scenario):
    spec = RunSpec(scenario, T=50.0, steps=200, trace=False)
    emit_report(run(spec), tmp_path / scenario)
    assert "fidelity" in json.loads((tmp_path / f"{scenario}.json").read_text())


def test_reruns_are_byte_identical(tmp_path):
    for k in range(2):
        emit_report(run(RunSpec("store", T=60.0, steps=30)), tmp_path / f"r{k}")
    for ext in ("csv", "json"):
        assert (tmp_path / f"r0.{ext}").read_bytes() == (tmp_path / f"r1.{ext}").read_bytes()


def test_store_first_ensemble_only():
    m = run(RunSpec("store", phi=(0.0,), T=1600.0, trace=False)).metrics
    assert m["spin_magnitudes"][1] <= 1e-3 * 2.0
    assert m["spin_magnitudes"][0] == pytest.approx(2.0, rel=1e-3)


def test_store_second_ensemble_only():
    m = run(RunSpec("store", phi=(math.pi / 2,), T=1600.0, trace=False)).metrics
    assert m["spin_magnitudes"][0] <= 1e-3 * 2.0


def test_ghz_magnitudes_example():
    m = run(RunSpec("ghz3", alpha0=(1.8,), T=1600.0, trace=False)).metrics
    for s in m["spin_magnitudes"]:
        assert s == pytest.approx(1.8 / math.sqrt(3), rel=1e-3)


def test_transfer_with_weak_target_controls():
    # E2/E3 controls weak relative to E1: both cats land in spin 2 and spin 3
    report = run(RunSpec("crossline", weak=("E2", "E3"), trace=False))
    assert report.metrics["fidelity"] >= 0.999
    assert report.metrics["spin_magnitudes"][0] < 1e-2


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path / "v")]) == 0
    out = capsys.readouterr().out
    assert "nullity" in out and "PASS A1" in out
    assert main(["store", "--time", "100", "--steps", "4"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"ensembles": [{"id": "E1"}], "photons": [{"id": "a", "couplings": [{"ensemble": "E9", "g": 1}]}], "controls": {"E1": {"kind": "constant", "omega_max": 1, "T": 1}}}))
    assert main(["verify", "--config", str(bad)]) == 2
    assert "system" in capsys.readouterr().err


def test_cli_config_file(tmp_path):
    cfg = straight_line([1.0, 1.0], [storage_ramp(50.0, 20.0)] * 2)
    doc = config_to_dict(cfg, InputState("coherent", 1.0))
    path = tmp_path / "line.json"
    path.write_text(json.dumps(doc))
    assert main(["verify", "--config", str(path)]) == 0
