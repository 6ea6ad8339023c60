"""CLI subcommands: same code paths as the library, JSON on stdout."""

import json

import numpy as np
import pytest

from conftest import plane_track
from posture_bench.cli import main

CHANNELS = [
    "gastrocnemius_left",
    "gastrocnemius_right",
    "oblique_abdominal_left",
    "oblique_abdominal_right",
]


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_simulate_reports_the_settled_posture(capsys):
    code, out, _ = _run(capsys, ["simulate", "--target", "20,45"])
    assert code == 0
    body = json.loads(out)
    assert body["mode"] == "holding"
    assert body["posture"]["roll_deg"] == pytest.approx(20.0, abs=0.01)
    assert body["posture"]["pitch_deg"] == pytest.approx(45.0, abs=0.01)
    assert body["commanded"] == {
        "roll_deg": 20.0,
        "pitch_deg": 45.0,
        "split": {"lat_deg": pytest.approx(10.0, abs=0.05), "thor_deg": pytest.approx(10.0, abs=0.05)},
    }
    assert body["duration_s"] > 0


def test_simulate_with_explicit_split_and_log(capsys, tmp_path):
    log = tmp_path / "run.jsonl"
    code, out, _ = _run(
        capsys, ["simulate", "--target", "20,45", "--split", "12,8", "--log", str(log)]
    )
    assert code == 0
    assert json.loads(out)["commanded"]["split"] == {"lat_deg": 12.0, "thor_deg": 8.0}
    entries = [json.loads(ln) for ln in log.read_text(encoding="utf-8").splitlines()]
    assert entries[0]["type"] == "session"
    assert any(e["type"] == "command" for e in entries)


def test_simulate_rejects_malformed_target(capsys):
    code, _, err = _run(capsys, ["simulate", "--target", "20"])
    assert code == 2
    assert "ROLL,PITCH" in err


def test_simulate_out_of_range_target_fails_cleanly(capsys):
    code, _, err = _run(capsys, ["simulate", "--target", "70,45"])
    assert code == 1
    assert err.startswith("error:")
    assert "roll" in err


def test_fit_posture_recovers_known_plane(capsys, tmp_path):
    track = plane_track(15.0, 60.0, n=200, noise_mm=0.0)
    path = tmp_path / "track.csv"
    lines = ["t,x,y,z"]
    for t, (x, y, z) in zip(track.times_s, track.points_mm):
        lines.append(f"{t:.6f},{x:.9f},{y:.9f},{z:.9f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    code, out, _ = _run(capsys, ["fit-posture", str(path)])
    assert code == 0
    body = json.loads(out)
    assert body["posture"]["roll_deg"] == pytest.approx(15.0, abs=1e-6)
    assert body["posture"]["pitch_deg"] == pytest.approx(60.0, abs=1e-6)
    assert body["rms_residual_mm"] == pytest.approx(0.0, abs=1e-9)
    assert "gravity" in body


def test_fit_posture_bad_csv_exits_one(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,x,y,z\n0,1,2,3\n", encoding="utf-8")
    code, _, err = _run(capsys, ["fit-posture", str(path)])
    assert code == 1
    assert "error:" in err


def _write_conditions(tmp_path, amplitudes, names=CHANNELS):
    fs = 2000.0
    t = np.arange(int(fs)) / fs
    wave = np.sin(2 * np.pi * 100.0 * t)
    paths = {}
    for cond, amp in amplitudes.items():
        lines = ["t," + ",".join(names)]
        for i, ti in enumerate(t):
            vals = ",".join(f"{amp * wave[i]:.9e}" for _ in names)
            lines.append(f"{ti:.6f},{vals}")
        path = tmp_path / f"{cond}.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths[cond] = path
    return paths


def test_emg_report_from_csvs(capsys, tmp_path):
    paths = _write_conditions(tmp_path, {"A": 1.0, "B": 0.8, "C": 0.9, "D": 0.7})
    spec = ",".join(f"{c}={p}" for c, p in paths.items())
    report_path = tmp_path / "report.json"
    code, out, _ = _run(
        capsys, ["emg", "--conditions", spec, "--report", str(report_path)]
    )
    assert code == 0
    assert "ratio" in out and "B/A" in out
    report = json.loads(report_path.read_bytes())
    # same waveform everywhere, so the filter gain cancels in each ratio
    assert report["ratios"]["B/A"]["legs"] == pytest.approx(0.8, rel=1e-9)
    assert report["ratios"]["D/A"]["abdomen"] == pytest.approx(0.7, rel=1e-9)


def test_emg_channel_map_names_anonymous_columns(capsys, tmp_path):
    names = ["ch1", "ch2", "ch3", "ch4"]
    paths = _write_conditions(tmp_path, {"A": 1.0, "B": 0.8, "C": 0.9, "D": 0.7}, names)
    sidecar = tmp_path / "map.json"
    sidecar.write_text(
        json.dumps(
            {
                "ch1": {"muscle": "gastrocnemius", "side": "left"},
                "ch2": {"muscle": "gastrocnemius", "side": "right"},
                "ch3": {"muscle": "oblique_abdominal", "side": "left"},
                "ch4": {"muscle": "oblique_abdominal", "side": "right"},
            }
        ),
        encoding="utf-8",
    )
    spec = ",".join(f"{c}={p}" for c, p in paths.items())
    code, out, _ = _run(
        capsys, ["emg", "--conditions", spec, "--channel-map", str(sidecar)]
    )
    assert code == 0
    assert "B/A" in out


def test_emg_missing_condition_exits_one(capsys, tmp_path):
    paths = _write_conditions(tmp_path, {"A": 1.0, "B": 0.8})
    spec = ",".join(f"{c}={p}" for c, p in paths.items())
    code, _, err = _run(capsys, ["emg", "--conditions", spec])
    assert code == 1
    assert "condition C" in err


def test_emg_malformed_conditions_arg(capsys):
    code, _, err = _run(capsys, ["emg", "--conditions", "justapath.csv"])
    assert code == 2
    assert "A=path.csv" in err


def test_plan_prints_the_shared_posture(capsys):
    code, out, _ = _run(capsys, ["plan", "--views", "plax,a4c"])
    assert code == 0
    body = json.loads(out)
    assert body["posture"] == {"roll_deg": pytest.approx(10.0), "pitch_deg": pytest.approx(60.0)}
    assert set(body["views"]) == {"parasternal_long_axis", "apical_four_chamber"}
    assert body["load"]["legs"] > 0


def test_plan_per_view(capsys):
    code, out, _ = _run(capsys, ["plan", "--views", "plax,a4c", "--per-view"])
    assert code == 0
    body = json.loads(out)
    assert set(body) == {"parasternal_long_axis", "apical_four_chamber"}


def test_plan_unknown_view_exits_one(capsys):
    code, _, err = _run(capsys, ["plan", "--views", "subcostal"])
    assert code == 1
    assert "subcostal" in err


def test_plan_reads_config_file(capsys, tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(
        json.dumps({"views": {"narrow": {"roll_deg": [3, 4], "pitch_deg": [20, 21]}}}),
        encoding="utf-8",
    )
    code, out, _ = _run(capsys, ["plan", "--views", "narrow", "--config", str(cfg)])
    assert code == 0
    body = json.loads(out)
    assert 3.0 <= body["posture"]["roll_deg"] <= 4.0
    assert 20.0 <= body["posture"]["pitch_deg"] <= 21.0
