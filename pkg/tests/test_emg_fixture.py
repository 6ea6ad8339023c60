"""The shipped six-subject recording set and its designed medians."""

import numpy as np
import pytest

from posture_bench.emg import condition_ratios, load_recording, median_ratios
from posture_bench.emg_fixture import (
    COLUMNS,
    SUBJECTS,
    build_fixture,
    subject_loads,
)

REFERENCE_MEDIANS = {
    "B/A": {"legs": 0.785, "abdomen": 0.754},
    "D/B": {"legs": 0.879, "abdomen": 0.965},
    "D/C": {"legs": 0.924, "abdomen": 0.964},
    "D/A": {"legs": 0.691, "abdomen": 0.736},
}


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    return build_fixture(tmp_path_factory.mktemp("emg") / "recordings")


def test_designed_loads_hit_reference_medians():
    loads = subject_loads()
    for key, expected in REFERENCE_MEDIANS.items():
        num, den = key.split("/")
        for group_key, group in (("legs", "legs"), ("abdomen", "abdomen")):
            values = [loads[s][num][group] / loads[s][den][group] for s in SUBJECTS]
            assert float(np.median(values)) == pytest.approx(expected[group_key], abs=1e-12)


def test_designed_loads_keep_every_ratio_below_one_for_d():
    loads = subject_loads()
    for s in SUBJECTS:
        for group in ("legs", "abdomen"):
            assert loads[s]["D"][group] < loads[s]["A"][group]


def test_fixture_layout(fixture_dir):
    for subject in SUBJECTS:
        for cond in "ABCD":
            assert (fixture_dir / subject / f"{cond}.csv").is_file()
    assert (fixture_dir / "channels.json").is_file()


def test_fixture_is_bit_stable(tmp_path, fixture_dir):
    again = build_fixture(tmp_path / "again")
    a = (fixture_dir / "S3" / "B.csv").read_bytes()
    b = (again / "S3" / "B.csv").read_bytes()
    assert a == b


def test_fixture_recordings_parse_with_expected_channels(fixture_dir):
    rec = load_recording(fixture_dir / "S1" / "A.csv")
    assert tuple(rec.channels) == COLUMNS
    assert rec.sample_rate_hz == pytest.approx(2000.0, rel=1e-9)
    assert rec.n_samples == 12000
    assert rec.roles["gastrocnemius_left"] == ("gastrocnemius", "left")


def test_fixture_medians_match_reference_end_to_end(fixture_dir):
    reports = []
    for subject in SUBJECTS:
        records = {
            cond: load_recording(fixture_dir / subject / f"{cond}.csv")
            for cond in "ABCD"
        }
        reports.append(condition_ratios(records))
    medians = median_ratios(reports)
    for key, expected in REFERENCE_MEDIANS.items():
        assert medians[key]["legs"] == pytest.approx(expected["legs"], abs=0.005)
        assert medians[key]["abdomen"] == pytest.approx(expected["abdomen"], abs=0.005)
