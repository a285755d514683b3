import json
import pickle
from pathlib import Path

import pytest

from annot_convert import convert, convert_file, validate_file, write_canonical
from annot_convert.convert import ConversionError

FIXTURES = Path(__file__).parent / "fixtures"


def test_kinetics_fixture_matches_golden_byte_for_byte(tmp_path):
    out = tmp_path / "out.json"
    result = convert_file(FIXTURES / "kinetics_mini.pkl", "kinetics-gebd", out)
    assert not result.warnings and not result.skipped
    assert out.read_bytes() == (FIXTURES / "kinetics_mini.golden.json").read_bytes()


def test_tapos_fixture_expands_instances(tmp_path):
    """v_abc_s01 spans frames 10..100 at 25 fps: 3.6 s long with sub-action
    splits at frames 40 and 70 -> 1.2 s and 2.4 s from the instance start."""
    out = tmp_path / "out.json"
    result = convert_file(FIXTURES / "tapos_mini.pkl", "tapos", out)
    assert not result.warnings
    assert out.read_bytes() == (FIXTURES / "tapos_mini.golden.json").read_bytes()
    payload = json.loads(out.read_text())
    ids = [v["video_id"] for v in payload["videos"]]
    assert ids == ["v_abc_s00", "v_abc_s01", "v_xyz_s00"]
    s01 = payload["videos"][1]
    assert s01["duration_s"] == 3.6
    assert s01["annotators"] == [[1.2, 2.4]]


def test_converted_files_validate_clean(tmp_path):
    for name, dataset in (("kinetics_mini.pkl", "kinetics-gebd"),
                          ("tapos_mini.pkl", "tapos")):
        out = tmp_path / f"{name}.json"
        convert_file(FIXTURES / name, dataset, out)
        assert validate_file(out) == []


def test_clamping_and_dropping():
    data = {"vid": {"video_duration": 10.0,
                    "substages_timestamps": [[-0.5, 3.0, 10.03, 12.0]]}}
    result = convert(data, "kinetics-gebd")
    times = result.videos[0]["annotators"][0]
    assert times[0] == 3.0
    assert all(t < 10.0 for t in times)
    assert len(times) == 3  # the non-positive one is gone
    assert len(result.warnings) == 3
    assert any("dropped" in w for w in result.warnings)
    assert any("noise" in w for w in result.warnings)        # 10.03
    assert any("LARGE excess" in w for w in result.warnings)  # 12.0


def test_empty_annotators_skipped():
    data = {"a": {"video_duration": 5.0, "substages_timestamps": []},
            "b": {"video_duration": 5.0, "substages_timestamps": [[1.0]]}}
    result = convert(data, "kinetics-gebd")
    assert [v["video_id"] for v in result.videos] == ["b"]
    assert result.skipped == ["a"]
    assert any("empty annotator" in w for w in result.warnings)


def test_alternate_field_spellings():
    data = {"v": {"duration": 6.0, "change_timestamps": [[2.0]]}}
    result = convert(data, "kinetics-gebd")
    assert result.videos[0]["duration_s"] == 6.0

    tapos = {"v": {"i0": {"substages_myframeidx": [0, 12, 24], "myfps": 12.0}}}
    result = convert(tapos, "tapos")
    assert result.videos[0]["annotators"] == [[1.0]]


def test_unknown_layout_fails_loudly():
    with pytest.raises(ConversionError) as e:
        convert({"v": {"mystery_field": 1}}, "kinetics-gebd")
    assert "mystery_field" in str(e.value)
    with pytest.raises(ConversionError):
        convert({"v": {"i": {"substages": [0, 10, 20]}}}, "tapos")  # no fps
    with pytest.raises(ConversionError):
        convert({"v": {"i": {"substages": [20, 10], "fps": 10.0}}}, "tapos")
    with pytest.raises(ConversionError):
        convert([1, 2, 3], "kinetics-gebd")
    with pytest.raises(ConversionError):
        convert({}, "imagenet")


def test_timestamps_sorted_on_output():
    data = {"v": {"video_duration": 10.0,
                  "substages_timestamps": [[7.0, 2.0, 5.0]]}}
    result = convert(data, "kinetics-gebd")
    assert result.videos[0]["annotators"][0] == [2.0, 5.0, 7.0]


def test_lossless_serialization(tmp_path):
    value = 1.0 / 3.0
    data = {"v": {"video_duration": 10.0,
                  "substages_timestamps": [[value, 9.123456789012345]]}}
    out = tmp_path / "o.json"
    write_canonical(convert(data, "kinetics-gebd").payload(), out)
    back = json.loads(out.read_text())
    assert back["videos"][0]["annotators"][0] == [value, 9.123456789012345]


def test_corrupt_pickle_reported(tmp_path):
    bad = tmp_path / "bad.pkl"
    bad.write_bytes(b"this is not a pickle")
    with pytest.raises((pickle.UnpicklingError, ConversionError, EOFError)):
        convert_file(bad, "kinetics-gebd", tmp_path / "o.json")
