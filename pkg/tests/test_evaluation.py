from pathlib import Path

import numpy as np
import pytest

from flowgebd import (BoundarySet, EvalValidationError, FormatError,
                      VideoAnnotation, evaluate_dataset, match_boundaries,
                      read_annotations, score_video, write_annotations)

FIXTURES = Path(__file__).parent / "fixtures" / "golden_eval"


def test_matching_example():
    pairs = match_boundaries([1.0, 3.0], [1.1, 5.0], duration_s=10.0, tau=0.05)
    assert pairs == [(0, 0)]


def test_exact_predictions_fully_match():
    gts = [1.0, 4.0, 7.5]
    for tau in (0.05, 0.1, 0.5):
        pairs = match_boundaries(gts, gts, 10.0, tau)
        assert pairs == [(0, 0), (1, 1), (2, 2)]


def test_empty_predictions():
    assert match_boundaries([], [2.0], 10.0, 0.05) == []


def test_one_to_one_greedy_by_distance():
    # two predictions near one ground truth: only the closer one matches
    pairs = match_boundaries([4.9, 5.05], [5.0], 10.0, 0.05)
    assert pairs == [(1, 0)]
    # tie: earlier ground truth, then earlier prediction wins
    pairs = match_boundaries([2.0], [1.5, 2.5], 10.0, 0.1)
    assert pairs == [(0, 0)]


def test_strict_threshold_comparison():
    # |pred - gt| / duration == tau exactly: not a match
    assert match_boundaries([2.5], [2.0], 10.0, 0.05) == []
    assert match_boundaries([2.499999], [2.0], 10.0, 0.05) != []


def test_score_video_single_annotator_counts():
    ann = VideoAnnotation("v", 10.0, ((2.0, 5.0, 8.0),))
    preds = BoundarySet((2.1, 5.6, 9.5), 10.0)
    scores = score_video(preds, ann, taus=[0.05, 0.10, 0.20])
    assert [s.matched for s in scores] == [1, 2, 3]
    assert scores[0].precision == pytest.approx(1 / 3)
    assert scores[0].recall == pytest.approx(1 / 3)


def test_score_video_annotator_max_and_mean():
    ann = VideoAnnotation("v", 20.0, ((10.0,), (4.0, 16.0)))
    preds = BoundarySet((4.2,), 20.0)
    smax = score_video(preds, ann, taus=[0.05], annotator_mode="max")[0]
    assert smax.f1 == pytest.approx(2 / 3)
    assert (smax.matched, smax.predicted, smax.ground_truth) == (1, 1, 2)
    smean = score_video(preds, ann, taus=[0.05], annotator_mode="mean")[0]
    assert smean.f1 == pytest.approx((0.0 + 2 / 3) / 2)
    assert smean.ground_truth == pytest.approx(1.5)


def test_score_video_empty_annotator_contributes_zero():
    ann = VideoAnnotation("v", 10.0, ((), (3.0,)))
    preds = BoundarySet((3.0,), 10.0)
    smean = score_video(preds, ann, taus=[0.05], annotator_mode="mean")[0]
    assert smean.f1 == pytest.approx(0.5)  # (0 + 1) / 2


def test_duration_mismatch_rejected():
    ann = VideoAnnotation("v", 10.0, ((5.0,),))
    preds = BoundarySet((5.0,), 11.0)
    with pytest.raises(EvalValidationError):
        score_video(preds, ann)


def test_golden_fixture_exact_table():
    """Hand-computed expectations.

    vidA (D=10): gt {2,5,8}, preds {2.1,5.6,9.5}; distances 0.1/0.6/1.5
      -> matches per tau 0.05..0.50: 1,2,2,3,3,3,3,3,3,3
    vidB (D=20): annotators {10} and {4,16}, preds {4.2}
      -> tau<0.30: best annotator is {4,16}: counts (1,1,2)
         tau>=0.30 (tolerance 6 > 5.8): {10} gives F1=1: counts (1,1,1)
    vidC (D=10): gt {5}, empty preds -> (0,0,1)
    Micro totals: npred=4; ngt=6 below tau 0.30, 5 from 0.30 on.
    """
    report = evaluate_dataset(FIXTURES / "preds", FIXTURES / "annotations.json")
    matched = [c[0] for c in report.counts]
    assert matched == [2, 3, 3, 4, 4, 4, 4, 4, 4, 4]
    assert [c[1] for c in report.counts] == [4] * 10
    assert [c[2] for c in report.counts] == [6, 6, 6, 6, 6, 5, 5, 5, 5, 5]
    expected_f1 = [0.4, 0.6, 0.6, 0.8, 0.8] + [8 / 9] * 5
    assert report.f1 == pytest.approx(expected_f1, abs=1e-12)
    assert report.precision == pytest.approx([0.5, 0.75, 0.75, 1, 1, 1, 1, 1, 1, 1])
    assert report.recall == pytest.approx(
        [1 / 3, 0.5, 0.5, 2 / 3, 2 / 3, 0.8, 0.8, 0.8, 0.8, 0.8])
    assert report.avg_f1 == pytest.approx(sum(expected_f1) / 10, abs=1e-12)
    assert not report.warnings


def test_missing_prediction_counts_empty(tmp_path):
    report = evaluate_dataset(tmp_path, FIXTURES / "annotations.json")
    assert report.warnings and len(report.warnings) == 3
    assert report.f1 == [0.0] * 10


def test_report_files(tmp_path):
    report = evaluate_dataset(FIXTURES / "preds", FIXTURES / "annotations.json")
    report.write_csv(tmp_path / "report.csv")
    report.write_per_video_csv(tmp_path / "per_video.csv")
    header = (tmp_path / "report.csv").read_text().splitlines()[0]
    assert header.startswith("metric,tau_0.05,") and header.endswith("tau_0.50,avg")
    assert len((tmp_path / "per_video.csv").read_text().splitlines()) == 1 + 3 * 10


def test_monotonicity_and_symmetry_properties():
    rng = np.random.default_rng(0)
    taus = [0.05 * k for k in range(1, 11)]
    for _ in range(200):
        d = float(rng.uniform(5, 50))
        a = np.sort(rng.uniform(0.01 * d, 0.99 * d, rng.integers(0, 8)))
        b = np.sort(rng.uniform(0.01 * d, 0.99 * d, rng.integers(0, 8)))
        prev = 0
        for tau in taus:
            m = len(match_boundaries(a, b, d, tau))
            assert m >= prev
            assert m <= min(len(a), len(b))
            assert m == len(match_boundaries(b, a, d, tau)), "matching not symmetric"
            prev = m


def test_single_video_dataset_equals_video_score(tmp_path):
    import json as _json
    ann = VideoAnnotation("solo", 10.0, ((2.0, 5.0, 8.0),))
    write_annotations(tmp_path / "ann.json", [ann])
    (tmp_path / "preds").mkdir()
    (tmp_path / "preds" / "solo.json").write_text(_json.dumps({
        "video_id": "solo", "sample_fps": 4.0, "duration_s": 10.0,
        "method": "pt", "boundaries_s": [2.1, 5.6, 9.5], "config": {}}))
    report = evaluate_dataset(tmp_path / "preds", tmp_path / "ann.json")
    scores = score_video(BoundarySet((2.1, 5.6, 9.5), 10.0), ann)
    assert report.f1 == pytest.approx([s.f1 for s in scores])
    assert report.precision == pytest.approx([s.precision for s in scores])
    assert report.recall == pytest.approx([s.recall for s in scores])


def test_annotation_io_round_trip(tmp_path):
    vids = [VideoAnnotation("x", 10.0, ((1.0, 2.0), (1.5,))),
            VideoAnnotation("y", 8.0, ((),))]
    write_annotations(tmp_path / "ann.json", vids)
    back = read_annotations(tmp_path / "ann.json")
    assert back == vids


def test_malformed_annotations_rejected(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"videos": [{"video_id": "v"}]}')
    with pytest.raises(FormatError):
        read_annotations(p)
    p.write_text('{"videos": [{"video_id": "v", "duration_s": 10.0, '
                 '"annotators": [[12.0]]}]}')
    with pytest.raises(FormatError):
        read_annotations(p)
