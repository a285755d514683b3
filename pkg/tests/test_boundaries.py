import json

import pytest
from hypothesis import given, settings, strategies as st

from flowgebd import (ConfigError, EvalValidationError,
                      Prediction, RefineConfig, indices_to_timestamps,
                      make_boundary_set, read_prediction, refine)


def test_indices_to_timestamps():
    assert indices_to_timestamps([20], 4.0) == [5.0]
    assert indices_to_timestamps([1], 4.0) == [0.25]
    assert indices_to_timestamps([], 4.0) == []
    with pytest.raises(ConfigError):
        indices_to_timestamps([1], 0.0)


def test_refine_golden_traces():
    cfg = RefineConfig(theta3=0.5)
    assert refine([1.0, 1.2, 3.0], cfg) == [1.0, 3.0]
    assert refine([2.0], RefineConfig(theta3=2.0)) == [2.0]
    # chained cluster: every element is < 0.5 from its predecessor
    assert refine([1.0, 1.2, 1.4, 1.6], cfg) == [1.2]
    # a far-away single-detector boundary survives as a singleton cluster
    assert refine([2.5, 5.0, 5.0, 5.25], cfg) == [2.5, 5.0]


def test_refine_empty_and_duplicates():
    assert refine([], RefineConfig()) == []
    assert refine([5.0, 5.0, 5.0], RefineConfig()) == [5.0]
    assert refine([5.0, 5.25, 5.0], RefineConfig()) == [5.0]


multisets = st.lists(
    st.floats(min_value=0.0, max_value=100.0,
              allow_nan=False, allow_infinity=False),
    min_size=1, max_size=40)
thetas = st.floats(min_value=0.05, max_value=5.0)


@settings(max_examples=200)
@given(multisets, thetas)
def test_refine_gap_property(times, theta3):
    out = refine(times, RefineConfig(theta3=theta3))
    assert all(b - a >= theta3 for a, b in zip(out, out[1:]))


@settings(max_examples=200)
@given(multisets, thetas)
def test_refine_idempotent_and_subset(times, theta3):
    cfg = RefineConfig(theta3=theta3)
    once = refine(times, cfg)
    assert refine(once, cfg) == once
    assert set(once) <= set(times)


@settings(max_examples=100)
@given(multisets, thetas, st.randoms(use_true_random=False))
def test_refine_permutation_invariant(times, theta3, rnd):
    cfg = RefineConfig(theta3=theta3)
    shuffled = list(times)
    rnd.shuffle(shuffled)
    assert refine(shuffled, cfg) == refine(times, cfg)


def test_boundary_set_validation():
    make_boundary_set([1.0, 2.0], 10.0)
    with pytest.raises(EvalValidationError):
        make_boundary_set([0.0], 10.0)
    with pytest.raises(EvalValidationError):
        make_boundary_set([10.0], 10.0)
    with pytest.raises(EvalValidationError):
        make_boundary_set([2.0, 1.0], 10.0)
    with pytest.raises(EvalValidationError):
        make_boundary_set([1.0, 1.0], 10.0)


def test_prediction_round_trip(tmp_path):
    pred = Prediction(video_id="clip7", sample_fps=4.0, duration_s=10.0,
                      method="ensemble", boundaries_s=[2.5, 5.0],
                      config={"theta1": 0.4})
    path = pred.write(tmp_path)
    assert path.name == "clip7.json"
    back = read_prediction(path)
    assert back == pred
    payload = json.loads(path.read_text())
    assert payload["boundaries_s"] == [2.5, 5.0]


def test_prediction_rejects_garbage(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"video_id": "x"}')
    with pytest.raises(EvalValidationError):
        read_prediction(p)
