"""Smoke tests for the python bindings."""

import math

import pytest

import ordo


def test_rank_and_select():
    assert ordo.rank_by_score([0.5, 0.2, 0.9], descending=True) == [2, 0, 1]
    assert ordo.rank_by_score([0.5, 0.5, 0.1]) == [2, 0, 1]
    assert ordo.select_top_k([float(i) for i in range(10)], 0.5) == [9, 8, 7, 6, 5]


def test_orderings_match_frozen_values():
    scores = [float(i) for i in range(6)]
    assert ordo.cl_order([3.0, 1.0, 2.0]) == [1, 2, 0]
    assert ordo.fold_order(scores, 2) == [0, 2, 4, 1, 3, 5]
    assert ordo.zigzag_order(scores, 2) == [0, 2, 4, 5, 3, 1]
    assert ordo.jitter(list(range(8)), 8, 42) == [3, 1, 6, 2, 4, 0, 7, 5]
    assert ordo.random_order(10, 7) == [8, 1, 5, 9, 0, 4, 3, 2, 6, 7]


def test_seg_and_cross():
    scores = [float(10 - i) for i in range(10)]
    perm = ordo.seg_order(scores, [(0.0, 0.5), (0.5, 1.0)], seed=42)
    assert sorted(perm[:5]) == [0, 1, 2, 3, 4]
    ok, _ = ordo.validate_permutation(perm, 10)
    assert ok

    asc = [float(i) for i in range(12)]
    assert ordo.cross_order(asc, [6], 2, layers=2, mode="str") == [
        0, 1, 2, 3, 4, 6, 5, 7, 8, 9, 10, 11,
    ]
    assert ordo.cross_order(asc, [6], 2, layers=2, mode="saw") == [
        0, 1, 2, 3, 4, 6, 7, 5, 8, 9, 10, 11,
    ]


def test_errors_surface_as_exceptions():
    with pytest.raises(ordo.Error):
        ordo.fold_order([1.0, 2.0], 5)
    with pytest.raises(ordo.Error):
        ordo.seg_order([1.0, 2.0, 3.0], [(0.5, 1.0)], seed=0)


def test_metrics():
    scores = [float(i) for i in range(6)]
    perm = ordo.fold_order(scores, 2)
    stats = ordo.continuity_stats(perm, scores)
    assert stats["mean_abs_gap"] == pytest.approx(2.2)
    assert stats["max_gap"] == pytest.approx(3.0)
    div = ordo.local_diversity(list(range(6)), scores, 2)
    assert div["mean_window_stddev"] == pytest.approx(0.5)
    profile = ordo.boundary_profile(list(range(100)), [float(i) for i in range(100)], 0.1)
    assert profile["head_mean"] == pytest.approx(4.5)
    assert profile["tail_mean"] == pytest.approx(94.5)
    coverage = ordo.cycle_coverage(perm, scores, 2)
    assert coverage[0][1] == 0.0


def test_scaling_fit_roundtrip():
    truth = {"A": 1194.0, "B": 677.0, "E": 0.75, "alpha": 0.34, "beta": 0.28}
    obs = []
    for n in (160e6, 470e6, 1e9, 1.7e9):
        for k in range(1, 21):
            d = 2.5e9 * k
            obs.append((n, d, ordo.predict_loss(truth, n, d)))
    fit = ordo.fit_scaling(obs)
    assert fit["converged"]
    for key, value in truth.items():
        assert fit[key] == pytest.approx(value, rel=0.02)
    slice_n = [o for o in obs if o[0] == 1e9]
    assert ordo.r_squared_data(slice_n, fit) == pytest.approx(1.0, abs=1e-9)


def test_huber_and_predict():
    assert ordo.huber(5e-4, 1e-3) == pytest.approx(1.25e-7)
    assert ordo.huber(1.0, 1e-3) == pytest.approx(9.995e-4)
    constants = {"A": 100.0, "B": 1000.0, "E": 2.0, "alpha": 0.5, "beta": 0.5}
    assert ordo.predict_loss(constants, 1e4, 1e6) == pytest.approx(4.0)


def test_jsonl_roundtrip(tmp_path):
    src = tmp_path / "corpus.jsonl"
    src.write_text(
        '{"id":"a","score":0.5}\n{"id":"b","score":0.2}\n{"id":"c","score":0.9}\n',
        encoding="utf-8",
    )
    samples = ordo.load_scored_jsonl(str(src))
    assert samples == [("a", 0.5), ("b", 0.2), ("c", 0.9)]

    perm = ordo.cl_order([s for _, s in samples])
    out = tmp_path / "ordered.jsonl"
    ordo.reorder_jsonl(str(src), perm, str(out))
    lines = out.read_text(encoding="utf-8").splitlines()
    assert [ordo_line.split('"')[3] for ordo_line in lines] == ["b", "a", "c"]
    assert (tmp_path / "ordered.jsonl.manifest.json").exists()

    perm_file = tmp_path / "perm.bin"
    ordo.export_permutation(perm, str(perm_file), format="binary")
    assert ordo.import_permutation(str(perm_file)) == perm


def test_determinism():
    a = ordo.seg_order([float(i) for i in range(100)], [(0.0, 0.3), (0.2, 1.0)], seed=9)
    b = ordo.seg_order([float(i) for i in range(100)], [(0.0, 0.3), (0.2, 1.0)], seed=9)
    assert a == b
    assert math.isfinite(sum(a))
