import math

import numpy as np
import pytest

import mlfd


def test_achievable_distances():
    d2 = mlfd.achievable_distances(10)
    assert len(d2) == 85
    assert d2[0] == 1 and d2[-1] == 100
    assert 7 not in d2


def test_dilation_matches_oracle():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 9, size=(6, 7), dtype=np.uint8)
    fast = mlfd.dilation_curve(img, r_max=4)
    assert fast == mlfd.dilation_curve_oracle(img, 4)
    assert list(fast.volumes) == sorted(fast.volumes)
    assert fast.surface_voxels == 42


def test_descriptors_and_fd():
    img = mlfd.synth_texture(0, 0, 64, 1)
    assert img.shape == (64, 64) and img.dtype == np.uint8
    desc = mlfd.bm_descriptors(img)
    curve = mlfd.dilation_curve(img)
    assert len(desc) == 85
    assert desc[0] == pytest.approx(math.log(curve.volumes[0]))
    fd = mlfd.estimate_fd(curve)
    assert 1.0 < fd["dimension"] < 3.0
    assert fd["dimension"] == pytest.approx(3.0 - fd["slope"])
    assert fd["points"] == 85


def test_multilevel():
    img = mlfd.synth_texture(1, 0, 64, 1)
    assert len(mlfd.decompose(img, 2)) == 4
    out = mlfd.build_efv(img, levels=3, min_cell_side=16)
    assert len(out["efv"]) == 170
    assert len(out["mean_by_level"]) == 3
    assert mlfd.shannon_entropy([0.0, 1.0, math.e]) == pytest.approx(math.e)
    with pytest.raises(mlfd.ConfigError):
        mlfd.build_efv(img, levels=3, min_cell_side=32)


def test_lda_pipeline():
    rng = np.random.default_rng(3)
    x = np.vstack([rng.normal(0, 1, (20, 3)), rng.normal(5, 1, (20, 3))])
    labels = ["a"] * 20 + ["b"] * 20
    train, test = mlfd.stratified_holdout(x, labels, 0.5, 7)
    assert sorted(train + test) == list(range(40))
    model = mlfd.fit_lda(x[train], [labels[i] for i in train])
    assert model.classes == ["a", "b"]
    label, post = model.predict(x[0])
    assert label == "a" and sum(post) == pytest.approx(1.0)
    metrics = mlfd.evaluate(model, x[test], [labels[i] for i in test])
    assert metrics["CR"] == pytest.approx(1.0)
    order, scores = mlfd.rank_features(x, labels, 7)
    assert sorted(order) == [0, 1, 2] and len(scores) == 3
    selected, accuracies = mlfd.select_mld(x, labels, order, 7)
    assert len(accuracies) == 3
    assert accuracies[len(selected) - 1] == max(accuracies)
    stats = mlfd.confusion_stats([[5, 0], [0, 5]])
    assert stats["kappa"] == pytest.approx(1.0)


def test_dataset_io(tmp_path):
    n = mlfd.generate_synthetic(tmp_path, n_classes=2, samples_per_class=3, size=32, seed=1)
    assert n == 6
    entries = mlfd.scan_dataset(tmp_path)
    assert len(entries) == 6
    path, label, index = entries[0]
    assert label == "class_0" and index == 0
    img = mlfd.load_grayscale(path)
    assert img.shape == (32, 32)
    with pytest.raises(mlfd.DataError):
        mlfd.load_grayscale(tmp_path / "missing.pgm")
