import json

import numpy as np
import pytest

import hidescan


def test_layer_shapes_at_150():
    shapes = dict(hidescan.alexnet_shapes(150))
    assert shapes["conv1"] == [35, 35, 96]
    assert shapes["pool5"] == [5, 5, 256]
    assert shapes["output"] == [2]
    assert hidescan.ann_parameter_count(50) == 50 * 50 + 50 + 50 + 1
    with pytest.raises(hidescan.HidescanError, match="UnsupportedResolution"):
        hidescan.alexnet_shapes(64)


def test_published_matrix_accuracy():
    assert hidescan.format_accuracy([[530, 125], [6, 3]]) == "80.3"
    assert hidescan.accuracy([[616, 83], [159, 74]]) == pytest.approx(100 * 690 / 932)
    assert hidescan.confusion([0, 1, 1, 0], [0, 0, 1, 1]) == [[1, 1], [1, 1]]


def test_roc_matches_pair_counting():
    rng = np.random.default_rng(3)
    scores = rng.random(200)
    labels = (rng.random(200) < 0.5).astype(int)
    fpr, tpr, auc = hidescan.roc(scores.tolist(), labels.tolist())
    pos, neg = scores[labels == 1], scores[labels == 0]
    pairs = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    assert auc == pytest.approx(pairs / (len(pos) * len(neg)), abs=1e-12)
    assert (fpr[0], tpr[0]) == (0.0, 0.0) and (fpr[-1], tpr[-1]) == (1.0, 1.0)


def test_splits():
    assert hidescan.split_sizes(1897) == (1138, 95, 664)
    ids = [f"s{i}" for i in range(466)]
    folds = hidescan.kfold_split(ids, [i < 233 for i in range(466)], 10, 7)
    assert sorted(len(f) for f in folds) == [46] * 4 + [47] * 6
    assert sorted(sum(folds, [])) == sorted(ids)


def test_image_pipeline(tmp_path):
    image, mask = hidescan.render_synthetic(0, True, seed=1, size=100)
    assert image.shape == (100, 100, 3) and image.dtype == np.uint8
    assert mask.max() == 255
    path = tmp_path / "x.png"
    hidescan.write_image(str(path), image)
    assert np.array_equal(hidescan.read_image(str(path)), image)
    gray = hidescan.to_grayscale(image)
    edges = hidescan.canny(hidescan.resize(gray, 50, 50))
    assert edges.shape == (50, 50) and set(np.unique(edges)) <= {0, 255}
    features = hidescan.block_frequency_features(edges)
    assert len(features) == 50
    assert np.allclose(np.add.reduceat(features, np.arange(0, 50, 2)), 1.0)
    assert features == hidescan.ann_features(image)
    assert hidescan.brightness_category(np.full((10, 10), 200, np.uint8)) == "bright"


def test_cli_round_trip(tmp_path):
    data, out = tmp_path / "data", tmp_path / "run"
    code, _, _ = hidescan.run_cli(["gen-synth", "--out", str(data), "--n-defective", "12", "--n-nondefective", "12",
                                   "--size", "64"])
    assert code == 0
    code, stdout, _ = hidescan.run_cli(["train-ann", "--data", str(data), "--out", str(out), "--epochs", "5"])
    assert code == 0, stdout
    record = json.loads((out / "run.json").read_text())
    assert record["command"] == "train-ann" and "model.bin" in record["artifacts"]
    code, stdout, _ = hidescan.run_cli(["predict", "--model", str(out / "model.bin"), "--image",
                                        str(data / "defective" / "img_00000.png")])
    assert code == 0 and stdout.split()[0] in ("defective", "non_defective")
    code, _, err = hidescan.run_cli(["train-ann", "--data", str(tmp_path / "missing"), "--out", str(out)])
    assert code == 2 and err
