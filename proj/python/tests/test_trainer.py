import json
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest
import torch

from tropdiv_trainer import formats, train
from tropdiv_trainer.cli import main
from tropdiv_trainer.data import synthetic_digits

CLI = os.environ.get("TROPDIV_CLI")


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle")
    cfg = train.MnistConfig(out_dir=str(out), epochs=1, synthetic=True, synthetic_train=1500,
                            synthetic_test=400, train_rows=300, test_rows=400)
    manifest = train.train_mnist(cfg)
    return out, manifest


def test_bundle_files_validate(bundle):
    out, manifest = bundle
    for name in ("network.json", "train_x.csv", "train_y.csv", "test_x.csv", "test_y.csv", "manifest.json", "model.pt"):
        assert (out / name).exists()
    layers, n = formats.read_network(out / "network.json")
    assert n == 784
    assert [W.shape for W, _, _ in layers] == [(100, 784), (10, 100)]
    assert formats.read_csv(out / "train_x.csv").shape == (300, 784)
    assert formats.read_labels(out / "test_y.csv").shape == (400,)
    assert manifest["params"] == 784 * 100 + 100 + 100 * 10 + 10
    assert manifest["test_error"] < 0.5


def test_exported_forward_matches_torch(bundle):
    out, _ = bundle
    ck = torch.load(out / "model.pt", weights_only=True)
    model = train.MLP(ck["input_dim"], ck["hidden"], ck["classes"])
    model.load_state_dict(ck["state_dict"])
    layers, _ = formats.read_network(out / "network.json")
    probes = formats.read_csv(out / "test_x.csv")[:100]
    with torch.no_grad():
        want = model(torch.as_tensor(probes, dtype=torch.float32)).double().numpy()
    assert np.max(np.abs(formats.forward(layers, probes) - want)) < 1e-5


def test_network_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    layers = [(rng.standard_normal((4, 3)), rng.standard_normal(4), "relu"),
              (rng.standard_normal((2, 4)), rng.standard_normal(2), "linear")]
    formats.write_network(tmp_path / "n.json", layers, 3)
    back, n = formats.read_network(tmp_path / "n.json")
    assert n == 3
    for (W, b, a), (W2, b2, a2) in zip(layers, back):
        assert np.array_equal(W, W2) and np.array_equal(b, b2) and a == a2


def test_csv_round_trip(tmp_path):
    rows = np.array([[0.1, -2.5, 1e-17], [3.0, 4.0, 1.0 / 3.0]])
    formats.write_csv(tmp_path / "x.csv", rows)
    assert np.array_equal(formats.read_csv(tmp_path / "x.csv"), rows)
    formats.write_labels(tmp_path / "y.csv", [3, 5, 0])
    assert formats.read_labels(tmp_path / "y.csv").tolist() == [3, 5, 0]


def test_malformed_network_rejected():
    with pytest.raises(ValueError):
        formats.network_dict([(np.zeros((2, 3)), np.zeros(2), "relu")], 3)
    with pytest.raises(ValueError):
        formats.network_dict([(np.zeros((2, 4)), np.zeros(2), "linear")], 3)


@pytest.mark.parametrize("terms,expected", [(3, 4110), (5, 6110), (7, 8110)])
def test_head_param_counts(terms, expected):
    k = 10
    assert train.head_params(k * terms, 100, k) == expected
    rng = np.random.default_rng(terms)
    feats = rng.standard_normal((64, k * terms))
    labels = rng.integers(0, k, 64)
    layers = train.train_head(feats, labels, units=100, classes=k, epochs=1, seed=0)
    assert formats.count_params(layers) == expected


def test_head_is_deterministic():
    rng = np.random.default_rng(0)
    feats = rng.standard_normal((100, 6))
    labels = rng.integers(0, 3, 100)
    a = train.train_head(feats, labels, units=8, epochs=3, seed=4)
    b = train.train_head(feats, labels, units=8, epochs=3, seed=4)
    for (W, bb, _), (W2, bb2, _) in zip(a, b):
        assert np.array_equal(W, W2) and np.array_equal(bb, bb2)


def test_head_on_random_features_is_near_chance():
    rng = np.random.default_rng(3)
    k = 4
    layers = train.train_head(rng.standard_normal((800, 12)), rng.integers(0, k, 800), units=16, epochs=5, seed=0)
    err = train.error_rate(layers, rng.standard_normal((2000, 12)), rng.integers(0, k, 2000))
    assert abs(err - (1 - 1 / k)) < 0.06


def test_synthetic_data_is_seeded():
    a = synthetic_digits(50, 10, seed=2)
    b = synthetic_digits(50, 10, seed=2)
    for u, v in zip(a, b):
        assert np.array_equal(u, v)
    assert a[0].min() >= 0.0 and a[0].max() <= 1.0


def test_cli_export_and_head(bundle, tmp_path, capsys):
    out, _ = bundle
    assert main(["export", str(out / "model.pt"), "--out", str(tmp_path / "again.json")]) == 0
    assert json.loads((tmp_path / "again.json").read_text()) == json.loads((out / "network.json").read_text())
    rng = np.random.default_rng(0)
    formats.write_csv(tmp_path / "f.csv", rng.standard_normal((40, 30)))
    formats.write_labels(tmp_path / "l.csv", rng.integers(0, 10, 40))
    assert main(["train-head", "--features", str(tmp_path / "f.csv"), "--labels", str(tmp_path / "l.csv"),
                 "--classes", "10", "--epochs", "1", "--out", str(tmp_path / "head.json")]) == 0
    assert json.loads(capsys.readouterr().out.strip().splitlines()[-1])["params"] == 4110
    assert main(["train-mnist", "--out-dir", str(tmp_path / "m"), "--data-dir", str(tmp_path / "none")]) == 1


@pytest.mark.skipif(not CLI, reason="TROPDIV_CLI not set")
def test_bundle_feeds_compressor(bundle, tmp_path):
    """Exported formats are read by the compressor: binary, multiclass and head paths."""
    out, _ = bundle

    def run(*args):
        r = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        return json.loads(r.stdout) if r.stdout.strip() else None

    run("compress", out / "network.json", "--classes", "3,5", "--terms", "2", "--samples", 100,
        "--samples-csv", out / "train_x.csv", "-o", tmp_path / "bin.json")
    assert json.loads((tmp_path / "bin.json").read_text())["param_count"] == 2 * 2 * 785 + 1
    res = run("evaluate", tmp_path / "bin.json", "--samples-csv", out / "test_x.csv", "--labels", out / "test_y.csv",
              "--classes", "3,5")
    assert 0.0 <= res["error"] <= 1.0

    run("compress", out / "network.json", "--kind", "multiclass-simplified", "--terms", "3", "--samples", 200,
        "--samples-csv", out / "train_x.csv", "--features-out", tmp_path / "feats.csv", "-o", tmp_path / "mc.json")
    feats = formats.read_csv(tmp_path / "feats.csv")
    assert feats.shape == (200, 30)
    labels = formats.read_labels(out / "train_y.csv")[:200]
    layers = train.train_head(feats, labels, units=100, classes=10, epochs=2, seed=0)
    formats.write_network(tmp_path / "head.json", layers, feats.shape[1])
    run("compress", out / "network.json", "--kind", "multiclass-simplified", "--terms", "3", "--samples", 200,
        "--samples-csv", out / "train_x.csv", "--head", tmp_path / "head.json", "-o", tmp_path / "mch.json")
    model = json.loads((tmp_path / "mch.json").read_text())
    assert model["param_count"] == 10 * 3 * 785 + 4110
    res = run("evaluate", tmp_path / "mch.json", "--samples-csv", out / "test_x.csv", "--labels", out / "test_y.csv")
    assert 0.0 <= res["error"] <= 1.0
