"""One-hidden-layer ReLU classifiers and the small head network."""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from . import data, formats


class MLP(nn.Module):
    def __init__(self, n, hidden, classes):
        super().__init__()
        self.hidden = nn.Linear(n, hidden)
        self.out = nn.Linear(hidden, classes)

    def forward(self, x):
        return self.out(torch.relu(self.hidden(x)))


def to_layers(model):
    return [
        (model.hidden.weight.detach().double().numpy(), model.hidden.bias.detach().double().numpy(), "relu"),
        (model.out.weight.detach().double().numpy(), model.out.bias.detach().double().numpy(), "linear"),
    ]


def fit(model, x, y, epochs, seed, batch_size=128, lr=1e-3):
    """Adam on cross-entropy with seeded shuffling."""
    gen = torch.Generator().manual_seed(seed)
    xt = torch.as_tensor(x, dtype=torch.float32)
    yt = torch.as_tensor(y, dtype=torch.int64)
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    loss_fn = nn.CrossEntropyLoss()
    model.train()
    for _ in range(epochs):
        perm = torch.randperm(len(xt), generator=gen)
        for i in range(0, len(xt), batch_size):
            idx = perm[i : i + batch_size]
            opt.zero_grad()
            loss_fn(model(xt[idx]), yt[idx]).backward()
            opt.step()
    model.eval()
    return model


def error_rate(layers, x, y):
    return float(np.mean(np.argmax(formats.forward(layers, x), axis=1) != y))


@dataclass
class MnistConfig:
    out_dir: str
    epochs: int = 10
    hidden: int = 100
    seed: int = 0
    synthetic: bool = False
    data_dir: str = "data/mnist"
    train_rows: int = 1000
    test_rows: int = 2000
    synthetic_train: int = 6000
    synthetic_test: int = 2000


def make_model(n, hidden, classes, seed):
    torch.manual_seed(seed)
    return MLP(n, hidden, classes)


def write_bundle(cfg, model, x_train, y_train, x_test, y_test, source):
    """network.json, train/test CSVs (first rows only), manifest.json and model.pt."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    layers = to_layers(model)
    formats.write_network(out / "network.json", layers, x_train.shape[1])
    formats.write_csv(out / "train_x.csv", x_train[: cfg.train_rows])
    formats.write_labels(out / "train_y.csv", y_train[: cfg.train_rows])
    formats.write_csv(out / "test_x.csv", x_test[: cfg.test_rows])
    formats.write_labels(out / "test_y.csv", y_test[: cfg.test_rows])
    torch.save(
        {"state_dict": model.state_dict(), "input_dim": x_train.shape[1], "hidden": cfg.hidden,
         "classes": int(model.out.out_features)},
        out / "model.pt",
    )
    manifest = {
        "source": source,
        "config": asdict(cfg),
        "train_rows_total": int(len(x_train)),
        "test_rows_total": int(len(x_test)),
        "train_rows_exported": int(min(cfg.train_rows, len(x_train))),
        "test_rows_exported": int(min(cfg.test_rows, len(x_test))),
        "test_error": error_rate(layers, x_test, y_test),
        "params": formats.count_params(layers),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def train_mnist(cfg):
    if cfg.synthetic:
        xtr, ytr, xte, yte = data.synthetic_digits(cfg.synthetic_train, cfg.synthetic_test, seed=cfg.seed)
        source = "synthetic"
    else:
        xtr, ytr, xte, yte = data.load_mnist(cfg.data_dir)
        source = "mnist"
    model = make_model(xtr.shape[1], cfg.hidden, 10, cfg.seed)
    fit(model, xtr, ytr, cfg.epochs, cfg.seed)
    return write_bundle(cfg, model, xtr, ytr, xte, yte, source)


def head_params(inputs, units, classes):
    return inputs * units + units + units * classes + classes


def train_head(features, labels, units=100, classes=None, epochs=20, seed=0):
    """Small ReLU net on quotient features; returns its layers."""
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    k = int(classes if classes is not None else y.max() + 1)
    model = make_model(x.shape[1], units, k, seed)
    fit(model, x, y, epochs, seed)
    return to_layers(model)


def export_checkpoint(checkpoint, out_path):
    """Rewrites a saved model.pt as network JSON."""
    ck = torch.load(checkpoint, map_location="cpu", weights_only=True)
    model = MLP(ck["input_dim"], ck["hidden"], ck["classes"])
    model.load_state_dict(ck["state_dict"])
    layers = to_layers(model)
    formats.write_network(out_path, layers, ck["input_dim"])
    return layers
