"""Network JSON and sample/label CSV files shared with the C++ tools.

Network: {"input_dim": n, "layers": [{"W": [[...]], "b": [...], "activation": "relu"|"linear"}]}
with W stored out x in.  Samples: one row per sample, no header.  Labels: one integer per row.
"""

import json
from pathlib import Path

import numpy as np

ACTIVATIONS = ("relu", "linear")


def network_dict(layers, input_dim):
    """layers: list of (W, b, activation) with W of shape (out, in)."""
    out = []
    width = input_dim
    for W, b, act in layers:
        W = np.asarray(W, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if W.shape[1] != width:
            raise ValueError(f"layer expects {W.shape[1]} inputs, previous width is {width}")
        if b.shape != (W.shape[0],):
            raise ValueError("bias length mismatch")
        if act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {act}")
        out.append({"W": W.tolist(), "b": b.tolist(), "activation": act})
        width = W.shape[0]
    if out[-1]["activation"] != "linear":
        raise ValueError("last layer must be linear")
    return {"input_dim": int(input_dim), "layers": out}


def write_network(path, layers, input_dim):
    Path(path).write_text(json.dumps(network_dict(layers, input_dim)) + "\n")


def parse_network(d):
    layers = []
    width = int(d["input_dim"])
    for layer in d["layers"]:
        W = np.asarray(layer["W"], dtype=np.float64).reshape(len(layer["W"]), -1)
        b = np.asarray(layer["b"], dtype=np.float64)
        act = layer.get("activation", "linear")
        if W.shape[1] != width or b.shape != (W.shape[0],) or act not in ACTIVATIONS:
            raise ValueError("malformed network layer")
        layers.append((W, b, act))
        width = W.shape[0]
    return layers, int(d["input_dim"])


def read_network(path):
    return parse_network(json.loads(Path(path).read_text()))


def forward(layers, x):
    """Pre-softmax outputs for a batch x of shape (rows, n)."""
    h = np.atleast_2d(np.asarray(x, dtype=np.float64))
    for W, b, act in layers:
        h = h @ W.T + b
        if act == "relu":
            h = np.maximum(h, 0.0)
    return h


def count_params(layers):
    return int(sum(W.size + b.size for W, b, _ in layers))


def write_csv(path, rows):
    np.savetxt(path, np.atleast_2d(np.asarray(rows, dtype=np.float64)), delimiter=",", fmt="%.17g")


def read_csv(path):
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2))


def write_labels(path, labels):
    np.savetxt(path, np.asarray(labels, dtype=np.int64).reshape(-1, 1), fmt="%d")


def read_labels(path):
    return np.loadtxt(path, dtype=np.int64, ndmin=1).reshape(-1)
