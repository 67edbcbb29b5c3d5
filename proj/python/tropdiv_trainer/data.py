"""Datasets: MNIST from a local torchvision directory, or a synthetic stand-in."""

from pathlib import Path

import numpy as np


def load_mnist(data_dir):
    """Flattened MNIST in [0, 1]; nothing is downloaded."""
    try:
        from torchvision.datasets import MNIST
    except ImportError as e:  # pragma: no cover
        raise RuntimeError("torchvision is needed to read MNIST") from e
    root = Path(data_dir)
    try:
        train = MNIST(root, train=True, download=False)
        test = MNIST(root, train=False, download=False)
    except RuntimeError as e:
        raise FileNotFoundError(f"no MNIST files under {root}; pass --synthetic to use generated data") from e

    def flat(ds):
        x = ds.data.numpy().reshape(len(ds), -1).astype(np.float64) / 255.0
        return x, ds.targets.numpy().astype(np.int64)

    return (*flat(train), *flat(test))


def synthetic_digits(n_train, n_test, dim=784, classes=10, noise=0.6, seed=0):
    """Noisy copies of sparse class prototypes, clipped to [0, 1]."""
    rng = np.random.default_rng(seed)
    protos = rng.uniform(0.0, 1.0, size=(classes, dim)) * (rng.uniform(size=(classes, dim)) < 0.2)

    def draw(count):
        y = rng.integers(0, classes, size=count)
        x = np.clip(protos[y] + noise * rng.standard_normal((count, dim)) * 0.5, 0.0, 1.0)
        return x, y.astype(np.int64)

    return (*draw(n_train), *draw(n_test))
