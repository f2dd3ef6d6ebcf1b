"""Training of toy MLP classifiers with plain full-batch gradient descent.

Deliberately minimal: deterministic given the seed, single-threaded, no
minibatching, no momentum.  The trained models exist to exercise the
attribution and evaluation machinery, not to be good classifiers.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, softmax

from .models import Head, Layer, Model, _act, _act_deriv, mlp_model


@dataclass
class FitResult:
    """Trained model plus final training loss and accuracy."""

    model: Model
    loss: float
    accuracy: float
    epochs: int


def _init_layers(rng, sizes, activation):
    layers = []
    for i, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
        w = rng.standard_normal((n_out, n_in)) / np.sqrt(n_in)
        b = np.zeros(n_out)
        act = activation if i < len(sizes) - 2 else "identity"
        layers.append([w, b, act])
    return layers


def fit_toy_model(
    X,
    y,
    hidden=(8,),
    activation: str = "tanh",
    epochs: int = 500,
    learning_rate: float = 0.5,
    seed: int = 0,
) -> FitResult:
    """Train a small MLP classifier by full-batch gradient descent.

    Binary labels {0, 1} give a single-logit model with a sigmoid head;
    labels {0..K-1} with K > 2 give K logits with a softmax head (target
    class 0 by default, re-targetable via the head).  Deterministic given
    the seed.  Non-convergence is not an error; the final loss is reported.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("dataset must be a nonempty (n, N) array")
    if X.shape[0] != y.size:
        raise ValueError("labels must match the number of samples")
    n, dim = X.shape
    n_classes = int(y.max()) + 1 if y.size else 0
    binary = n_classes <= 2
    out_dim = 1 if binary else n_classes

    rng = np.random.default_rng(seed)
    layers = _init_layers(rng, (dim, *hidden, out_dim), activation)
    onehot = None if binary else np.eye(n_classes)[y]
    yf = y.astype(float)

    loss = np.inf
    for _ in range(epochs):
        # forward
        acts = [X]
        pres = []
        a = X
        for w, b, act in layers:
            z = a @ w.T + b
            pres.append(z)
            a = _act(act, z)
            acts.append(a)
        logits = a
        # loss gradient on the logits (mean reduction)
        if binary:
            p = expit(logits[:, 0])
            eps = 1e-12
            loss = -np.mean(yf * np.log(p + eps) + (1 - yf) * np.log(1 - p + eps))
            delta = ((p - yf) / n)[:, None]
        else:
            probs = softmax(logits, axis=1)
            loss = -np.mean(np.log(probs[np.arange(n), y] + 1e-12))
            delta = (probs - onehot) / n
        # backward
        for idx in range(len(layers) - 1, -1, -1):
            w, b, act = layers[idx]
            dz = delta * _act_deriv(act, pres[idx])
            dw = dz.T @ acts[idx]
            db = dz.sum(axis=0)
            delta = dz @ w
            layers[idx][0] = w - learning_rate * dw
            layers[idx][1] = b - learning_rate * db

    head = Head("sigmoid") if binary else Head("softmax", target=0)
    model = mlp_model([Layer(w, b, act) for w, b, act in layers], head)
    acc = training_accuracy(model, X, y)
    return FitResult(model, float(loss), acc, epochs)


def training_accuracy(model: Model, X, y) -> float:
    """Fraction of samples the model classifies correctly."""
    from .models import _mlp_forward

    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    logits, _ = _mlp_forward(model.params, X)
    if model.head.type == "sigmoid":
        pred = (expit(logits[:, 0]) >= 0.5).astype(int)
    else:
        pred = logits.argmax(axis=1)
    return float(np.mean(pred == y))


# ---------------------------------------------------------------------------
# toy datasets and the CSV dataset format (last column = integer label)


def blob_dataset(
    n: int = 200, margin: float = 1.0, dim: int = 2, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Two linearly separable Gaussian blobs, separated by 2 * margin."""
    rng = np.random.default_rng(seed)
    half = n // 2
    shift = np.full(dim, margin / np.sqrt(dim))
    x0 = rng.standard_normal((half, dim)) * 0.4 - shift
    x1 = rng.standard_normal((n - half, dim)) * 0.4 + shift
    X = np.vstack([x0, x1])
    y = np.concatenate([np.zeros(half, dtype=int), np.ones(n - half, dtype=int)])
    perm = rng.permutation(n)
    return X[perm], y[perm]


def linear_rule_dataset(
    weights, n: int = 400, seed: int = 0, margin: float = 0.2
) -> tuple[np.ndarray, np.ndarray]:
    """Points labeled by sign(w . x), with a margin band removed.

    The generating weight vector doubles as the ground-truth feature
    relevance in evaluation-harness tests.
    """
    w = np.asarray(weights, dtype=float)
    rng = np.random.default_rng(seed)
    X = []
    while len(X) < n:
        batch = rng.standard_normal((2 * n, w.size))
        score = batch @ w
        keep = np.abs(score) > margin * np.linalg.norm(w)
        X.extend(batch[keep])
    X = np.asarray(X[:n])
    y = (X @ w > 0).astype(int)
    return X, y


def load_dataset_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a labeled dataset: one row per sample, last column integer label."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or all(not cell.strip() for cell in rec):
                continue
            rows.append([float(cell) for cell in rec])
    if not rows:
        raise ValueError("dataset CSV is empty")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths == {1}:
        raise ValueError("dataset CSV rows must all have the same width >= 2")
    data = np.asarray(rows, dtype=float)
    labels = data[:, -1]
    if not np.all(labels == np.round(labels)):
        raise ValueError("last dataset column must hold integer labels")
    return data[:, :-1], labels.astype(int)


def save_dataset_csv(path, X, y) -> None:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row, label in zip(X, y):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
