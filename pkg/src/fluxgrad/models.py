"""Differentiable scalar-valued models with value and gradient oracles.

Four model kinds are supported:

* ``linear``        -- f(x) = a . x + b
* ``quadratic``     -- f(x) = 1/2 sum_i lambda_i (x_i - c_i)^2
* ``gauss-mixture`` -- f(x) = sum_j w_j exp(-|x - mu_j|^2 / (2 sigma_j^2))
* ``mlp``           -- a small fully-connected network with hand-written
  backpropagation (relu / tanh / softplus / identity layers)

Each model carries a *head* that turns the raw output into the scalar being
explained: identity, sigmoid, or (for multi-logit MLPs) the softmax
probability of a target class.  The post-softmax probability is the default
explained quantity; the pre-softmax logit can be selected instead.

All models are immutable after construction and safe to share across
threads.  Evaluation and gradients are vectorized internally; the public
``evaluate`` / ``gradient`` functions work on single points, and the
``evaluate_batch`` / ``gradient_batch`` variants on (n, N) arrays.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, softmax

from .errors import DimensionMismatch, NonFiniteInput

ACTIVATIONS = ("relu", "tanh", "softplus", "identity")
HEADS = ("identity", "sigmoid", "softmax")
KINDS = ("linear", "quadratic", "gauss-mixture", "mlp")


def _act(name, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh(z)
    if name == "softplus":
        return np.logaddexp(0.0, z)
    return z


def _act_deriv(name, z):
    if name == "relu":
        return (z > 0.0).astype(float)
    if name == "tanh":
        return 1.0 - np.tanh(z) ** 2
    if name == "softplus":
        return expit(z)
    return np.ones_like(z)


def _readonly(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Head:
    """Output head: identity, sigmoid, or softmax over K logits.

    For softmax heads ``target`` selects the class whose probability is
    explained; ``use_logit`` switches to the pre-softmax logit instead.
    """

    type: str = "identity"
    target: int | None = None
    use_logit: bool = False

    def __post_init__(self):
        if self.type not in HEADS:
            raise ValueError(f"unknown head type {self.type!r}")
        if self.type == "softmax" and self.target is None:
            raise ValueError("softmax head requires a target index")


@dataclass(frozen=True, eq=False)
class LinearParams:
    a: np.ndarray
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", _readonly(self.a))
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True, eq=False)
class QuadraticParams:
    lam: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lam", _readonly(self.lam))
        object.__setattr__(self, "c", _readonly(self.c))
        if self.lam.shape != self.c.shape:
            raise ValueError("lambda and center must have the same length")


@dataclass(frozen=True, eq=False)
class GaussMixtureParams:
    """Isotropic Gaussian bumps: weights, centers (rows), and widths."""

    weights: np.ndarray
    centers: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _readonly(self.weights))
        object.__setattr__(self, "centers", _readonly(np.atleast_2d(self.centers)))
        object.__setattr__(self, "sigmas", _readonly(self.sigmas))
        k = self.weights.size
        if self.centers.shape[0] != k or self.sigmas.size != k:
            raise ValueError("component counts disagree")
        if np.any(self.sigmas <= 0):
            raise ValueError("sigmas must be positive")


@dataclass(frozen=True, eq=False)
class Layer:
    weight: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str = "identity"

    def __post_init__(self):
        object.__setattr__(self, "weight", _readonly(np.atleast_2d(self.weight)))
        object.__setattr__(self, "bias", _readonly(self.bias))
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weight.shape[0] != self.bias.size:
            raise ValueError("bias length must match layer output size")


@dataclass(frozen=True, eq=False)
class MlpParams:
    layers: tuple

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers:
            raise ValueError("mlp needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if nxt.weight.shape[1] != prev.weight.shape[0]:
                raise ValueError("layer shapes do not chain")

    @property
    def out_dim(self) -> int:
        return self.layers[-1].weight.shape[0]

    @property
    def in_dim(self) -> int:
        return self.layers[0].weight.shape[1]


@dataclass(frozen=True, eq=False)
class Model:
    """A scalar-valued differentiable function f: R^N -> R."""

    kind: str
    dim: int
    params: object
    head: Head = field(default_factory=Head)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        k = self.out_dim
        if self.head.type == "softmax":
            if self.kind != "mlp" or k < 2:
                raise ValueError("softmax head requires an mlp with >= 2 logits")
            if not 0 <= self.head.target < k:
                raise ValueError("softmax target out of range")
        elif k != 1:
            raise ValueError(f"{self.head.type} head requires a single raw output")
        if self.kind == "mlp" and self.params.in_dim != self.dim:
            raise ValueError("mlp input size must match model dimension")

    @property
    def out_dim(self) -> int:
        return self.params.out_dim if self.kind == "mlp" else 1

    @property
    def uses_relu(self) -> bool:
        return self.kind == "mlp" and any(
            layer.activation == "relu" for layer in self.params.layers
        )

    def __call__(self, x):
        return evaluate(self, x)


# ---------------------------------------------------------------------------
# evaluation and gradients


def _check_batch(model: Model, xs) -> np.ndarray:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != model.dim:
        raise DimensionMismatch(
            f"expected vectors of length {model.dim}, got {xs.shape[1]}"
        )
    if not np.all(np.isfinite(xs)):
        raise NonFiniteInput("input contains non-finite components")
    return xs


def _mlp_forward(params: MlpParams, xs):
    """Forward pass; returns logits and per-layer pre-activations."""
    pre = []
    a = xs
    for layer in params.layers:
        z = a @ layer.weight.T + layer.bias
        pre.append(z)
        a = _act(layer.activation, z)
    return a, pre


def _mlp_input_grad(params: MlpParams, xs, cotangent):
    """Backpropagate a (n, K) cotangent on the logits to the inputs."""
    _, pre = _mlp_forward(params, xs)
    delta = cotangent
    for layer, z in zip(reversed(params.layers), reversed(pre)):
        delta = (delta * _act_deriv(layer.activation, z)) @ layer.weight
    return delta


def _raw_batch(model: Model, xs):
    """Raw output before the head: (n,) scalar kinds, (n, K) for mlp."""
    p = model.params
    if model.kind == "linear":
        return xs @ p.a + p.b
    if model.kind == "quadratic":
        return 0.5 * np.sum(p.lam * (xs - p.c) ** 2, axis=1)
    if model.kind == "gauss-mixture":
        d2 = ((xs[:, None, :] - p.centers[None, :, :]) ** 2).sum(axis=2)
        return np.sum(p.weights * np.exp(-d2 / (2.0 * p.sigmas**2)), axis=1)
    logits, _ = _mlp_forward(p, xs)
    return logits


def _raw_grad_batch(model: Model, xs, cotangent):
    """Gradient of (cotangent . raw output) w.r.t. the inputs, per row."""
    p = model.params
    if model.kind == "mlp":
        return _mlp_input_grad(p, xs, cotangent)
    scale = cotangent[:, 0][:, None]
    if model.kind == "linear":
        return scale * p.a
    if model.kind == "quadratic":
        return scale * (p.lam * (xs - p.c))
    d = xs[:, None, :] - p.centers[None, :, :]
    d2 = (d**2).sum(axis=2)
    coef = p.weights * np.exp(-d2 / (2.0 * p.sigmas**2)) / p.sigmas**2
    return scale * -(coef[:, :, None] * d).sum(axis=1)


def evaluate_batch(model: Model, xs) -> np.ndarray:
    """Model output after the head for every row of xs; shape (n,)."""
    xs = _check_batch(model, xs)
    raw = _raw_batch(model, xs)
    h = model.head
    if model.kind != "mlp":
        raw = raw[:, None]
    if h.type == "identity":
        return raw[:, 0]
    if h.type == "sigmoid":
        return expit(raw[:, 0])
    if h.use_logit:
        return raw[:, h.target]
    return softmax(raw, axis=1)[:, h.target]


def gradient_batch(model: Model, xs) -> np.ndarray:
    """Gradient of the headed output for every row of xs; shape (n, N)."""
    xs = _check_batch(model, xs)
    raw = _raw_batch(model, xs)
    h = model.head
    if model.kind != "mlp":
        raw = raw[:, None]
    if h.type == "identity":
        cot = np.ones_like(raw)
    elif h.type == "sigmoid":
        s = expit(raw[:, 0])
        cot = (s * (1.0 - s))[:, None]
    elif h.use_logit:
        cot = np.zeros_like(raw)
        cot[:, h.target] = 1.0
    else:
        probs = softmax(raw, axis=1)
        pt = probs[:, h.target]
        cot = -pt[:, None] * probs
        cot[:, h.target] += pt
    return _raw_grad_batch(model, xs, cot)


def evaluate(model: Model, x) -> float:
    """f(x) after the head."""
    return float(evaluate_batch(model, np.asarray(x, dtype=float)[None, :])[0])


def gradient(model: Model, x) -> np.ndarray:
    """Analytic gradient of f at x, including the head chain rule."""
    return gradient_batch(model, np.asarray(x, dtype=float)[None, :])[0]


def fd_gradient(model: Model, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient estimate, the independent oracle.

    (f(x + h e_i) - f(x - h e_i)) / (2 h) per coordinate.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    x = np.asarray(x, dtype=float)
    eye = np.eye(x.size) * h
    plus = evaluate_batch(model, x + eye)
    minus = evaluate_batch(model, x - eye)
    return (plus - minus) / (2.0 * h)


# ---------------------------------------------------------------------------
# convenient constructors


def linear_model(a, b=0.0, head=Head()) -> Model:
    a = np.asarray(a, dtype=float)
    return Model("linear", a.size, LinearParams(a, b), head)


def quadratic_model(lam, c=None, head=Head()) -> Model:
    lam = np.asarray(lam, dtype=float)
    if c is None:
        c = np.zeros_like(lam)
    return Model("quadratic", lam.size, QuadraticParams(lam, c), head)


def gauss_bump(dim: int, center=None, sigma=1.0, weight=1.0, head=Head()) -> Model:
    """Single Gaussian bump w * exp(-|x - mu|^2 / (2 sigma^2))."""
    if center is None:
        center = np.zeros(dim)
    params = GaussMixtureParams([weight], np.asarray(center)[None, :], [sigma])
    return Model("gauss-mixture", dim, params, head)


def gauss_mixture_model(weights, centers, sigmas, head=Head()) -> Model:
    params = GaussMixtureParams(weights, centers, sigmas)
    return Model("gauss-mixture", params.centers.shape[1], params, head)


def mlp_model(layers, head=Head()) -> Model:
    params = MlpParams(tuple(layers))
    return Model("mlp", params.in_dim, params, head)


def random_mlp(
    dim: int,
    hidden=(8,),
    out_dim: int = 1,
    activation: str = "softplus",
    seed: int = 0,
    head=Head(),
) -> Model:
    """Small randomly initialized MLP (hidden activation, linear output)."""
    rng = np.random.default_rng(seed)
    sizes = (dim, *hidden, out_dim)
    layers = []
    for i, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
        w = rng.standard_normal((n_out, n_in)) / np.sqrt(n_in)
        b = rng.standard_normal(n_out) * 0.1
        act = activation if i < len(sizes) - 2 else "identity"
        layers.append(Layer(w, b, act))
    return mlp_model(layers, head)


# ---------------------------------------------------------------------------
# JSON serialization


def _head_to_json(head: Head) -> dict:
    out = {"type": head.type}
    if head.target is not None:
        out["target"] = head.target
    if head.use_logit:
        out["logit"] = True
    return out


def model_to_json(model: Model) -> dict:
    """Model as a plain JSON-serializable document."""
    p = model.params
    if model.kind == "linear":
        params = {"a": p.a.tolist(), "b": p.b}
    elif model.kind == "quadratic":
        params = {"lambda": p.lam.tolist(), "c": p.c.tolist()}
    elif model.kind == "gauss-mixture":
        params = {
            "components": [
                {"weight": float(w), "center": c.tolist(), "sigma": float(s)}
                for w, c, s in zip(p.weights, p.centers, p.sigmas)
            ]
        }
    else:
        params = {
            "layers": [
                {
                    "W": layer.weight.tolist(),
                    "b": layer.bias.tolist(),
                    "activation": layer.activation,
                }
                for layer in p.layers
            ],
            "out_dim": p.out_dim,
        }
    return {
        "kind": model.kind,
        "dim": model.dim,
        "head": _head_to_json(model.head),
        "params": params,
    }


def model_from_json(doc: dict) -> Model:
    """Inverse of :func:`model_to_json`."""
    hd = doc.get("head", {"type": "identity"})
    head = Head(hd["type"], hd.get("target"), bool(hd.get("logit", False)))
    kind = doc["kind"]
    params = doc["params"]
    if kind == "linear":
        return linear_model(params["a"], params.get("b", 0.0), head)
    if kind == "quadratic":
        return quadratic_model(params["lambda"], params["c"], head)
    if kind == "gauss-mixture":
        comps = params["components"]
        return gauss_mixture_model(
            [c["weight"] for c in comps],
            np.array([c["center"] for c in comps]),
            [c["sigma"] for c in comps],
            head,
        )
    if kind == "mlp":
        layers = [
            Layer(np.array(s["W"]), np.array(s["b"]), s["activation"])
            for s in params["layers"]
        ]
        return mlp_model(layers, head)
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model: Model, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_json(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> Model:
    with open(path) as fh:
        return model_from_json(json.load(fh))
