"""Deletion/insertion evaluation of attribution maps.

Features are ranked by their attribution scores and progressively replaced
(deletion) or restored (insertion) while the model output is tracked; the
area under the resulting fraction/score curve summarizes how quickly the
explanation's top features move the prediction.  Lower deletion AUC and
higher insertion AUC are better; their difference neutralizes the
distribution shift both curves share.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import uniform_filter

from .attribution import AttributionMap
from .baselines import (
    IgConfig,
    SmoothGradConfig,
    integrated_gradients,
    random_attribution,
    saliency,
    smoothgrad,
)
from .errors import DimensionMismatch, FluxgradError
from .models import Model, evaluate_batch
from .neflag import NeflagConfig, SphereSpec, neflag_attribute, sample_sphere, taylor_heatmap

REPLACEMENTS = ("black", "mean", "blur")


@dataclass(frozen=True)
class EvalConfig:
    """Curve construction knobs.

    ``replacement`` selects the substitute for removed features: zeros
    ("black"), the input's mean value, or an iterated box blur (grid
    inputs only; non-grid inputs silently fall back to mean for the blur
    round).  ``features_per_step`` controls the curve granularity and
    ``absolute`` switches the ranking to absolute attribution values.
    """

    replacement: str = "black"
    features_per_step: int = 1
    absolute: bool = False
    grid: tuple[int, int] | None = None
    blur_radius: int = 1

    def __post_init__(self):
        if self.replacement not in REPLACEMENTS:
            raise ValueError(f"unknown replacement {self.replacement!r}")
        if self.features_per_step < 1:
            raise ValueError("features_per_step must be >= 1")
        if self.blur_radius < 1:
            raise ValueError("blur_radius must be >= 1")


@dataclass(frozen=True, eq=False)
class EvalCurve:
    """Ordered (fraction replaced, model score) pairs with trapezoid AUC."""

    fractions: np.ndarray
    scores: np.ndarray
    auc: float

    def __post_init__(self):
        for name in ("fractions", "scores"):
            a = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=float))
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.fractions[0] != 0.0 or self.fractions[-1] != 1.0:
            raise ValueError("fractions must run from 0 to 1")
        if np.any(np.diff(self.fractions) <= 0):
            raise ValueError("fractions must be strictly increasing")


def feature_order(attribution: AttributionMap, absolute: bool = False) -> np.ndarray:
    """Feature indices in descending attribution order, ties by index."""
    vals = np.abs(attribution.values) if absolute else attribution.values
    return np.argsort(-vals, kind="stable")


def replacement_input(x, cfg: EvalConfig) -> np.ndarray:
    """The fully-replaced version of x under the configured mode."""
    x = np.asarray(x, dtype=float)
    if cfg.replacement == "black":
        return np.zeros_like(x)
    if cfg.replacement == "blur" and cfg.grid is not None:
        h, w = cfg.grid
        if h * w != x.size:
            raise DimensionMismatch(f"grid {h}x{w} does not match {x.size} features")
        img = x.reshape(h, w)
        for _ in range(3):
            img = uniform_filter(img, size=2 * cfg.blur_radius + 1, mode="nearest")
        return img.ravel()
    return np.full_like(x, x.mean())


def _curves_inputs(x, attribution, cfg, start, target):
    """Rows of progressively-replaced inputs, shared by both curves."""
    order = feature_order(attribution, cfg.absolute)
    n = x.size
    counts = list(range(0, n, cfg.features_per_step)) + [n]
    counts = sorted(set(counts))
    rows = np.tile(start, (len(counts), 1))
    for i, k in enumerate(counts):
        idx = order[:k]
        rows[i, idx] = target[idx]
    fractions = np.asarray(counts, dtype=float) / n
    return fractions, rows


def deletion_curve(model: Model, x, attribution: AttributionMap, cfg: EvalConfig = EvalConfig()) -> EvalCurve:
    """Model score as top-attributed features are replaced, best first."""
    x = np.asarray(x, dtype=float)
    if x.size != len(attribution) or x.size != model.dim:
        raise DimensionMismatch("input, attribution, and model dimensions must agree")
    repl = replacement_input(x, cfg)
    fractions, rows = _curves_inputs(x, attribution, cfg, start=x, target=repl)
    scores = evaluate_batch(model, rows)
    return EvalCurve(fractions, scores, float(np.trapezoid(scores, fractions)))


def insertion_curve(model: Model, x, attribution: AttributionMap, cfg: EvalConfig = EvalConfig()) -> EvalCurve:
    """Model score as original features are restored into the replaced input."""
    x = np.asarray(x, dtype=float)
    if x.size != len(attribution) or x.size != model.dim:
        raise DimensionMismatch("input, attribution, and model dimensions must agree")
    repl = replacement_input(x, cfg)
    fractions, rows = _curves_inputs(x, attribution, cfg, start=repl, target=x)
    scores = evaluate_batch(model, rows)
    return EvalCurve(fractions, scores, float(np.trapezoid(scores, fractions)))


def difference_score(model: Model, x, attribution: AttributionMap, cfg: EvalConfig = EvalConfig()) -> float:
    """Insertion AUC minus deletion AUC under the same replacement mode."""
    ins = insertion_curve(model, x, attribution, cfg)
    dele = deletion_curve(model, x, attribution, cfg)
    return ins.auc - dele.auc


def two_round_difference(
    model: Model, x, attribution: AttributionMap, cfg: EvalConfig = EvalConfig()
) -> float:
    """Mean difference score over the black round and the blur/mean round."""
    rounds = []
    for repl in ("black", "blur" if cfg.grid is not None else "mean"):
        round_cfg = EvalConfig(
            repl, cfg.features_per_step, cfg.absolute, cfg.grid, cfg.blur_radius
        )
        rounds.append(difference_score(model, x, attribution, round_cfg))
    return float(np.mean(rounds))


# ---------------------------------------------------------------------------
# multi-method benchmark


def make_method(name: str, **params):
    """Attribution method by id as a callable (model, x, seed) -> AttributionMap.

    Known ids: neflag, ig, smoothgrad, saliency, taylor, random.  ``seed``
    overrides any seed baked into params, so the benchmark can derive
    per-sample seeds.
    """
    if name == "neflag":
        def run(model, x, seed):
            cfg = NeflagConfig(**{**params, "seed": seed})
            return neflag_attribute(model, x, cfg)
    elif name == "ig":
        def run(model, x, seed):
            return integrated_gradients(model, x, IgConfig(**params))
    elif name == "smoothgrad":
        def run(model, x, seed):
            cfg = SmoothGradConfig(**{**params, "seed": seed})
            return smoothgrad(model, x, cfg)
    elif name == "saliency":
        def run(model, x, seed):
            return saliency(model, x)
    elif name == "taylor":
        epsilon = params.get("epsilon", 0.1)

        def run(model, x, seed):
            point = sample_sphere(SphereSpec(np.asarray(x, dtype=float), epsilon), seed)
            return taylor_heatmap(model, x, point)
    elif name == "random":
        def run(model, x, seed):
            return random_attribution(model, x, seed)
    else:
        raise ValueError(f"unknown attribution method {name!r}")
    run.__name__ = name
    return run


@dataclass(frozen=True)
class MethodResult:
    """Per-method aggregate of the benchmark."""

    method: str
    deletion_mean: float
    deletion_se: float
    insertion_mean: float
    insertion_se: float
    difference_mean: float
    difference_se: float
    samples_ok: int
    samples_failed: int


@dataclass(frozen=True)
class BenchmarkReport:
    results: tuple
    replacement: str
    seed: int

    def to_json(self) -> dict:
        return {
            "replacement": self.replacement,
            "seed": self.seed,
            "methods": [vars(r) for r in self.results],
        }

    def json_str(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def csv_str(self) -> str:
        lines = [
            "method,deletion_mean,deletion_se,insertion_mean,insertion_se,"
            "difference_mean,difference_se,samples_ok,samples_failed"
        ]
        for r in self.results:
            lines.append(
                f"{r.method},{r.deletion_mean!r},{r.deletion_se!r},"
                f"{r.insertion_mean!r},{r.insertion_se!r},"
                f"{r.difference_mean!r},{r.difference_se!r},"
                f"{r.samples_ok},{r.samples_failed}"
            )
        return "\n".join(lines) + "\n"


def _worker_count() -> int:
    env = os.environ.get("FLUXGRAD_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _sample_seed(master: int, method_idx: int, sample_idx: int) -> int:
    ss = np.random.SeedSequence(entropy=master, spawn_key=(method_idx, sample_idx))
    return int(ss.generate_state(1)[0])


def benchmark(
    model: Model,
    inputs,
    methods: dict,
    cfg: EvalConfig = EvalConfig(),
    seed: int = 0,
    threads: int | None = None,
) -> BenchmarkReport:
    """Deletion/insertion table over a list of inputs and named methods.

    ``methods`` maps method id -> callable (model, x, seed).  Per-sample
    seeds are derived counter-style from the master seed, and results are
    reduced in (method, sample) order, so the table is identical for any
    worker count.  Per-sample attribution failures are counted, not fatal.
    """
    inputs = [np.asarray(x, dtype=float) for x in inputs]
    if not inputs or not methods:
        raise ValueError("benchmark needs at least one input and one method")
    threads = _worker_count() if threads is None else max(1, threads)

    def one(args):
        mi, fn, xi, x = args
        try:
            attr = fn(model, x, _sample_seed(seed, mi, xi))
            dele = deletion_curve(model, x, attr, cfg).auc
            ins = insertion_curve(model, x, attr, cfg).auc
            diff = two_round_difference(model, x, attr, cfg)
            return (dele, ins, diff)
        except FluxgradError:
            return None

    jobs = [
        (mi, fn, xi, x)
        for mi, fn in enumerate(methods.values())
        for xi, x in enumerate(inputs)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, jobs))
    else:
        outcomes = [one(j) for j in jobs]

    results = []
    per_method = len(inputs)
    for mi, name in enumerate(methods):
        chunk = outcomes[mi * per_method : (mi + 1) * per_method]
        ok = [c for c in chunk if c is not None]
        failed = len(chunk) - len(ok)
        if ok:
            arr = np.asarray(ok)  # columns: deletion, insertion, difference
            means = arr.mean(axis=0)
            ses = (
                arr.std(axis=0, ddof=1) / np.sqrt(len(ok))
                if len(ok) > 1
                else np.zeros(3)
            )
        else:
            means = ses = np.full(3, np.nan)
        results.append(
            MethodResult(
                name,
                float(means[0]),
                float(ses[0]),
                float(means[1]),
                float(ses[1]),
                float(means[2]),
                float(ses[2]),
                len(ok),
                failed,
            )
        )
    return BenchmarkReport(tuple(results), cfg.replacement, seed)
