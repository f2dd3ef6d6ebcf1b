"""Command-line surface: attribute inputs, verify the flux math, run
deletion/insertion benchmarks, and train toy models.

Exit codes: 0 success, 2 usage or parse failure, 3 no negative flux found,
4 divergence-theorem verification failure, 5 no sample succeeded.
"""

import argparse
import sys

import numpy as np

from . import evalkit
from .baselines import IgConfig, ig_completeness_gap, integrated_gradients
from .divergence import divergence_theorem_report
from .errors import FluxgradError, NoNegativeFlux, NotSmooth
from .models import evaluate, load_model, save_model
from .neflag import NeflagConfig, SphereSpec
from .train import fit_toy_model, load_dataset_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_NEGATIVE_FLUX = 3
EXIT_VERIFY_FAIL = 4
EXIT_EMPTY = 5

METHODS = ("neflag", "ig", "smoothgrad", "saliency", "taylor", "random")


class CliError(Exception):
    """Fatal usage or parse problem; message names the offending field."""


def _load_vector(path) -> np.ndarray:
    try:
        text = open(path).read()
    except OSError as exc:
        raise CliError(f"input: cannot read {path}: {exc}") from exc
    try:
        vals = [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise CliError(f"input: {path} is not a flat list of numbers") from exc
    if not vals:
        raise CliError(f"input: {path} holds no numbers")
    return np.asarray(vals)


def _load_model_arg(path):
    try:
        return load_model(path)
    except OSError as exc:
        raise CliError(f"model: cannot read {path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"model: {path} is not a valid model file: {exc}") from exc


def _parse_grid(text):
    if text is None:
        return None
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError as exc:
        raise CliError(f"grid: expected HxW, got {text!r}") from exc


def _method_fn(args):
    name = args.method
    if name == "neflag":
        return evalkit.make_method(
            name,
            epsilon=args.epsilon,
            n_samples=args.samples,
            max_steps=args.steps,
            step_rule=args.step_rule,
        )
    if name == "ig":
        baseline = _load_vector(args.baseline) if args.baseline else None
        return evalkit.make_method(name, steps=args.steps, baseline=baseline)
    if name == "smoothgrad":
        return evalkit.make_method(name, sigma=args.sigma, samples=args.samples)
    if name == "taylor":
        return evalkit.make_method(name, epsilon=args.epsilon)
    return evalkit.make_method(name)


def cmd_attribute(args) -> int:
    model = _load_model_arg(args.model)
    x = _load_vector(args.input)
    grid = _parse_grid(args.grid)
    try:
        attr = _method_fn(args)(model, x, args.seed)
    except NoNegativeFlux as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_NEGATIVE_FLUX
    doc = attr.to_json()
    if args.method == "ig":
        baseline = _load_vector(args.baseline) if args.baseline else np.zeros_like(x)
        gap = ig_completeness_gap(model, x, attr, baseline)
        doc["completeness"] = {
            "attribution_sum": float(attr.values.sum()),
            "delta_f": float(evaluate(model, x) - evaluate(model, baseline)),
            "gap": gap,
        }
    import json

    with open(args.out + ".json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(args.out + ".csv", "w") as fh:
        fh.write(attr.csv_str())
    if grid is not None:
        with open(args.out + ".pgm", "w") as fh:
            fh.write(attr.pgm_str(grid))
    print(f"wrote {args.out}.json")
    return EXIT_OK


def cmd_verify(args) -> int:
    model = _load_model_arg(args.model)
    x = _load_vector(args.input) if args.input else np.zeros(model.dim)
    if x.size != model.dim:
        raise CliError(f"input: length {x.size} does not match model dim {model.dim}")
    try:
        report = divergence_theorem_report(
            model, SphereSpec(x, args.epsilon), samples=args.samples, seed=args.seed
        )
    except NotSmooth as exc:
        print(f"error: model {exc}", file=sys.stderr)
        return EXIT_USAGE
    with open(args.out, "w") as fh:
        fh.write(report.json_str())
    verdict = "PASS" if report.passed else "FAIL"
    print(
        f"{verdict}: lhs={report.volume_integral:.6g} rhs={report.surface_integral:.6g}"
        f" diff={report.difference:.3g} stderr={report.combined_standard_error:.3g}"
    )
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def cmd_eval(args) -> int:
    model = _load_model_arg(args.model)
    try:
        X, _ = load_dataset_csv(args.input)
    except (OSError, ValueError) as exc:
        raise CliError(f"input: {exc}") from exc
    if X.shape[1] != model.dim:
        raise CliError(
            f"input: dataset width {X.shape[1]} does not match model dim {model.dim}"
        )
    if args.limit:
        X = X[: args.limit]
    names = [m.strip() for m in args.methods.split(",") if m.strip()]
    for name in names:
        if name not in METHODS:
            raise CliError(f"methods: unknown method {name!r}")
    methods = {}
    for name in names:
        ns = argparse.Namespace(**vars(args))
        ns.method = name
        methods[name] = _method_fn(ns)
    cfg = evalkit.EvalConfig(replacement=args.replacement, grid=_parse_grid(args.grid))
    report = evalkit.benchmark(model, list(X), methods, cfg, seed=args.seed)
    if all(r.samples_ok == 0 for r in report.results):
        print("error: no sample succeeded for any method", file=sys.stderr)
        return EXIT_EMPTY
    with open(args.out + ".json", "w") as fh:
        fh.write(report.json_str())
    with open(args.out + ".csv", "w") as fh:
        fh.write(report.csv_str())
    print(report.csv_str(), end="")
    return EXIT_OK


def cmd_train_toy(args) -> int:
    try:
        X, y = load_dataset_csv(args.input)
    except (OSError, ValueError) as exc:
        raise CliError(f"input: {exc}") from exc
    hidden = tuple(int(tok) for tok in args.hidden.split(",") if tok)
    result = fit_toy_model(
        X,
        y,
        hidden=hidden,
        activation=args.activation,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
    )
    save_model(result.model, args.out)
    print(f"final loss {result.loss:.6f}, training accuracy {result.accuracy:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxgrad",
        description="Feature attribution by negative-flux aggregation, with "
        "gradient baselines, flux verification, and deletion/insertion evaluation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output path (or prefix)")

    p = sub.add_parser("attribute", help="compute an attribution map for one input")
    common(p)
    p.add_argument("--input", required=True, help="flat vector file (csv or whitespace)")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--epsilon", type=float, default=0.1, help="sphere radius")
    p.add_argument("--samples", type=int, default=20, help="negative-flux / noise samples")
    p.add_argument("--steps", type=int, default=1, help="recurrence or path steps")
    p.add_argument("--step-rule", choices=("sign", "normalized"), default="sign")
    p.add_argument("--baseline", help="baseline vector file (ig); default zeros")
    p.add_argument("--sigma", type=float, default=0.1, help="smoothgrad noise level")
    p.add_argument("--grid", help="HxW layout; also emits a PGM heatmap")
    p.set_defaults(fn=cmd_attribute)

    p = sub.add_parser("verify", help="divergence-theorem cross-check on a model")
    common(p)
    p.add_argument("--input", help="sphere center vector file; default origin")
    p.add_argument("--epsilon", type=float, default=0.5, help="sphere radius")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("eval", help="deletion/insertion benchmark over a dataset")
    common(p)
    p.add_argument("--input", required=True, help="dataset CSV (last column label, ignored)")
    p.add_argument("--methods", default="neflag,ig,smoothgrad,saliency,random")
    p.add_argument("--replacement", choices=evalkit.REPLACEMENTS, default="black")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--step-rule", choices=("sign", "normalized"), default="sign")
    p.add_argument("--baseline")
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--grid", help="HxW layout for blur replacement")
    p.add_argument("--limit", type=int, default=0, help="cap the number of inputs")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("train-toy", help="train a toy MLP on a labeled CSV")
    p.add_argument("--input", required=True, help="dataset CSV, last column label")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.add_argument("--hidden", default="8", help="comma-separated hidden sizes")
    p.add_argument("--activation", choices=("relu", "tanh", "softplus"), default="tanh")
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train_toy)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FluxgradError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
