"""Compare attribution methods on a classifier with known ground truth.

The dataset labels points by the sign of w . x with w = (4, 3, 2, 1, 0, 0),
so the trailing features are pure noise.  A faithful method should put most
of its mass on the leading features for a model trained on this rule.
"""

import numpy as np

import fluxgrad as fg
from fluxgrad.evalkit import make_method

w = np.array([4.0, 3.0, 2.0, 1.0, 0.0, 0.0])
X, y = fg.linear_rule_dataset(w, n=400, seed=5)
fit = fg.fit_toy_model(X, y, hidden=(8,), epochs=500, learning_rate=0.5, seed=2)
print(f"trained toy classifier: loss {fit.loss:.4f}, accuracy {fit.accuracy:.2f}")

x = X[int(np.argmax(fg.evaluate_batch(fit.model, X)))]  # most confident input
print(f"input under study: {np.round(x, 3).tolist()}\n")

methods = {
    "saliency": make_method("saliency"),
    "smoothgrad": make_method("smoothgrad", sigma=0.2, samples=100),
    "ig": make_method("ig", steps=100),
    "neflag": make_method("neflag", epsilon=0.1, n_samples=20),
    "taylor": make_method("taylor", epsilon=0.1),
    "random": make_method("random"),
}

header = "method      " + "".join(f"  f{i}    " for i in range(6))
print(header)
for name, fn in methods.items():
    att = fn(fit.model, x, 0)
    share = np.abs(att.values) / np.abs(att.values).sum()
    print(f"{name:<12}" + "".join(f"{s:7.3f}" for s in share))
print(f"{'ground truth':<12}" + "".join(f"{s:7.3f}" for s in np.abs(w * x) / np.abs(w * x).sum()))
