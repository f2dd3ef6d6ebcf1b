"""Negative-flux attribution step by step on a linear scoring field.

For f(x) = a . x the gradient field is the constant a, so every point of
the epsilon-sphere around x on the side opposite to a has negative flux.
With one sample and one sign-rule step the attribution is exactly
a (elementwise squared over |a|, rescaled) -- small enough to trace by hand.
"""

import numpy as np

import fluxgrad as fg
from fluxgrad.neflag import NeflagConfig, SphereSpec

a = np.array([3.0, 4.0])
model = fg.linear_model(a)
x = np.zeros(2)

# Hand trace with the sign rule, epsilon = 1:
#   x~ = x - sign(a) = (-1, -1);  contribution = a * (x - x~) = (3, 4).
cfg = NeflagConfig(epsilon=1.0, n_samples=1, max_steps=1, step_rule="sign", seed=0)
att = fg.neflag_attribute(model, x, cfg)
print(f"sign rule, one sample      : {att.values.tolist()}  (hand trace gives [3.0, 4.0])")

# The normalized rule walks to x - eps * a/|a| instead, giving a_i^2 / |a|.
cfg = NeflagConfig(epsilon=1.0, n_samples=1, max_steps=1, step_rule="normalized", seed=0)
att = fg.neflag_attribute(model, x, cfg)
print(f"normalized rule, one sample: {np.round(att.values, 6).tolist()}  (= a_i^2 / |a|)")

# With many samples and no descent step ("none" keeps the raw draw when its
# flux is negative) the aggregate approaches the elementwise surface
# integral of the flux over the negative hemisphere.
cfg = NeflagConfig(epsilon=0.1, n_samples=2000, max_steps=1, step_rule="none", seed=0)
att = fg.neflag_attribute(model, x, cfg)
est = fg.surface_flux_integral(
    model, SphereSpec(x, 0.1), 10**6, seed=1, mode="elementwise", subset="negative"
)
mine = np.abs(att.values) / np.abs(att.values).sum()
oracle = np.abs(np.asarray(est.value)) / np.abs(np.asarray(est.value)).sum()
print("\nrejection sampling vs brute-force surface integral (L1-normalized):")
print(f"  aggregated samples : {np.round(mine, 4).tolist()}")
print(f"  surface integral   : {np.round(oracle, 4).tolist()}")

# Where no negative-flux point exists (the exact minimum of a bowl, where
# all flux points outward) the sampler reports that instead of guessing.
bowl = fg.quadratic_model([1.0, 1.0])
try:
    fg.neflag_attribute(bowl, [0.0, 0.0], NeflagConfig(step_rule="none"))
except fg.NoNegativeFlux as exc:
    print(f"\nat the bowl minimum: {exc}")
