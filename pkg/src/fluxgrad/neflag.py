"""Negative-flux aggregation on an epsilon-sphere.

The attribution for input x is built by locating points x~ on the sphere of
radius epsilon around x where the gradient field flows inward (negative
flux F(x~) . n), and summing the element-wise products F(x~) * (x - x~)
over those points.  Candidate points are refined by a fixed-point
recurrence that steps from the sphere center against the gradient
direction, in one of two flavors:

* ``sign``        -- x~ = x - eps * sign(F / |F|), a componentwise step that
  lands on a hypercube corner at L2 distance eps * sqrt(N); extra
  stochasticity spreads the accepted points more evenly.
* ``normalized``  -- x~ = x - eps * F / |F|, which stays exactly on the
  sphere and is a fixed-point iteration for on-sphere minimizers of f.
* ``none``        -- pure rejection sampling: keep the uniform sphere draw
  as-is (useful as an unbiased reference for the surface integral).

The recurrence is run ``max_steps`` times on a single sampled start by
default.  ``resample_each_step=True`` instead redraws the start before
every step, which discards the recurrence state; it is kept selectable
for comparison but is not the default.
"""

from dataclasses import dataclass, field

import numpy as np

from .attribution import AttributionMap
from .errors import DimensionMismatch, NoNegativeFlux, OffSphere, StationaryGradient
from .geometry import sphere_points
from .models import Model, evaluate, gradient

STEP_RULES = ("sign", "normalized", "none")


@dataclass(frozen=True, eq=False)
class SphereSpec:
    """The epsilon-sphere S_x: center x and radius epsilon."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.ascontiguousarray(np.asarray(self.center, dtype=float))
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError("sphere radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def offset(self, point) -> np.ndarray:
        return np.asarray(point, dtype=float) - self.center

    def on_surface(self, point, rtol: float = 1e-9) -> bool:
        d = np.linalg.norm(self.offset(point))
        return abs(d - self.radius) <= rtol * self.radius


@dataclass(frozen=True, eq=False)
class FluxPoint:
    """A surface point with its gradient, unit normal, and signed flux.

    ``flux`` is the exact dot product F(x~) . n; ``approx_flux`` is the
    first-order surrogate (f(x~) - f(x)) / dist that avoids a gradient
    evaluation.
    """

    location: np.ndarray
    gradient: np.ndarray
    normal: np.ndarray
    flux: float
    approx_flux: float

    @property
    def is_negative(self) -> bool:
        return self.flux < 0.0


@dataclass(frozen=True)
class NeflagConfig:
    """Knobs of the negative-flux search and aggregation.

    ``n_samples`` negative-flux points are aggregated; each is found by
    running ``max_steps`` recurrence updates from a fresh uniform sphere
    sample.  Defaults epsilon=0.1, n_samples=20, max_steps=1.
    """

    epsilon: float = 0.1
    n_samples: int = 20
    max_steps: int = 1
    step_rule: str = "sign"
    seed: int = 0
    reject_nonnegative: bool = True
    resample_each_step: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"unknown step rule {self.step_rule!r}")

    def to_params(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "n": self.n_samples,
            "m": self.max_steps,
            "step_rule": self.step_rule,
            "seed": self.seed,
            "reject_nonnegative": self.reject_nonnegative,
            "resample_each_step": self.resample_each_step,
        }


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_sphere(sphere: SphereSpec, seed) -> np.ndarray:
    """One point drawn uniformly on the sphere surface."""
    rng = _as_rng(seed)
    return sphere_points(rng, 1, sphere.center, sphere.radius)[0]


def _flux_point(model: Model, sphere: SphereSpec, x_t: np.ndarray) -> FluxPoint:
    """Flux bookkeeping at x_t, using its actual distance from the center.

    Sign-rule points live off the sphere; their normal is taken along the
    actual offset direction.
    """
    x_t = np.asarray(x_t, dtype=float)
    off = sphere.offset(x_t)
    dist = float(np.linalg.norm(off))
    if dist == 0.0:
        raise OffSphere("candidate point coincides with the sphere center")
    normal = off / dist
    grad = gradient(model, x_t)
    flux = float(grad @ normal)
    approx = (evaluate(model, x_t) - evaluate(model, sphere.center)) / dist
    return FluxPoint(x_t, grad, normal, flux, float(approx))


def flux_at(model: Model, sphere: SphereSpec, x_t) -> FluxPoint:
    """Exact and approximate flux at a point on the sphere surface.

    Rejects points farther than 1e-6 relative from the surface, which
    would silently corrupt the unit normal.
    """
    x_t = np.asarray(x_t, dtype=float)
    if x_t.size != sphere.dim:
        raise DimensionMismatch("point and sphere dimensions differ")
    dist = float(np.linalg.norm(sphere.offset(x_t)))
    if abs(dist - sphere.radius) > 1e-6 * sphere.radius:
        raise OffSphere(
            f"point at distance {dist:.3e} from center, sphere radius {sphere.radius:.3e}"
        )
    return _flux_point(model, sphere, x_t)


def recurrence_step(
    model: Model, sphere: SphereSpec, x_prev, rule: str = "normalized"
) -> np.ndarray:
    """One recurrence update toward lower f on the sphere.

    normalized: x - eps * F(x_prev) / |F(x_prev)|, exactly on the sphere.
    sign:       x - eps * sign(F(x_prev)), a hypercube-corner step.
    """
    if rule not in ("sign", "normalized"):
        raise ValueError(f"unknown recurrence rule {rule!r}")
    grad = gradient(model, np.asarray(x_prev, dtype=float))
    norm = np.linalg.norm(grad)
    if norm == 0.0:
        raise StationaryGradient("stationary gradient, cannot step")
    if rule == "normalized":
        return sphere.center - sphere.radius * grad / norm
    return sphere.center - sphere.radius * np.sign(grad)


def find_negative_flux_point(
    model: Model, sphere: SphereSpec, config: NeflagConfig, seed=None
) -> FluxPoint:
    """Sample the sphere and refine toward a negative-flux point.

    One uniform sample followed by ``max_steps`` recurrence updates (or no
    updates under the ``none`` rule).  When ``reject_nonnegative`` is set,
    candidates whose exact flux is >= 0 are rejected and the search
    restarts from a fresh sample, up to 10 * n_samples attempts; exhaustion
    raises :class:`NoNegativeFlux`.
    """
    rng = _as_rng(config.seed if seed is None else seed)
    budget = 10 * config.n_samples
    for _ in range(budget):
        x_t = sample_sphere(sphere, rng)
        if config.step_rule != "none":
            for _ in range(config.max_steps):
                if config.resample_each_step:
                    x_t = sample_sphere(sphere, rng)
                x_t = recurrence_step(model, sphere, x_t, config.step_rule)
        point = _flux_point(model, sphere, x_t)
        if not config.reject_nonnegative or point.is_negative:
            return point
    raise NoNegativeFlux(
        f"no negative flux found on the sphere after {budget} attempts"
    )


def neflag_attribute(model: Model, x, config: NeflagConfig = NeflagConfig()) -> AttributionMap:
    """Aggregate F(x~) * (x - x~) over n_samples negative-flux points.

    Per-sample seeds are derived from the master seed by index, so the
    result is deterministic and independent of any evaluation order.  Raw
    sums are reported (no 1/n normalization); magnitudes therefore scale
    with n_samples and cross-n comparisons should use rankings.
    """
    x = np.asarray(x, dtype=float)
    if x.size != model.dim:
        raise DimensionMismatch("input length does not match model dimension")
    sphere = SphereSpec(x, config.epsilon)
    root = np.random.SeedSequence(config.seed)
    total = np.zeros(model.dim)
    used = 0
    for child in root.spawn(config.n_samples):
        point = find_negative_flux_point(model, sphere, config, np.random.default_rng(child))
        total += point.gradient * (x - point.location)
        used += 1
    return AttributionMap(total, "neflag", config.to_params(), samples_used=used)


def taylor_heatmap(model: Model, x, x_t) -> AttributionMap:
    """First-order heatmap grad(x~) * (x - x~) expanded at a nearby point.

    When x~ lies on the epsilon-sphere this equals the single-sample
    negative-flux contribution from x~ by construction.
    """
    x = np.asarray(x, dtype=float)
    x_t = np.asarray(x_t, dtype=float)
    if x.size != model.dim or x_t.size != model.dim:
        raise DimensionMismatch("input length does not match model dimension")
    values = gradient(model, x_t) * (x - x_t)
    return AttributionMap(values, "taylor", {"expansion_point": x_t.tolist()})
