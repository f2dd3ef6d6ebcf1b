"""Brute-force numerical oracles for divergence and flux integrals.

These integrators exist to *verify* the flux machinery rather than to be
fast: Monte-Carlo volume integrals of the divergence, Monte-Carlo surface
integrals of the flux (dot-product or element-wise, optionally restricted
to a flux-sign subset), and a divergence-theorem cross-check report.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import NotSmooth
from .geometry import ball_points, ball_volume, sphere_area, sphere_directions
from .models import Model, gradient_batch
from .neflag import SphereSpec

SUBSETS = ("all", "negative", "positive")
MODES = ("dot", "elementwise")


@dataclass(frozen=True, eq=False)
class BallSpec:
    """The solid ball enclosed by an epsilon-sphere."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.ascontiguousarray(np.asarray(self.center, dtype=float))
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.size


@dataclass(frozen=True, eq=False)
class IntegralEstimate:
    """Monte-Carlo estimate with its standard error and sample count.

    ``value`` and ``standard_error`` are scalars in dot mode and length-N
    vectors in element-wise mode.
    """

    value: object
    standard_error: object
    samples: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")


def _require_smooth(model: Model):
    if model.uses_relu:
        raise NotSmooth("field not continuously differentiable (relu activation)")


def divergence_fd(model: Model, x, h: float = 1e-4) -> float:
    """div F at x: central differences of the exact gradient field.

    Only the second derivative is finite-differenced; the field values
    themselves use analytic gradients, so a single FD level controls the
    error.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    _require_smooth(model)
    x = np.asarray(x, dtype=float)
    return _divergence_fd_batch(model, x[None, :], h)[0]


def _divergence_fd_batch(model: Model, xs: np.ndarray, h: float) -> np.ndarray:
    """Vectorized divergence at every row of xs."""
    n, dim = xs.shape
    total = np.zeros(n)
    for i in range(dim):
        step = np.zeros(dim)
        step[i] = h
        gp = gradient_batch(model, xs + step)[:, i]
        gm = gradient_batch(model, xs - step)[:, i]
        total += (gp - gm) / (2.0 * h)
    return total


def volume_divergence_integral(
    model: Model, ball: BallSpec, samples: int, seed: int = 0, h: float = 1e-4
) -> IntegralEstimate:
    """Monte-Carlo estimate of the divergence integrated over the ball."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _require_smooth(model)
    rng = np.random.default_rng(seed)
    pts = ball_points(rng, samples, ball.center, ball.radius)
    divs = _divergence_fd_batch(model, pts, h)
    vol = ball_volume(ball.dim, ball.radius)
    se = vol * divs.std(ddof=1) / np.sqrt(samples) if samples > 1 else 0.0
    return IntegralEstimate(vol * float(divs.mean()), float(se), samples)


def surface_flux_integral(
    model: Model,
    sphere: SphereSpec,
    samples: int,
    seed: int = 0,
    mode: str = "dot",
    subset: str = "all",
) -> IntegralEstimate:
    """Monte-Carlo surface integral of the flux over the sphere.

    mode ``dot`` integrates the scalar F . n; ``elementwise`` integrates
    the vector F * n per coordinate.  ``subset`` restricts to points whose
    dot-product flux is negative (< 0) or positive (>= 0); excluded points
    contribute zero, so negative + positive = all on the same sample set.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if subset not in SUBSETS:
        raise ValueError(f"unknown subset {subset!r}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    normals = sphere_directions(rng, samples, sphere.dim)
    pts = sphere.center + sphere.radius * normals
    grads = gradient_batch(model, pts)
    flux = np.einsum("ij,ij->i", grads, normals)
    if subset == "negative":
        mask = flux < 0.0
    elif subset == "positive":
        mask = flux >= 0.0
    else:
        mask = np.ones(samples, dtype=bool)
    area = sphere_area(sphere.dim, sphere.radius)
    if mode == "dot":
        vals = np.where(mask, flux, 0.0)
        se = area * vals.std(ddof=1) / np.sqrt(samples) if samples > 1 else 0.0
        return IntegralEstimate(area * float(vals.mean()), float(se), samples)
    vals = grads * normals * mask[:, None]
    se = (
        area * vals.std(axis=0, ddof=1) / np.sqrt(samples)
        if samples > 1
        else np.zeros(sphere.dim)
    )
    return IntegralEstimate(area * vals.mean(axis=0), se, samples)


@dataclass(frozen=True)
class DivergenceTheoremReport:
    """Both sides of the volume/surface identity with a PASS verdict."""

    volume_integral: float
    surface_integral: float
    difference: float
    combined_standard_error: float
    passed: bool
    samples: int

    def to_json(self) -> dict:
        return {
            "lhs": self.volume_integral,
            "rhs": self.surface_integral,
            "diff": self.difference,
            "stderr": self.combined_standard_error,
            "pass": self.passed,
            "samples": self.samples,
        }

    def json_str(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def divergence_theorem_report(
    model: Model,
    sphere: SphereSpec,
    samples: int = 100_000,
    seed: int = 0,
    h: float = 1e-4,
) -> DivergenceTheoremReport:
    """Cross-check the volume divergence integral against the surface flux.

    PASS when the two sides agree within 3 combined standard errors or 2%
    relative (whichever is looser).
    """
    ball = BallSpec(sphere.center, sphere.radius)
    ss = np.random.SeedSequence(seed)
    kids = ss.spawn(2)
    lhs = volume_divergence_integral(
        model, ball, samples, np.random.default_rng(kids[0]).integers(2**31), h
    )
    rhs = surface_flux_integral(
        model, sphere, samples, np.random.default_rng(kids[1]).integers(2**31)
    )
    diff = lhs.value - rhs.value
    se = float(np.hypot(lhs.standard_error, rhs.standard_error))
    scale = max(abs(lhs.value), abs(rhs.value))
    passed = abs(diff) < 3.0 * se or (scale > 0 and abs(diff) < 0.02 * scale)
    return DivergenceTheoremReport(
        float(lhs.value), float(rhs.value), float(diff), se, bool(passed), samples
    )
