"""Synthetic benchmark manifolds with known latent coordinates.

All generators are driven by a single 64-bit seed and draw in a documented
order, so identical specs reproduce bit-identical matrices.  The latent
coordinates use the arc-length (isometric) parameterization, which makes
them a valid ground truth for small-neighborhood distance checks; they are
returned for tests and diagnostics only and never feed the evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

KINDS = ("swiss-roll", "s-curve", "noisy-flat")


@dataclass(frozen=True)
class ManifoldSpec:
    """What to generate: kind, sample size, noise level, and shape knobs.

    ``ambient_dim``/``latent_dim`` only apply to ``noisy-flat``; the two
    curved benchmarks are fixed 2-manifolds in R^3.
    """

    kind: str
    n: int
    noise_sd: float = 0.0
    ambient_dim: int | None = None
    latent_dim: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown manifold kind {self.kind!r}, expected one of {KINDS}")
        if self.n < 10:
            raise ValidationError(f"n must be at least 10, got {self.n}")
        if self.noise_sd < 0:
            raise ValidationError(f"noise_sd must be non-negative, got {self.noise_sd}")
        if self.kind == "noisy-flat":
            if self.ambient_dim is None or self.latent_dim is None:
                raise ValidationError("noisy-flat requires ambient_dim and latent_dim")
            if not 1 <= self.latent_dim < self.ambient_dim:
                raise ValidationError(
                    f"need 1 <= latent_dim < ambient_dim, got "
                    f"{self.latent_dim} and {self.ambient_dim}"
                )


@dataclass(frozen=True)
class Dataset:
    """Observed matrix plus generator-internal ground truth."""

    X: np.ndarray  # (n, p) observed data
    latent: np.ndarray  # (n, q) isometric latent coordinates
    colors: np.ndarray  # (n,) scalar per case, for plotting


def _spiral_arc_length(t: np.ndarray) -> np.ndarray:
    # Arc length of the spiral (t cos t, t sin t): integral of sqrt(1 + t^2).
    return 0.5 * (t * np.sqrt(1.0 + t * t) + np.arcsinh(t))


def generate(spec: ManifoldSpec) -> Dataset:
    """Generate a dataset; draw order is fixed per kind (see source)."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n

    if spec.kind == "swiss-roll":
        t = rng.uniform(1.5 * np.pi, 4.5 * np.pi, n)
        h = rng.uniform(0.0, 21.0, n)
        X = np.column_stack([t * np.cos(t), h, t * np.sin(t)])
        latent = np.column_stack([_spiral_arc_length(t), h])
        colors = t
    elif spec.kind == "s-curve":
        t = rng.uniform(-1.5 * np.pi, 1.5 * np.pi, n)
        h = rng.uniform(0.0, 2.0, n)
        X = np.column_stack([np.sin(t), h, np.sign(t) * (np.cos(t) - 1.0)])
        latent = np.column_stack([t, h])  # unit-speed curve: t is arc length
        colors = t
    else:  # noisy-flat
        p, q = spec.ambient_dim, spec.latent_dim
        latent = rng.standard_normal((n, q))
        basis = rng.standard_normal((p, q))
        frame, r = np.linalg.qr(basis)
        frame = frame * np.sign(np.diag(r))  # sign-fixed orthonormal columns
        X = latent @ frame.T
        colors = latent[:, 0].copy()

    if spec.noise_sd > 0:
        X = X + rng.normal(0.0, spec.noise_sd, X.shape)

    return Dataset(X=X, latent=latent, colors=colors)
