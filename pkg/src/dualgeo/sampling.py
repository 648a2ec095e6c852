"""Seeded sampling of points and pairs inside each model's safe box.

The safe box is a per-model sub-box of the chart domain inside which metric
conditioning stays bounded and safe-box pairs sit in the shooting basin; pairs
on the sphere are additionally filtered to a bounded great-circle angle.
"""

from __future__ import annotations

import numpy as np

from .manifold import ManifoldModel

__all__ = ["sample_points", "sample_pairs", "great_circle_angle"]

SPHERE_MAX_ANGLE = 1.0


def great_circle_angle(x, y) -> float:
    """Central angle between two spherical-chart points (radius-independent)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    def embed(c):
        th, ph = c[..., 0], c[..., 1]
        return np.stack(
            [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1
        )

    dot = np.clip(np.sum(embed(x) * embed(y), axis=-1), -1.0, 1.0)
    return np.arccos(dot)


def sample_points(
    model: ManifoldModel, count: int, rng: np.random.Generator, shrink: float = 1.0
) -> np.ndarray:
    """Uniform draws from the model's safe box, optionally shrunk toward its center."""
    box = model.safe_box
    center = 0.5 * (box[:, 0] + box[:, 1])
    half = 0.5 * (box[:, 1] - box[:, 0]) * shrink
    X = rng.uniform(center - half, center + half, size=(count, model.dim))
    inside = model.contains_batch(X)
    if not inside.all():
        raise RuntimeError(f"safe box of {model.spec_string} produced out-of-domain samples")
    return X


def sample_pairs(
    model: ManifoldModel,
    count: int,
    rng: np.random.Generator,
    min_separation: float = 1e-3,
    shrink: float = 1.0,
):
    """Seeded in-basin pairs; redraws pairs that are nearly coincident and, on
    the sphere, pairs separated by more than a unit great-circle angle."""
    P = sample_points(model, count, rng, shrink)
    Q = sample_points(model, count, rng, shrink)
    for i in range(count):
        for _ in range(200):
            sep_ok = np.linalg.norm(Q[i] - P[i]) >= min_separation
            angle_ok = (
                model.name != "sphere"
                or great_circle_angle(P[i], Q[i]) <= SPHERE_MAX_ANGLE
            )
            if sep_ok and angle_ok:
                break
            P[i] = sample_points(model, 1, rng, shrink)[0]
            Q[i] = sample_points(model, 1, rng, shrink)[0]
        else:
            raise RuntimeError("pair sampling failed to satisfy the filters")
    return P, Q
