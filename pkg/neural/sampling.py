"""
neural/sampling.py
Training batches: uniform surface samples with normals, plus volume points
offset from surface samples by isotropic Gaussian noise.
"""

from dataclasses import dataclass

import numpy as np

from fields.analytic import AnalyticField
from fields.surface import sample_surface


@dataclass(frozen=True)
class SampleBatch:
    surface_points: np.ndarray
    surface_normals: np.ndarray
    volume_points: np.ndarray

    def __len__(self) -> int:
        return int(self.surface_points.shape[0] + self.volume_points.shape[0])


def sample_batch(field: AnalyticField, batch_size: int, sigma: float, rng: np.random.Generator) -> SampleBatch:
    """
    One training batch of ``batch_size`` surface and ``batch_size`` volume points.

    Volume points are the surface points plus ``N(0, σ²·I)`` offsets; the
    result is fully determined by the generator state.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if sigma <= 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    points, normals = sample_surface(field, batch_size, rng)
    offsets = rng.normal(0.0, sigma, size=points.shape)
    return SampleBatch(surface_points=points, surface_normals=normals, volume_points=points + offsets)
