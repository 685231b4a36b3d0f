"""
tracer/shading.py
Surface shading: normal colors, Lambertian with an ambient term optionally
darkened by medial-field ambient occlusion (MFAO), and iteration heatmaps.
"""

from typing import Optional

import numpy as np

from core.constants import AMBIENT_STRENGTH, BACKGROUND_RGB, MFAO_A, MFAO_P, TRACE_EPSILON_REL
from core.math_utils import as_points, normalize_rows
from fields.base import DistanceField, MedialField
from fields.ops import eval_grad
from tracer.image import to_uint8

SHADING_MODES: tuple[str, ...] = ("normal", "lambertian", "lambertian+mfao", "iterations")

LIGHT_DIR = np.array([0.4, 0.8, 0.45]) / np.linalg.norm([0.4, 0.8, 0.45])
ALBEDO = np.array([0.82, 0.78, 0.72])
HEATMAP_SPAN = 64   # iterations mapped to the top of the heatmap ramp


def mfao_batch(mf: MedialField, field: DistanceField, points: np.ndarray,
               eps_off: float, a: float = MFAO_A, p: float = MFAO_P) -> np.ndarray:
    """``min(a·MF(x + ∇Φ·eps_off)^p, 1)`` for surface points; rows with no gradient get 1."""
    if eps_off <= 0.0:
        raise ValueError(f"eps_off must be > 0, got {eps_off}")
    pts, _ = as_points(points)
    unit, defined = normalize_rows(field.gradient(pts))
    values = np.maximum(mf.mf(pts + eps_off * unit), 0.0)
    return np.where(defined, np.minimum(a * values ** p, 1.0), 1.0)


def mfao(mf: MedialField, field: DistanceField, x_surface: np.ndarray,
         a: float = MFAO_A, p: float = MFAO_P, eps_off: Optional[float] = None) -> float:
    """
    MFAO at one surface point.

    MF is read ``eps_off`` outside the surface, twice the hit threshold
    (``2e-4·diag``) unless given.

    Raises
    ------
    GradientUndefined
        If ∇Φ vanishes at *x_surface*.
    """
    if eps_off is None:
        eps_off = 2.0 * TRACE_EPSILON_REL * field.bounds.diag
    if eps_off <= 0.0:
        raise ValueError(f"eps_off must be > 0, got {eps_off}")
    pts, _ = as_points(x_surface)
    probe = pts + eps_off * eval_grad(field, pts)
    value = max(float(mf.mf(probe)[0]), 0.0)
    return min(a * value ** p, 1.0)


def heatmap(iterations: np.ndarray) -> np.ndarray:
    """Iteration counts to a dark-blue → orange → white ramp, float RGB in [0, 1]."""
    t = np.clip(np.asarray(iterations, dtype=np.float64) / HEATMAP_SPAN, 0.0, 1.0)[:, None]
    low, mid, high = np.array([0.05, 0.07, 0.25]), np.array([0.95, 0.45, 0.1]), np.array([1.0, 1.0, 1.0])
    return np.where(t < 0.5, low + (mid - low) * (2.0 * t), mid + (high - mid) * (2.0 * t - 1.0))


def shade(
    mode: str,
    hit: np.ndarray,
    normals: np.ndarray,
    iterations: np.ndarray,
    ao: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Per-ray RGB bytes ``(n, 3)``.

    ``normals`` and ``ao`` are only read on hit rows; misses get the
    background color except in ``iterations`` mode, which colors every ray.
    """
    if mode not in SHADING_MODES:
        raise ValueError(f"unknown shading {mode!r}; expected one of {SHADING_MODES}")
    n = hit.shape[0]
    if mode == "iterations":
        return to_uint8(heatmap(iterations))

    rgb = np.empty((n, 3))
    rgb[:] = np.asarray(BACKGROUND_RGB) / 255.0
    nh = normals[hit]
    if mode == "normal":
        rgb[hit] = 0.5 * (nh + 1.0)
    else:
        occlusion = np.ones(nh.shape[0]) if ao is None or mode == "lambertian" else ao[hit]
        diffuse = np.maximum(nh @ LIGHT_DIR, 0.0)
        light = AMBIENT_STRENGTH * occlusion + (1.0 - AMBIENT_STRENGTH) * diffuse
        rgb[hit] = ALBEDO[None, :] * light[:, None]
    return to_uint8(rgb)
