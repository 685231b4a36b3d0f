"""
fields/ops.py
Field-agnostic operations: Φ, unit gradients, surface projection, bounds.

Each operation accepts a single point ``(d,)`` or a batch ``(n, d)`` and
returns a matching scalar / array.
"""

import numpy as np

from core.errors import GradientUndefined
from core.math_utils import Bounds, as_points, normalize_rows
from fields.base import DistanceField


def eval_phi(field: DistanceField, x: np.ndarray):
    """Signed distance at *x*."""
    pts, single = as_points(x)
    values = field.phi(pts)
    return float(values[0]) if single else values


def unit_gradient(field: DistanceField, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Renormalized ∇Φ for a batch, without raising.

    Returns
    -------
    tuple
        ``(unit, defined)``; rows where the raw magnitude is below the
        undefined threshold are zero and flagged ``False``.
    """
    pts, _ = as_points(points)
    return normalize_rows(field.gradient(pts))


def eval_grad(field: DistanceField, x: np.ndarray) -> np.ndarray:
    """
    Unit gradient of Φ.

    Raises
    ------
    GradientUndefined
        If any queried point lies on the medial locus / a primitive center.
    """
    pts, single = as_points(x)
    unit, defined = unit_gradient(field, pts)
    if not np.all(defined):
        bad = pts[~defined][0]
        raise GradientUndefined(f"gradient undefined at {bad.tolist()}")
    return unit[0] if single else unit


def abs_gradient(field: DistanceField, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    ∇|Φ| = sign(Φ)·∇Φ for a batch.

    Returns
    -------
    tuple
        ``(phi, n, defined)``.
    """
    pts, _ = as_points(points)
    phi = field.phi(pts)
    unit, defined = unit_gradient(field, pts)
    return phi, np.sign(phi)[:, None] * unit, defined


def project_surface(field: DistanceField, x: np.ndarray) -> np.ndarray:
    """Closest-point projection ``x - ∇Φ(x)·Φ(x)``."""
    pts, single = as_points(x)
    grad = eval_grad(field, pts)
    foot = pts - grad * field.phi(pts)[:, None]
    return foot[0] if single else foot


def scene_bounds(field: DistanceField) -> tuple[Bounds, float]:
    """Conservative box around the shape and its diagonal length."""
    return field.bounds, field.bounds.diag
