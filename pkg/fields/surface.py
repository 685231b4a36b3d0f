"""
fields/surface.py
Uniform samplers over analytic scenes: boundary points with normals, and
interior points by rejection.
"""

import logging

import numpy as np

from core.constants import REJECTION_MAX_TRIALS, REJECTION_MIN_ACCEPTANCE
from core.errors import RejectionStarved
from fields.analytic import AnalyticField
from fields.base import DistanceField
from fields.ops import unit_gradient

logger = logging.getLogger(__name__)

SURFACE_TOL_REL = 1e-9   # x diag, leaf samples hidden by CSG are rejected


def sample_surface(field: AnalyticField, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Uniform samples of the composite boundary ∂O with unit outward normals.

    A leaf is picked with probability proportional to its boundary measure,
    a point is drawn parametrically on it, and the point is kept only when it
    lies inside the scene bounds and on the composite zero set (leaf surface
    segments swallowed by CSG are rejected).

    Returns
    -------
    tuple
        ``(points, normals)``, both ``(n, d)``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    leaves = field.leaves()
    measures = np.array([leaf.surface_measure(field.bounds) for leaf in leaves], dtype=np.float64)
    probs = measures / measures.sum()
    tol = SURFACE_TOL_REL * field.bounds.diag

    kept: list[np.ndarray] = []
    have, trials = 0, 0
    while have < n:
        m = max(2 * (n - have), 64)
        counts = rng.multinomial(m, probs)
        draws = [leaf.sample_surface(int(c), rng, field.bounds) for leaf, c in zip(leaves, counts) if c > 0]
        pts = np.concatenate(draws)
        ok = field.bounds.contains(pts) & (np.abs(field.phi(pts)) <= tol)
        kept.append(pts[ok])
        have += int(ok.sum())
        trials += m
        if trials >= REJECTION_MAX_TRIALS and have < REJECTION_MIN_ACCEPTANCE * trials:
            raise RejectionStarved(f"surface acceptance {have}/{trials} below {REJECTION_MIN_ACCEPTANCE:.1%}")

    points = np.concatenate(kept)[:n]
    normals, _ = unit_gradient(field, points)
    return points, normals


def sample_interior(field: DistanceField, n: int, rng: np.random.Generator) -> np.ndarray:
    """
    ``n`` points uniform over ``{Φ < 0} ∩ bounds`` by rejection.

    Raises
    ------
    RejectionStarved
        When acceptance stays below 0.1 % once 10⁶ trials have been spent.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    lo, hi = field.bounds.lo, field.bounds.hi
    kept: list[np.ndarray] = []
    have, trials = 0, 0
    while have < n:
        m = max(4 * (n - have), 1024)
        pts = rng.uniform(lo, hi, size=(m, field.dim))
        inside = pts[field.phi(pts) < 0.0]
        kept.append(inside)
        have += inside.shape[0]
        trials += m
        if trials >= REJECTION_MAX_TRIALS and have < REJECTION_MIN_ACCEPTANCE * trials:
            raise RejectionStarved(
                f"interior acceptance {have}/{trials} below {REJECTION_MIN_ACCEPTANCE:.1%}"
            )
    if trials > 16 * n and n > 0:
        logger.debug("Interior sampling needed %d trials for %d points", trials, n)
    return np.concatenate(kept)[:n] if kept else np.empty((0, field.dim))
