"""
medial/corrupted.py
Deliberately wrong medial fields for exercising the residual audit.
"""

import numpy as np

from fields.base import DistanceField, MedialField


class UnsignedDistanceMedialField:
    """``MF = |Φ|``: inscribed and maximal by construction, never orthogonal."""

    def __init__(self, field: DistanceField) -> None:
        self.field = field
        self.dim = field.dim

    def mf(self, points: np.ndarray) -> np.ndarray:
        return np.abs(self.field.phi(points))

    def clamped(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(np.atleast_2d(points).shape[0], dtype=bool)


class ScaledMedialField:
    """``MF = scale · inner``."""

    def __init__(self, inner: MedialField, scale: float) -> None:
        if scale <= 0.0:
            raise ValueError(f"scale must be > 0, got {scale}")
        self.inner = inner
        self.scale = float(scale)
        self.dim = inner.dim

    def mf(self, points: np.ndarray) -> np.ndarray:
        return self.scale * self.inner.mf(points)

    def clamped(self, points: np.ndarray) -> np.ndarray:
        return self.inner.clamped(points)


class OffsetMedialField:
    """``MF = inner + offset``."""

    def __init__(self, inner: MedialField, offset: float) -> None:
        self.inner = inner
        self.offset = float(offset)
        self.dim = inner.dim

    def mf(self, points: np.ndarray) -> np.ndarray:
        return self.inner.mf(points) + self.offset

    def clamped(self, points: np.ndarray) -> np.ndarray:
        return self.inner.clamped(points)
