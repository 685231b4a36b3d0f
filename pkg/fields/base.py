"""
fields/base.py
Structural interfaces every field backend (analytic, grid, neural) satisfies.
"""

from typing import Protocol, runtime_checkable

import numpy as np

from core.math_utils import Bounds


@runtime_checkable
class DistanceField(Protocol):
    """Signed distance Φ: negative inside, positive outside."""

    dim: int
    bounds: Bounds

    def phi(self, points: np.ndarray) -> np.ndarray:
        """Φ at ``(n, d)`` points -> ``(n,)``."""
        ...

    def gradient(self, points: np.ndarray) -> np.ndarray:
        """Raw (not renormalized) ∇Φ at ``(n, d)`` points -> ``(n, d)``."""
        ...


@runtime_checkable
class MedialField(Protocol):
    """Local thickness MF with separate interior / exterior sides."""

    dim: int

    def mf(self, points: np.ndarray) -> np.ndarray:
        """MF at ``(n, d)`` points -> ``(n,)``; side chosen by the sign of Φ."""
        ...

    def clamped(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points whose value is an exterior clamp, not a true radius."""
        ...
