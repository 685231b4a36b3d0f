"""
Core vector math shared by every package.
Bounding boxes, rays and batched normalization helpers.
"""

from dataclasses import dataclass

import numpy as np

from core.constants import GRADIENT_UNDEFINED_NORM
from core.errors import BoundsDegenerate


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned box ``[lo, hi]`` in scene units."""
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.lo, dtype=np.float64).reshape(-1)
        hi = np.asarray(self.hi, dtype=np.float64).reshape(-1)
        if lo.shape != hi.shape or lo.size not in (2, 3):
            raise BoundsDegenerate(f"bounds need matching 2D/3D corners, got {lo} / {hi}")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise BoundsDegenerate(f"bounds must be finite, got {lo} / {hi}")
        if np.any(hi - lo <= 0.0):
            raise BoundsDegenerate(f"every extent must be > 0, got {hi - lo}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return int(self.lo.size)

    @property
    def extent(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def diag(self) -> float:
        return float(np.linalg.norm(self.extent))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points inside the closed box."""
        points = np.atleast_2d(points)
        return np.all((points >= self.lo) & (points <= self.hi), axis=-1)

    def to_dict(self) -> dict:
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True)
class Ray:
    """Ray with unit direction."""
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self) -> None:
        origin = np.asarray(self.origin, dtype=np.float64)
        direction = np.asarray(self.direction, dtype=np.float64)
        norm = float(np.linalg.norm(direction))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"ray direction must be unit length, got |d|={norm}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "direction", direction)

    @classmethod
    def towards(cls, origin, target) -> "Ray":
        """Ray from *origin* pointing at *target*."""
        origin = np.asarray(origin, dtype=np.float64)
        direction = np.asarray(target, dtype=np.float64) - origin
        return cls(origin, direction / np.linalg.norm(direction))


def as_points(x: np.ndarray) -> tuple[np.ndarray, bool]:
    """
    Promote a single point to a ``(1, d)`` batch.

    Returns
    -------
    tuple
        The ``(n, d)`` float64 array and whether the input was a single point.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim != 2:
        raise ValueError(f"points must have shape (d,) or (n, d), got {arr.shape}")
    return arr, False


def normalize_rows(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Normalize each row of *v* to unit length.

    Rows whose raw magnitude falls below ``GRADIENT_UNDEFINED_NORM`` are left as
    zero vectors and flagged undefined.

    Returns
    -------
    tuple
        ``(unit, defined)`` with ``unit`` of shape ``(n, d)`` and boolean mask
        ``defined`` of shape ``(n,)``.
    """
    norm = np.linalg.norm(v, axis=-1)
    defined = norm >= GRADIENT_UNDEFINED_NORM
    safe = np.where(defined, norm, 1.0)
    unit = np.where(defined[:, None], v / safe[:, None], 0.0)
    return unit, defined


def rowdot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise dot product of two ``(n, d)`` arrays."""
    return np.einsum("ij,ij->i", a, b)


def chunked(fn, points: np.ndarray, chunk: int = 65_536) -> np.ndarray:
    """Apply a batched evaluator in fixed-size chunks, concatenating in order."""
    if points.shape[0] <= chunk:
        return fn(points)
    return np.concatenate([fn(points[i:i + chunk]) for i in range(0, points.shape[0], chunk)])
