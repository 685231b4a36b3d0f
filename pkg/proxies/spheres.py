"""
proxies/spheres.py
Sphere sets, proxy sets and the signed distance field they imply.
"""

from dataclasses import dataclass, field as dc_field
from typing import Iterator, Optional

import numpy as np

from core.errors import EmptyProxy
from core.math_utils import Bounds, as_points


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise ValueError(f"sphere radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class Spheres:
    """Struct-of-arrays sphere collection: ``centers (m, d)``, ``radii (m,)``."""
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self) -> None:
        centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        radii = np.asarray(self.radii, dtype=np.float64).reshape(-1)
        if centers.shape[0] != radii.shape[0]:
            raise ValueError(f"{centers.shape[0]} centers for {radii.shape[0]} radii")
        if np.any(radii <= 0.0):
            raise ValueError("sphere radii must be > 0")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "radii", radii)

    @classmethod
    def empty(cls, dim: int) -> "Spheres":
        return cls(np.empty((0, dim)), np.empty(0))

    @classmethod
    def of(cls, spheres: list[Sphere], dim: int) -> "Spheres":
        if not spheres:
            return cls.empty(dim)
        return cls(np.stack([s.center for s in spheres]), np.array([s.radius for s in spheres]))

    @property
    def dim(self) -> int:
        return int(self.centers.shape[1])

    def __len__(self) -> int:
        return int(self.radii.shape[0])

    def __getitem__(self, i: int) -> Sphere:
        return Sphere(self.centers[i], float(self.radii[i]))

    def __iter__(self) -> Iterator[Sphere]:
        return (self[i] for i in range(len(self)))

    def take(self, idx) -> "Spheres":
        idx = np.asarray(idx, dtype=np.int64)
        return Spheres(self.centers[idx], self.radii[idx])

    def scaled(self, k: float) -> "Spheres":
        return Spheres(self.centers * k, self.radii * k)


@dataclass(frozen=True)
class ProxySet:
    """
    A collision proxy. ``separations`` holds, for furthest-sphere sampling,
    the normalized separation achieved at each pick after the first.
    """
    spheres: Spheres
    kind: str
    separations: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    order: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.spheres.dim

    @property
    def memory_floats(self) -> int:
        return len(self.spheres) * (self.dim + 1)

    def __len__(self) -> int:
        return len(self.spheres)


class SphereSetField:
    """``Φ_P(y) = min_i(‖y − c_i‖ − r_i)``, a DistanceField over a sphere set."""

    def __init__(self, spheres: Spheres, bounds: Bounds, chunk: int = 4096) -> None:
        if len(spheres) == 0:
            raise EmptyProxy("sphere-set field needs at least one sphere")
        self.spheres = spheres
        self.dim = spheres.dim
        self.bounds = bounds
        self.chunk = chunk

    def _nearest(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        phi = np.empty(p.shape[0])
        which = np.empty(p.shape[0], dtype=np.int64)
        for i in range(0, p.shape[0], self.chunk):
            q = p[i:i + self.chunk]
            dist = np.linalg.norm(q[:, None, :] - self.spheres.centers[None, :, :], axis=2) - self.spheres.radii[None, :]
            which[i:i + self.chunk] = np.argmin(dist, axis=1)
            phi[i:i + self.chunk] = dist[np.arange(q.shape[0]), which[i:i + self.chunk]]
        return phi, which

    def phi(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        return self._nearest(p)[0]

    def gradient(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        _, which = self._nearest(p)
        v = p - self.spheres.centers[which]
        norm = np.linalg.norm(v, axis=1, keepdims=True)
        return np.divide(v, norm, out=np.zeros_like(v), where=norm > 0.0)
