"""
tracer/camera.py
Pinhole camera and seeded orbit poses around a scene.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.errors import RejectionStarved
from core.math_utils import Bounds
from fields.base import DistanceField


class Camera(BaseModel):
    """Perspective camera; pixel rows run top to bottom."""

    model_config = ConfigDict(frozen=True)

    position: List[float]
    look_at: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    up: List[float] = Field(default_factory=lambda: [0.0, 1.0, 0.0])
    fov_deg: float = Field(default=45.0, gt=0.0, lt=180.0)
    width: int = Field(default=128, ge=1)
    height: int = Field(default=128, ge=1)

    @field_validator("position", "look_at", "up")
    @classmethod
    def three_components(cls, v: List[float]) -> List[float]:
        if len(v) != 3:
            raise ValueError(f"camera vectors need 3 components, got {v}")
        return v

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(forward, right, up)`` orthonormal frame."""
        eye = np.asarray(self.position, dtype=np.float64)
        forward = np.asarray(self.look_at, dtype=np.float64) - eye
        norm = np.linalg.norm(forward)
        if norm == 0.0:
            raise ValueError("camera position and look_at coincide")
        forward /= norm
        up = np.asarray(self.up, dtype=np.float64)
        right = np.cross(forward, up)
        if np.linalg.norm(right) < 1e-9:
            # up parallel to the view direction
            right = np.cross(forward, [1.0, 0.0, 0.0] if abs(forward[0]) < 0.9 else [0.0, 0.0, 1.0])
        right /= np.linalg.norm(right)
        return forward, right, np.cross(right, forward)

    def rays(self) -> tuple[np.ndarray, np.ndarray]:
        """Primary ray origins and unit directions, ``(height·width, 3)`` each, row-major."""
        forward, right, up = self.basis()
        half = np.tan(np.radians(self.fov_deg) / 2.0)
        aspect = self.width / self.height
        u = (2.0 * (np.arange(self.width) + 0.5) / self.width - 1.0) * half * aspect
        v = (1.0 - 2.0 * (np.arange(self.height) + 0.5) / self.height) * half
        vv, uu = np.meshgrid(v, u, indexing="ij")
        dirs = forward + uu.reshape(-1, 1) * right + vv.reshape(-1, 1) * up
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        origins = np.broadcast_to(np.asarray(self.position, dtype=np.float64), dirs.shape).copy()
        return origins, dirs


def orbit_poses(
    field: DistanceField,
    n_poses: int,
    seed: int,
    width: int = 128,
    height: int = 128,
    fov_deg: float = 45.0,
) -> list[Camera]:
    """
    ``n_poses`` cameras on the bounding sphere of the scene box, looking at
    its center. Positions inside the shape (or within 5 % of the diagonal of
    it) are redrawn.
    """
    if n_poses < 1:
        raise ValueError(f"n_poses must be >= 1, got {n_poses}")
    bounds: Bounds = field.bounds
    center, radius = bounds.center, 0.5 * bounds.diag
    clearance = 0.05 * bounds.diag
    rng = np.random.default_rng(seed)
    cams: list[Camera] = []
    draws = 0
    while len(cams) < n_poses:
        draws += 1
        if draws > 1000 * n_poses:
            raise RejectionStarved("no camera position clear of the shape on the bounding sphere")
        d = rng.standard_normal(3)
        pos = center + radius * d / np.linalg.norm(d)
        if field.phi(pos[None, :])[0] <= clearance:
            continue
        fwd = center - pos
        up = [0.0, 1.0, 0.0] if abs(fwd[1]) < 0.99 * np.linalg.norm(fwd) else [0.0, 0.0, 1.0]
        cams.append(Camera(position=pos.tolist(), look_at=center.tolist(), up=up,
                           fov_deg=fov_deg, width=width, height=height))
    return cams
