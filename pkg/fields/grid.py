"""
fields/grid.py
Lattice-sampled fields: baking, multilinear evaluation and the binary format.

File format: one JSON header line (origin, cell_size, resolution, optional
side tag and manifest id) followed by the node values as little-endian
float64, x-major (C order over axes).
"""

import json
import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from core.constants import GRID_FD_STEP_CELLS
from core.math_utils import Bounds, as_points, chunked
from fields.base import DistanceField

logger = logging.getLogger(__name__)

GRID_FORMAT = "gridfield/1"


@dataclass(frozen=True)
class GridField:
    """
    Φ (or MF) samples on a regular lattice with cubic cells.

    Node ``(i, j[, k])`` sits at ``origin + cell_size * (i, j[, k])``.
    """
    origin: np.ndarray
    cell_size: float
    resolution: tuple[int, ...]
    values: np.ndarray
    side: Optional[str] = None
    meta: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        origin = np.asarray(self.origin, dtype=np.float64).reshape(-1)
        resolution = tuple(int(r) for r in self.resolution)
        values = np.ascontiguousarray(self.values, dtype=np.float64).reshape(-1)
        if len(resolution) != origin.size or origin.size not in (2, 3):
            raise ValueError(f"resolution {resolution} does not match origin {origin}")
        if any(r < 2 for r in resolution):
            raise ValueError(f"resolution must be >= 2 per axis, got {resolution}")
        if self.cell_size <= 0.0:
            raise ValueError(f"cell_size must be > 0, got {self.cell_size}")
        if values.size != int(np.prod(resolution)):
            raise ValueError(f"expected {int(np.prod(resolution))} values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "values", values)

    # --- geometry ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.resolution)

    @property
    def memory_floats(self) -> int:
        return int(self.values.size)

    @cached_property
    def bounds(self) -> Bounds:
        hi = self.origin + self.cell_size * (np.asarray(self.resolution) - 1)
        return Bounds(self.origin, hi)

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(self.origin[k] + self.cell_size * np.arange(r) for k, r in enumerate(self.resolution))

    def nodes(self) -> np.ndarray:
        """Every lattice node, C order, shape ``(prod(resolution), d)``."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        return RegularGridInterpolator(
            self.axes,
            self.values.reshape(self.resolution),
            method="linear",
            bounds_error=False,
            fill_value=None,
        )

    # --- evaluation -------------------------------------------------------

    def interpolate(self, points: np.ndarray) -> np.ndarray:
        """Multilinear interpolation of the stored values (points clamped to the lattice)."""
        p, _ = as_points(points)
        clamped = np.clip(p, self.bounds.lo, self.bounds.hi)
        return chunked(self._interpolator, clamped)

    def phi(self, points: np.ndarray) -> np.ndarray:
        """Interpolated value plus the distance to the lattice box for outside points."""
        p, _ = as_points(points)
        clamped = np.clip(p, self.bounds.lo, self.bounds.hi)
        return chunked(self._interpolator, clamped) + np.linalg.norm(p - clamped, axis=1)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        h = GRID_FD_STEP_CELLS * self.cell_size
        g = np.empty_like(p)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            g[:, k] = (self.phi(p + e) - self.phi(p - e)) / (2.0 * h)
        return g

    # --- persistence ------------------------------------------------------

    def header(self) -> dict:
        head = {
            "format": GRID_FORMAT,
            "dim": self.dim,
            "origin": self.origin.tolist(),
            "cell_size": self.cell_size,
            "resolution": list(self.resolution),
        }
        if self.side is not None:
            head["side"] = self.side
        head.update(self.meta)
        return head

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            fh.write(json.dumps(self.header(), sort_keys=True).encode("utf-8") + b"\n")
            fh.write(self.values.astype("<f8").tobytes())
        logger.info("Wrote grid %s (%s nodes, side=%s)", path, self.values.size, self.side)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GridField":
        raw = Path(path).read_bytes()
        line, sep, blob = raw.partition(b"\n")
        if not sep:
            raise ValueError(f"{path}: missing grid header line")
        head = json.loads(line.decode("utf-8"))
        if head.get("format") != GRID_FORMAT:
            raise ValueError(f"{path}: not a grid field file (format={head.get('format')!r})")
        values = np.frombuffer(blob, dtype="<f8").astype(np.float64)
        known = {"format", "dim", "origin", "cell_size", "resolution", "side"}
        return cls(
            origin=np.asarray(head["origin"]),
            cell_size=float(head["cell_size"]),
            resolution=tuple(head["resolution"]),
            values=values,
            side=head.get("side"),
            meta={k: v for k, v in head.items() if k not in known},
        )


# ---------------------------------------------------------------------------
# Baking
# ---------------------------------------------------------------------------


def lattice_for(bounds: Bounds, resolution: Sequence[int]) -> tuple[np.ndarray, float, tuple[int, ...]]:
    """
    Origin and cubic cell size of a lattice covering *bounds*.

    The cell is the largest per-axis spacing, so the lattice covers the box
    on every axis (and overshoots on the finer ones).
    """
    res = tuple(int(r) for r in resolution)
    if len(res) != bounds.dim:
        raise ValueError(f"resolution {res} does not match {bounds.dim}D bounds")
    if any(r < 2 for r in res):
        raise ValueError(f"resolution must be >= 2 per axis, got {res}")
    cell = float(np.max(bounds.extent / (np.asarray(res) - 1)))
    return bounds.lo.copy(), cell, res


def bake_grid(field: DistanceField, bounds: Bounds, resolution: Sequence[int]) -> GridField:
    """Sample ``field.phi`` at every lattice node covering *bounds*."""
    origin, cell, res = lattice_for(bounds, resolution)
    proto = GridField(origin, cell, res, np.zeros(int(np.prod(res))))
    values = chunked(field.phi, proto.nodes())
    logger.info("Baked SDF grid %s over %s..%s (cell=%.4g)", res, bounds.lo, bounds.hi, cell)
    return GridField(origin, cell, res, values)
