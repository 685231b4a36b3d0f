"""
proxies/baselines.py
Comparison proxies: SDF-tangent spheres at random interior points, spheres
on a regular lattice, and a baked SDF grid.
"""

from typing import Sequence, Union

import numpy as np

from core.constants import KIND_TANGENT, KIND_UNIFORM
from fields.base import DistanceField
from fields.grid import GridField, bake_grid
from fields.surface import sample_interior
from proxies.spheres import ProxySet, Spheres

GridRes = Union[int, Sequence[int]]


def _per_axis(grid_res: GridRes, dim: int) -> tuple[int, ...]:
    res = (int(grid_res),) * dim if np.isscalar(grid_res) else tuple(int(r) for r in grid_res)
    if len(res) != dim or any(r < 1 for r in res):
        raise ValueError(f"grid_res must give {dim} positive counts, got {grid_res}")
    return res


def baseline_tangent(field: DistanceField, n: int, seed: int) -> ProxySet:
    """``n`` uniform interior points with radius ``|Φ|``."""
    points = sample_interior(field, n, np.random.default_rng(seed))
    return ProxySet(Spheres(points, np.abs(field.phi(points))), KIND_TANGENT)


def baseline_uniform(field: DistanceField, grid_res: GridRes) -> ProxySet:
    """
    One sphere per lattice cell whose center is inside the shape, radius
    ``min(half cell diagonal, |Φ(center)|)`` so every sphere stays empty.
    """
    bounds = field.bounds
    res = _per_axis(grid_res, field.dim)
    cell = bounds.extent / np.asarray(res)
    axes = [bounds.lo[k] + cell[k] * (np.arange(res[k]) + 0.5) for k in range(field.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.reshape(-1) for m in mesh], axis=1)
    phi = field.phi(centers)
    inside = phi < 0.0
    radii = np.minimum(0.5 * float(np.linalg.norm(cell)), np.abs(phi[inside]))
    return ProxySet(Spheres(centers[inside], radii) if inside.any() else Spheres.empty(field.dim), KIND_UNIFORM)


def baseline_sdf_grid(field: DistanceField, grid_res: GridRes) -> GridField:
    """Φ baked on a lattice over the scene box; memory is one float per node."""
    res = tuple(max(r, 2) for r in _per_axis(grid_res, field.dim))
    return bake_grid(field, field.bounds, res)
