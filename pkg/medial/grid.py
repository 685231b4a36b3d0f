"""
medial/grid.py
Baked medial-field grids, one per side of ∂O, and the MedialField backend
that queries them by the sign of Φ.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from core.constants import SIDE_EXTERIOR, SIDE_INTERIOR
from core.math_utils import Bounds, as_points, chunked
from fields.base import DistanceField
from fields.grid import GridField, lattice_for
from medial.oracle import OracleConfig, oracle_batch

logger = logging.getLogger(__name__)


def bake_mf_grid(
    field: DistanceField,
    cfg: OracleConfig,
    bounds: Bounds,
    resolution: Sequence[int],
    side: str,
) -> GridField:
    """
    Oracle MF at every lattice node for one side of ∂O.

    Nodes on the other side store the value of the nearest same-side node so
    multilinear interpolation near ∂O never blends the two sides. If the side
    is empty on this lattice every node stores ``r_max`` (exterior) or 0.
    """
    if side not in (SIDE_INTERIOR, SIDE_EXTERIOR):
        raise ValueError(f"side must be {SIDE_INTERIOR!r} or {SIDE_EXTERIOR!r}, got {side!r}")
    cfg = cfg.resolve(field.bounds.diag)
    origin, cell, res = lattice_for(bounds, resolution)
    proto = GridField(origin, cell, res, np.zeros(int(np.prod(res))))
    nodes = proto.nodes()

    phi = chunked(field.phi, nodes)
    on_side = phi <= cfg.tol if side == SIDE_INTERIOR else phi >= -cfg.tol
    values = np.empty(nodes.shape[0])

    if not on_side.any():
        values[:] = cfg.r_max if side == SIDE_EXTERIOR else 0.0
        logger.warning("No %s nodes on a %s lattice; filled with a constant", side, res)
    else:
        idx = np.flatnonzero(on_side)
        values[idx] = chunked(lambda p: oracle_batch(field, cfg, p, side=side).radius, nodes[idx])
        # nearest same-side node for the rest
        mask = ~on_side.reshape(res)
        _, nearest = ndimage.distance_transform_edt(mask, return_indices=True)
        flat = np.ravel_multi_index(tuple(nearest), res)
        values = values[flat].reshape(-1)

    logger.info("Baked %s MF grid %s (cell=%.4g, r_max=%.4g)", side, res, cell, cfg.r_max)
    return GridField(origin, cell, res, values, side=side, meta={"r_max": float(cfg.r_max)})


class GridMedialField:
    """
    MedialField over two baked side grids.

    Parameters
    ----------
    interior, exterior : GridField
        Side-tagged MF grids.
    field : DistanceField
        Φ used to choose the side at query time.
    """

    def __init__(self, interior: GridField, exterior: GridField, field: DistanceField,
                 r_max: Optional[float] = None, tol: Optional[float] = None) -> None:
        if interior.side not in (None, SIDE_INTERIOR) or exterior.side not in (None, SIDE_EXTERIOR):
            raise ValueError(f"grid sides swapped: got {interior.side!r} / {exterior.side!r}")
        self.interior = interior
        self.exterior = exterior
        self.field = field
        self.dim = field.dim
        self.r_max = float(r_max if r_max is not None else exterior.meta.get("r_max", np.inf))
        self.tol = tol if tol is not None else 1e-6 * field.bounds.diag

    def _split(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pts, _ = as_points(points)
        outside = self.field.phi(pts) > 0.0
        values = np.where(outside, self.exterior.interpolate(pts), self.interior.interpolate(pts))
        return pts, outside, values

    def mf(self, points: np.ndarray) -> np.ndarray:
        return self._split(points)[2]

    def clamped(self, points: np.ndarray) -> np.ndarray:
        _, outside, values = self._split(points)
        return outside & (values >= self.r_max - self.tol)
