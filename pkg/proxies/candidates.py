"""
proxies/candidates.py
Medial sphere candidates: uniform interior points mapped onto the medial
axis by the medial projection, de-duplicated.
"""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.spatial import cKDTree

from core.constants import DEDUP_TOL_REL, FSS_DEFAULT_SELECT, FSS_EPSILON_REL
from fields.base import DistanceField, MedialField
from fields.surface import sample_interior
from medial.oracle import medial_project_batch
from proxies.spheres import Spheres

logger = logging.getLogger(__name__)


class FssConfig(BaseModel):
    """
    Candidate count N, selection count M ≤ N, separation bias ε (default 0.05·diag).

    An unset M is ``min(64, N)``; an explicit M above N is rejected.
    """

    n_candidates: int = Field(default=4096, ge=1)
    m_select: Optional[int] = Field(default=None, ge=1)
    epsilon: Optional[float] = Field(default=None, ge=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def select_within_candidates(self) -> "FssConfig":
        if self.m_select is None:
            self.m_select = min(FSS_DEFAULT_SELECT, self.n_candidates)
        elif self.m_select > self.n_candidates:
            raise ValueError(f"m_select={self.m_select} exceeds n_candidates={self.n_candidates}")
        return self

    def resolve(self, diag: float) -> "FssConfig":
        eps = self.epsilon if self.epsilon is not None else FSS_EPSILON_REL * diag
        return self.model_copy(update={"epsilon": eps})


def dedupe_centers(centers: np.ndarray, tol: float) -> np.ndarray:
    """Indices of the first center of every cluster closer than *tol*, in input order."""
    if centers.shape[0] == 0:
        return np.empty(0, dtype=np.int64)
    tree = cKDTree(centers)
    keep = np.ones(centers.shape[0], dtype=bool)
    for i in range(centers.shape[0]):
        if keep[i]:
            keep[tree.query_ball_point(centers[i], r=tol)] = False
            keep[i] = True
    return np.flatnonzero(keep)


def sample_medial_candidates(field: DistanceField, mf: MedialField, cfg: FssConfig) -> Spheres:
    """
    ``cfg.n_candidates`` interior points, each replaced by its medial sphere.

    Clamped and degenerate spokes are dropped; centers within ``1e-5·diag``
    of an earlier one are merged into it.

    Raises
    ------
    RejectionStarved
        If the interior is too small to sample.
    """
    rng = np.random.default_rng(cfg.seed)
    points = sample_interior(field, cfg.n_candidates, rng)
    radii = mf.mf(points)
    centers, defined = medial_project_batch(field, radii, points)
    ok = defined & ~mf.clamped(points) & (radii > 0.0)
    centers, radii = centers[ok], radii[ok]

    keep = dedupe_centers(centers, DEDUP_TOL_REL * field.bounds.diag)
    logger.info("Medial candidates: %d sampled, %d valid, %d after de-duplication",
                cfg.n_candidates, int(ok.sum()), keep.size)
    return Spheres(centers[keep], radii[keep])
