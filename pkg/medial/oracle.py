"""
medial/oracle.py
Ground-truth medial field by spoke marching, and the medial projection.

Along the spoke from the foot point ``p`` in direction ``n = ∇|Φ|(x)`` an
exact field satisfies ``|Φ(p + t·n)| = t`` up to the medial radius and falls
below ``t`` afterwards. The march doubles ``t`` until that identity breaks
(or the exterior clamp ``r_max`` is reached), then bisects the bracket.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from core.constants import (
    ORACLE_BISECTIONS,
    ORACLE_MAX_DOUBLINGS,
    ORACLE_R_MAX_DIAGS,
    ORACLE_SLACK_REL,
    ORACLE_TOL_REL,
    SIDE_EXTERIOR,
    SIDE_INTERIOR,
)
from core.errors import SpokeMarchFailed
from core.math_utils import as_points
from fields.base import DistanceField
from fields.ops import eval_grad, unit_gradient

logger = logging.getLogger(__name__)

IDENTITY_TOL_REL = 1e-4   # x diag, allowed |Φ(foot)| before the spoke identity counts as broken


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class OracleConfig(BaseModel):
    """
    Spoke-march settings. ``None`` lengths are derived from the scene diagonal
    by :meth:`resolve`.

    ``tol`` is the boundary band: queries with ``|Φ| <= tol`` have no spoke,
    and the march starts at ``t >= tol``. ``slack`` is the rounding allowance
    on the spoke identity and the bracket width at which bisection stops;
    ``bisections`` caps the number of halvings.
    """

    r_max: Optional[float] = Field(default=None, gt=0.0)
    tol: Optional[float] = Field(default=None, gt=0.0)
    slack: Optional[float] = Field(default=None, ge=0.0)
    identity_tol: Optional[float] = Field(default=None, gt=0.0)
    max_doublings: int = Field(default=ORACLE_MAX_DOUBLINGS, ge=1, le=1024)
    bisections: int = Field(default=ORACLE_BISECTIONS, ge=1, le=200)

    def resolve(self, diag: float) -> "OracleConfig":
        cfg = self.model_copy(update={
            "r_max": self.r_max if self.r_max is not None else ORACLE_R_MAX_DIAGS * diag,
            "tol": self.tol if self.tol is not None else ORACLE_TOL_REL * diag,
            "slack": self.slack if self.slack is not None else ORACLE_SLACK_REL * diag,
            "identity_tol": self.identity_tol if self.identity_tol is not None else IDENTITY_TOL_REL * diag,
        })
        if cfg.r_max < diag:
            raise ValueError(f"r_max={cfg.r_max} must be >= scene diagonal {diag}")
        return cfg


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MedialSample:
    query: np.ndarray
    foot: np.ndarray
    medial_center: np.ndarray
    radius: float
    clamped: bool


@dataclass(frozen=True)
class MedialBatch:
    """Oracle results for ``n`` queries; ``defined`` is False where ∇Φ vanished."""
    query: np.ndarray
    foot: np.ndarray
    medial_center: np.ndarray
    radius: np.ndarray
    clamped: np.ndarray
    defined: np.ndarray

    def __len__(self) -> int:
        return int(self.radius.shape[0])

    def __getitem__(self, i: int) -> MedialSample:
        return MedialSample(
            query=self.query[i],
            foot=self.foot[i],
            medial_center=self.medial_center[i],
            radius=float(self.radius[i]),
            clamped=bool(self.clamped[i]),
        )


# ---------------------------------------------------------------------------
# Medial projection
# ---------------------------------------------------------------------------


def medial_project_batch(
    field: DistanceField, mf_values: np.ndarray, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    ``x + ∇|Φ(x)|·(MF − |Φ(x)|)`` for a batch.

    Returns
    -------
    tuple
        ``(centers, defined)``; rows with an undefined gradient return ``x``.
    """
    pts, _ = as_points(points)
    phi = field.phi(pts)
    unit, defined = unit_gradient(field, pts)
    n = np.sign(phi)[:, None] * unit
    return pts + n * (np.asarray(mf_values, dtype=np.float64) - np.abs(phi))[:, None], defined


def medial_project(field: DistanceField, mf_value, x: np.ndarray) -> np.ndarray:
    """
    Medial projection of *x* given its medial-field value.

    ``mf_value`` is not required to dominate ``|Φ(x)|``; a smaller value
    projects back towards the surface, which is what the inscription
    residual measures on candidate fields.

    Raises
    ------
    GradientUndefined
        If *x* sits on the medial locus.
    """
    pts, single = as_points(x)
    phi = field.phi(pts)
    n = np.sign(phi)[:, None] * eval_grad(field, pts).reshape(pts.shape)
    centers = pts + n * (np.asarray(mf_value, dtype=np.float64).reshape(-1) - np.abs(phi))[:, None]
    return centers[0] if single else centers


# ---------------------------------------------------------------------------
# Spoke marching
# ---------------------------------------------------------------------------


def oracle_batch(
    field: DistanceField,
    cfg: OracleConfig,
    points: np.ndarray,
    side: Optional[str] = None,
) -> MedialBatch:
    """
    Spoke-march every point in *points*.

    Parameters
    ----------
    field : DistanceField
        Exact signed distance field.
    cfg : OracleConfig
        Resolved or unresolved; unresolved lengths use ``field.bounds``.
    points : ndarray
        ``(n, d)`` queries.
    side : {"interior", "exterior"}, optional
        Forces the spoke orientation (used for boundary lattice nodes when
        baking one side). Defaults to ``sign(Φ)`` with zeros treated as
        exterior.
    """
    cfg = cfg.resolve(field.bounds.diag) if cfg.r_max is None or cfg.tol is None or cfg.slack is None else cfg
    pts, _ = as_points(points)
    phi = field.phi(pts)
    unit, defined = unit_gradient(field, pts)

    if side is None:
        s = np.where(phi < 0.0, -1.0, 1.0)
    elif side == SIDE_EXTERIOR:
        s = np.ones_like(phi)
    elif side == SIDE_INTERIOR:
        s = -np.ones_like(phi)
    else:
        raise ValueError(f"side must be {SIDE_INTERIOR!r} or {SIDE_EXTERIOR!r}, got {side!r}")

    n = s[:, None] * unit
    foot = pts - unit * phi[:, None]
    absphi = np.abs(phi)
    r_max, slack = float(cfg.r_max), float(cfg.slack)

    def holds(idx: np.ndarray, t: np.ndarray) -> np.ndarray:
        probe = foot[idx] + t[:, None] * n[idx]
        return np.abs(field.phi(probe)) >= t - slack

    t_lo = absphi.copy()
    t_hi = np.maximum(absphi, r_max)
    clamped = np.zeros(pts.shape[0], dtype=bool)

    # exponential doubling until the identity breaks
    active = np.flatnonzero(defined & (t_lo < r_max))
    clamped[defined & (t_lo >= r_max)] = True
    t = np.maximum(t_lo, float(cfg.tol))
    for _ in range(cfg.max_doublings):
        if active.size == 0:
            break
        t_next = np.minimum(2.0 * t[active], r_max)
        ok = holds(active, t_next)
        good, bad = active[ok], active[~ok]
        t_lo[good] = t_next[ok]
        t_hi[bad] = t_next[~ok]
        reached = good[t_next[ok] >= r_max]
        clamped[reached] = True
        t[good] = t_next[ok]
        active = good[t_next[ok] < r_max]
    if active.size:
        logger.warning("Spoke march ran out of doublings for %d queries; treating as clamped", active.size)
        clamped[active] = True

    # bisection on the first violation, until the bracket is within slack
    bracket = np.flatnonzero(defined & ~clamped)
    for _ in range(cfg.bisections):
        bracket = bracket[t_hi[bracket] - t_lo[bracket] > slack]
        if bracket.size == 0:
            break
        mid = 0.5 * (t_lo[bracket] + t_hi[bracket])
        ok = holds(bracket, mid)
        t_lo[bracket[ok]] = mid[ok]
        t_hi[bracket[~ok]] = mid[~ok]

    radius = t_lo.copy()
    center = foot + radius[:, None] * n

    # query on the medial locus: the spoke degenerates to the point itself
    radius = np.where(defined, radius, absphi)
    center = np.where(defined[:, None], center, pts)
    foot = np.where(defined[:, None], foot, pts)
    clamped &= defined

    return MedialBatch(query=pts, foot=foot, medial_center=center, radius=radius, clamped=clamped, defined=defined)


def mf_oracle(field: DistanceField, cfg: OracleConfig, x: np.ndarray) -> MedialSample:
    """
    Oracle medial sample for a single query point.

    Raises
    ------
    ValueError
        If *x* lies on ∂O (``|Φ(x)| <= tol``).
    SpokeMarchFailed
        If the spoke identity is already broken at the start of the spoke,
        i.e. the input field is not an exact distance field.
    """
    cfg = cfg.resolve(field.bounds.diag)
    pts, _ = as_points(x)
    phi = float(field.phi(pts)[0])
    if abs(phi) <= cfg.tol:
        raise ValueError(f"query {pts[0].tolist()} lies on the boundary (|phi|={abs(phi):.3g})")

    batch = oracle_batch(field, cfg, pts)
    sample = batch[0]
    if bool(batch.defined[0]):
        t0 = abs(phi)
        n = np.sign(phi) * unit_gradient(field, pts)[0][0]
        at_foot = abs(float(field.phi(sample.foot[None, :])[0]))
        at_query = abs(float(field.phi((sample.foot + t0 * n)[None, :])[0]))
        if at_foot > cfg.identity_tol or abs(at_query - t0) > cfg.identity_tol:
            raise SpokeMarchFailed(
                f"spoke identity broken at {pts[0].tolist()}: |phi(foot)|={at_foot:.3g}, "
                f"|phi(foot + |phi| n)|={at_query:.3g} vs {t0:.3g}"
            )
    return sample


# ---------------------------------------------------------------------------
# MedialField backend
# ---------------------------------------------------------------------------


class OracleMedialField:
    """MedialField that runs the spoke march on every query."""

    def __init__(self, field: DistanceField, cfg: Optional[OracleConfig] = None) -> None:
        self.field = field
        self.dim = field.dim
        self.cfg = (cfg or OracleConfig()).resolve(field.bounds.diag)

    def sample(self, points: np.ndarray) -> MedialBatch:
        return oracle_batch(self.field, self.cfg, points)

    def mf(self, points: np.ndarray) -> np.ndarray:
        return self.sample(points).radius

    def clamped(self, points: np.ndarray) -> np.ndarray:
        return self.sample(points).clamped
