"""
medial/residuals.py
Residuals of the three variational constraints a medial field must satisfy
(maximality, inscription, orthogonality) plus the spoke-constancy check.

Every ``*_residuals`` function is batched and returns a ResidualReport whose
``mask`` marks the points where the residual was actually evaluated; the
single-point ``residual_*`` functions wrap them.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from core.constants import EXCLUSION_BAND_REL, ORACLE_TOL_REL, ORTHOGONALITY_FD_REL
from core.errors import ExcludedRegion
from core.math_utils import as_points, rowdot
from fields.base import DistanceField, MedialField
from fields.ops import unit_gradient
from medial.oracle import medial_project_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualReport:
    """
    Per-point residual values.

    ``mask`` is True where the residual was evaluated; ``skipped`` counts
    clamped points (inscription) or exclusion-band points (orthogonality).
    """
    name: str
    values: np.ndarray
    mask: np.ndarray

    @property
    def evaluated(self) -> np.ndarray:
        return self.values[self.mask]

    @property
    def skipped(self) -> int:
        return int((~self.mask).sum())

    @property
    def max(self) -> float:
        v = self.evaluated
        return float(v.max()) if v.size else 0.0

    @property
    def mean(self) -> float:
        v = self.evaluated
        return float(v.mean()) if v.size else 0.0

    def summary(self) -> dict:
        v = self.evaluated
        return {
            "residual": self.name,
            "evaluated": int(v.size),
            "skipped": self.skipped,
            "mean": self.mean,
            "p50": float(np.quantile(v, 0.5)) if v.size else 0.0,
            "p99": float(np.quantile(v, 0.99)) if v.size else 0.0,
            "max": self.max,
        }


def _tol(field: DistanceField, tol: Optional[float]) -> float:
    return tol if tol is not None else ORACLE_TOL_REL * field.bounds.diag


# ---------------------------------------------------------------------------
# Batched residuals
# ---------------------------------------------------------------------------


def maximality_residuals(mf: MedialField, field: DistanceField, points: np.ndarray,
                         tol: Optional[float] = None) -> ResidualReport:
    """``max(|Φ| − MF, 0)``; boundary points (``|Φ| <= tol``) are not evaluated."""
    pts, _ = as_points(points)
    absphi = np.abs(field.phi(pts))
    values = np.maximum(absphi - mf.mf(pts), 0.0)
    return ResidualReport("maximality", values, absphi > _tol(field, tol))


def inscription_residuals(mf: MedialField, field: DistanceField, points: np.ndarray,
                          tol: Optional[float] = None) -> ResidualReport:
    """``| |Φ(Π_M(x))| − MF(x) |``, where Π_M uses the candidate MF itself; clamped points skip."""
    pts, _ = as_points(points)
    values_mf = mf.mf(pts)
    centers, defined = medial_project_batch(field, values_mf, pts)
    values = np.abs(np.abs(field.phi(centers)) - values_mf)
    clamped = mf.clamped(pts)
    mask = defined & ~clamped & (np.abs(field.phi(pts)) > _tol(field, tol))
    return ResidualReport("inscription", np.where(mask, values, 0.0), mask)


def orthogonality_residuals(mf: MedialField, field: DistanceField, points: np.ndarray,
                            fd_step: Optional[float] = None,
                            delta: Optional[float] = None) -> ResidualReport:
    """
    ``|∇MF · ∇Φ|`` with ∇MF by central differences.

    Points within ``delta`` of ∂O, or whose thickness excess ``MF − |Φ|``
    is below ``delta`` (near the medial locus), are excluded.
    """
    pts, _ = as_points(points)
    diag = field.bounds.diag
    h = fd_step if fd_step is not None else ORTHOGONALITY_FD_REL * diag
    delta = delta if delta is not None else EXCLUSION_BAND_REL * diag

    absphi = np.abs(field.phi(pts))
    values_mf = mf.mf(pts)
    grad, defined = unit_gradient(field, pts)
    mask = defined & (absphi >= delta) & (values_mf - absphi >= delta)

    values = np.zeros(pts.shape[0])
    idx = np.flatnonzero(mask)
    if idx.size:
        sub = pts[idx]
        grad_mf = np.empty_like(sub)
        for k in range(pts.shape[1]):
            e = np.zeros(pts.shape[1])
            e[k] = h
            grad_mf[:, k] = (mf.mf(sub + e) - mf.mf(sub - e)) / (2.0 * h)
        values[idx] = np.abs(rowdot(grad_mf, grad[idx]))
    return ResidualReport("orthogonality", values, mask)


def spoke_constancy(mf: MedialField, field: DistanceField, points: np.ndarray,
                    n_samples: int = 16, tol: Optional[float] = None) -> ResidualReport:
    """
    Largest deviation of MF along each query's spoke.

    The spoke starts at the foot point and runs along ∇|Φ| for ``MF(x)``;
    ``n_samples`` interior parameters ``t ∈ (tol, MF − tol)`` are probed.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    pts, _ = as_points(points)
    tol = _tol(field, tol)
    phi = field.phi(pts)
    unit, defined = unit_gradient(field, pts)
    n = np.sign(phi)[:, None] * unit
    foot = pts - unit * phi[:, None]
    values_mf = mf.mf(pts)
    mask = defined & (np.abs(phi) > tol) & (values_mf > 2.0 * tol)

    values = np.zeros(pts.shape[0])
    idx = np.flatnonzero(mask)
    if idx.size:
        k = np.arange(1, n_samples + 1) / (n_samples + 1)
        t = tol + (values_mf[idx, None] - 2.0 * tol) * k[None, :]                     # (m, n_samples)
        probes = foot[idx, None, :] + t[..., None] * n[idx, None, :]
        along = mf.mf(probes.reshape(-1, pts.shape[1])).reshape(idx.size, n_samples)
        values[idx] = np.max(np.abs(along - values_mf[idx, None]), axis=1)
    return ResidualReport("spoke_constancy", values, mask)


# ---------------------------------------------------------------------------
# Single-point forms
# ---------------------------------------------------------------------------


def residual_maximality(mf: MedialField, field: DistanceField, x: np.ndarray) -> float:
    pts, _ = as_points(x)
    return float(maximality_residuals(mf, field, pts).values[0])


def residual_inscription(mf: MedialField, field: DistanceField, x: np.ndarray) -> tuple[float, bool]:
    """Residual and whether it was skipped because MF is clamped at *x*."""
    pts, _ = as_points(x)
    report = inscription_residuals(mf, field, pts)
    return float(report.values[0]), bool(mf.clamped(pts)[0])


def residual_orthogonality(mf: MedialField, field: DistanceField, x: np.ndarray,
                           fd_step: Optional[float] = None, delta: Optional[float] = None) -> float:
    """
    Raises
    ------
    ExcludedRegion
        If *x* is within the exclusion band of ∂O or of the medial locus.
    """
    pts, _ = as_points(x)
    report = orthogonality_residuals(mf, field, pts, fd_step=fd_step, delta=delta)
    if not report.mask[0]:
        raise ExcludedRegion(f"{pts[0].tolist()} lies inside the exclusion band")
    return float(report.values[0])


def spoke_constancy_check(mf: MedialField, field: DistanceField, x: np.ndarray, n_samples: int = 16) -> float:
    pts, _ = as_points(x)
    return float(spoke_constancy(mf, field, pts, n_samples=n_samples).values[0])


# ---------------------------------------------------------------------------
# Audit
# ---------------------------------------------------------------------------


def audit(mf: MedialField, field: DistanceField, points: np.ndarray,
          n_spoke_samples: int = 8) -> tuple[list[ResidualReport], pd.DataFrame]:
    """All four residuals over *points* and a one-row-per-residual summary table."""
    reports = [
        maximality_residuals(mf, field, points),
        inscription_residuals(mf, field, points),
        orthogonality_residuals(mf, field, points),
        spoke_constancy(mf, field, points, n_samples=n_spoke_samples),
    ]
    table = pd.DataFrame([r.summary() for r in reports])
    table["clamped"] = int(np.count_nonzero(mf.clamped(as_points(points)[0])))
    for r in reports:
        logger.info("Residual %-16s max=%.3e mean=%.3e (%d skipped)", r.name, r.max, r.mean, r.skipped)
    return reports, table
