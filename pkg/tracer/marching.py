"""
tracer/marching.py
Naive and medial sphere tracing, vectorized over rays.

One iteration is one query bundle at the current point (Φ, plus ∇Φ and MF
for the medial backend); the final query that detects the hit counts too.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from core.constants import (
    STATUS_BUDGET,
    STATUS_HIT,
    STATUS_MISS,
    TRACE_EPSILON_REL,
    TRACE_MAX_ITERS,
    TRACE_T_MAX_DIAGS,
)
from core.math_utils import Ray, as_points, normalize_rows, rowdot
from fields.base import DistanceField, MedialField

logger = logging.getLogger(__name__)

_ACTIVE, _HIT, _MISS, _BUDGET = 0, 1, 2, 3
STATUS_NAMES = np.array(["active", STATUS_HIT, STATUS_MISS, STATUS_BUDGET])

# (positions, directions, absphi, medial step, accepted) for every stepping ray
StepHook = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray], None]


class TraceConfig(BaseModel):
    """
    Ray-marching settings. ``epsilon`` and ``t_max`` default to
    ``1e-4·diag`` and ``4·diag`` via :meth:`resolve`.
    """

    epsilon: Optional[float] = Field(default=None, gt=0.0)
    t_max: Optional[float] = Field(default=None, gt=0.0)
    max_iters: int = Field(default=TRACE_MAX_ITERS, ge=1)
    radius_scale: float = Field(default=1.0, gt=0.0, le=1.0)
    backend: Literal["naive", "medial"] = "naive"

    def resolve(self, diag: float) -> "TraceConfig":
        return self.model_copy(update={
            "epsilon": self.epsilon if self.epsilon is not None else TRACE_EPSILON_REL * diag,
            "t_max": self.t_max if self.t_max is not None else TRACE_T_MAX_DIAGS * diag,
        })


@dataclass(frozen=True)
class TraceResult:
    status: str
    point: np.ndarray
    t: float
    iterations: int


@dataclass(frozen=True)
class TraceBatch:
    points: np.ndarray
    t: np.ndarray
    iterations: np.ndarray
    codes: np.ndarray
    fallbacks: np.ndarray

    @property
    def status(self) -> np.ndarray:
        return STATUS_NAMES[self.codes]

    @property
    def hit(self) -> np.ndarray:
        return self.codes == _HIT

    def __getitem__(self, i: int) -> TraceResult:
        return TraceResult(
            status=str(STATUS_NAMES[self.codes[i]]),
            point=self.points[i],
            t=float(self.t[i]),
            iterations=int(self.iterations[i]),
        )


def medial_steps(
    field: DistanceField,
    mf: MedialField,
    x: np.ndarray,
    d: np.ndarray,
    phi: np.ndarray,
    radius_scale: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Exit distance of each ray from the medial sphere around its current point.

    Returns
    -------
    tuple
        ``(s, valid)``: ``s = β + √disc`` where ``disc >= 0`` (NaN otherwise)
        and ``valid`` marking rows with a defined gradient and real exit.
    """
    unit, defined = normalize_rows(field.gradient(x))
    absphi = np.abs(phi)
    n = np.sign(phi)[:, None] * unit
    values = mf.mf(x)
    center = x + n * (values - absphi)[:, None]
    radius = radius_scale * values
    offset = center - x
    beta = rowdot(offset, d)
    disc = beta * beta - (rowdot(offset, offset) - radius * radius)
    valid = defined & (disc >= 0.0)
    s = np.where(valid, beta + np.sqrt(np.where(valid, disc, 0.0)), np.nan)
    return s, valid


def trace_rays(
    field: DistanceField,
    origins: np.ndarray,
    directions: np.ndarray,
    cfg: TraceConfig,
    mf: Optional[MedialField] = None,
    on_step: Optional[StepHook] = None,
) -> TraceBatch:
    """
    March every ray until ``|Φ| < ε`` (hit), ``t > t_max`` (miss) or the
    iteration budget runs out.

    The medial backend steps to the exit of the medial sphere and falls back
    to the naive step ``|Φ|`` whenever that exit is not real or shorter than
    ``|Φ|``.
    """
    cfg = cfg.resolve(field.bounds.diag) if cfg.epsilon is None or cfg.t_max is None else cfg
    if cfg.backend == "medial" and mf is None:
        raise ValueError("medial tracing needs a medial field")
    origins, _ = as_points(origins)
    directions, _ = as_points(directions)
    n = origins.shape[0]

    x = origins.copy()
    t = np.zeros(n)
    iterations = np.zeros(n, dtype=np.int64)
    codes = np.full(n, _ACTIVE, dtype=np.int64)
    fallbacks = np.zeros(n, dtype=np.int64)
    active = np.arange(n)

    for _ in range(cfg.max_iters):
        if active.size == 0:
            break
        xa = x[active]
        phi = field.phi(xa)
        absphi = np.abs(phi)
        iterations[active] += 1

        hit = absphi < cfg.epsilon
        codes[active[hit]] = _HIT
        moving = ~hit
        idx = active[moving]
        step = absphi[moving]

        if cfg.backend == "medial" and idx.size:
            d = directions[idx]
            s, valid = medial_steps(field, mf, xa[moving], d, phi[moving], cfg.radius_scale)
            accept = valid & (s >= step)
            if on_step is not None:
                on_step(xa[moving], d, step, s, accept)
            fallbacks[idx[~accept]] += 1
            step = np.where(accept, s, step)

        t[idx] += step
        x[idx] = origins[idx] + t[idx, None] * directions[idx]
        gone = t[idx] > cfg.t_max
        codes[idx[gone]] = _MISS
        active = idx[~gone]

    codes[active] = _BUDGET
    if active.size:
        logger.debug("%d of %d rays exhausted %d iterations", active.size, n, cfg.max_iters)
    return TraceBatch(points=x, t=t, iterations=iterations, codes=codes, fallbacks=fallbacks)


def naive_trace(field: DistanceField, ray: Ray, cfg: TraceConfig) -> TraceResult:
    """Sphere tracing with step ``|Φ(x)|``."""
    cfg = cfg.model_copy(update={"backend": "naive"})
    return trace_rays(field, ray.origin[None, :], ray.direction[None, :], cfg)[0]


def medial_trace(field: DistanceField, mf: MedialField, ray: Ray, cfg: TraceConfig) -> TraceResult:
    """Sphere tracing that steps to the exit of the medial sphere."""
    cfg = cfg.model_copy(update={"backend": "medial"})
    return trace_rays(field, ray.origin[None, :], ray.direction[None, :], cfg, mf=mf)[0]
