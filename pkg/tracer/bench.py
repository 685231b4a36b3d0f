"""
tracer/bench.py
Iteration benchmark: both tracing backends over seeded orbit poses.
"""

import logging
from typing import Optional

import numpy as np
import pandas as pd

from fields.base import DistanceField, MedialField
from tracer.camera import orbit_poses
from tracer.marching import TraceConfig, trace_rays
from tracer.stats import IterationStats

logger = logging.getLogger(__name__)

BACKENDS = ("naive", "medial")


def bench_poses(
    field: DistanceField,
    mf: MedialField,
    n_poses: int,
    seed: int,
    cfg: Optional[TraceConfig] = None,
    width: int = 128,
    height: int = 128,
    fov_deg: float = 45.0,
) -> dict[str, IterationStats]:
    """
    Trace every pose with both backends.

    Returns
    -------
    dict
        ``{"naive": IterationStats, "medial": IterationStats}``.
    """
    cfg = (cfg or TraceConfig()).resolve(field.bounds.diag)
    cameras = orbit_poses(field, n_poses, seed, width=width, height=height, fov_deg=fov_deg)
    frames: dict[str, list] = {b: [] for b in BACKENDS}
    for k, cam in enumerate(cameras):
        origins, dirs = cam.rays()
        for backend in BACKENDS:
            batch = trace_rays(field, origins, dirs, cfg.model_copy(update={"backend": backend}), mf=mf)
            frames[backend].append(batch.iterations)
        logger.debug("pose %d: naive %.2f / medial %.2f", k,
                     frames["naive"][-1].mean(), frames["medial"][-1].mean())
    stats = {b: IterationStats.from_frames(frames[b]) for b in BACKENDS}
    logger.info("Bench over %d poses: naive mean %.3f, medial mean %.3f",
                n_poses, stats["naive"].mean, stats["medial"].mean)
    return stats


def bench_table(scene: str, stats: dict[str, IterationStats]) -> pd.DataFrame:
    """
    One ``scene,backend,mean,min,max,tail`` row per backend; ``tail`` is the
    fraction of rays needing more than twice the naive mean.
    """
    threshold = 2.0 * stats["naive"].mean if "naive" in stats else np.inf
    return pd.DataFrame(
        [{"scene": scene, "backend": b, **s.summary(), "tail": s.tail_fraction(threshold)} for b, s in stats.items()],
        columns=["scene", "backend", "mean", "min", "max", "tail"],
    )
