"""
tracer/render.py
Perspective renders of 3D scenes and orthographic scalar-field images of 2D ones.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from core.errors import Dim2NotRenderable
from core.math_utils import Bounds, normalize_rows
from fields.base import DistanceField, MedialField
from tracer.camera import Camera
from tracer.image import Image, to_uint8
from tracer.marching import TraceBatch, TraceConfig, trace_rays
from tracer.shading import mfao_batch, shade
from tracer.stats import IterationStats

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RenderResult:
    image: Image
    stats: IterationStats
    trace: TraceBatch


def render(
    field: DistanceField,
    camera: Camera,
    cfg: TraceConfig,
    shading: str = "lambertian",
    mf: Optional[MedialField] = None,
) -> RenderResult:
    """
    Trace one primary ray per pixel and shade the hits.

    ``mf`` is required for the medial backend and for ``lambertian+mfao``.

    Raises
    ------
    Dim2NotRenderable
        For 2D scenes; use :func:`visualize_field_2d` instead.
    """
    if field.dim != 3:
        raise Dim2NotRenderable(f"perspective rendering needs a 3D scene, got {field.dim}D")
    if shading == "lambertian+mfao" and mf is None:
        raise ValueError("lambertian+mfao shading needs a medial field")
    cfg = cfg.resolve(field.bounds.diag)

    origins, dirs = camera.rays()
    batch = trace_rays(field, origins, dirs, cfg, mf=mf)
    hit = batch.hit

    normals = np.zeros_like(origins)
    ao = None
    if hit.any():
        normals[hit], _ = normalize_rows(field.gradient(batch.points[hit]))
        if shading == "lambertian+mfao":
            ao = np.ones(hit.shape[0])
            ao[hit] = mfao_batch(mf, field, batch.points[hit], eps_off=2.0 * cfg.epsilon)

    rgb = shade(shading, hit, normals, batch.iterations, ao)
    stats = IterationStats.from_frames([batch.iterations])
    logger.debug("Rendered %dx%d (%s, %s): %d hits, mean %.2f iterations",
                 camera.width, camera.height, cfg.backend, shading, int(hit.sum()), stats.mean)
    return RenderResult(image=Image.from_rows(rgb, camera.width, camera.height), stats=stats, trace=batch)


# ---------------------------------------------------------------------------
# 2D field images
# ---------------------------------------------------------------------------


def lattice_points(bounds: Bounds, resolution: Sequence[int]) -> np.ndarray:
    """Pixel sample points: corners of the image hit the corners of *bounds*, top row at ``hi[1]``."""
    width, height = int(resolution[0]), int(resolution[1])
    if width < 2 or height < 2:
        raise ValueError(f"image resolution must be >= 2 per axis, got {resolution}")
    xs = np.linspace(bounds.lo[0], bounds.hi[0], width)
    ys = np.linspace(bounds.hi[1], bounds.lo[1], height)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return np.stack([xx.reshape(-1), yy.reshape(-1)], axis=1)


def palette_colors(values: np.ndarray, scale: float, palette: Literal["sign_split", "magnitude"]) -> np.ndarray:
    """Scalar values to float RGB: blue inside, orange outside (``sign_split``) or gray levels."""
    t = np.clip(np.abs(values) / scale, 0.0, 1.0)[:, None]
    if palette == "magnitude":
        return np.repeat(t, 3, axis=1)
    if palette != "sign_split":
        raise ValueError(f"unknown palette {palette!r}")
    outside = np.array([0.95, 0.55, 0.15])
    inside = np.array([0.15, 0.45, 0.95])
    base = np.where(values[:, None] > 0.0, outside, inside)
    # fade from white at the zero level to the full hue at |v| >= scale
    return 1.0 - t * (1.0 - base)


def visualize_field_2d(
    values_fn: Callable[[np.ndarray], np.ndarray],
    bounds: Bounds,
    resolution: Sequence[int],
    palette: Literal["sign_split", "magnitude"] = "sign_split",
    scale: Optional[float] = None,
) -> Image:
    """
    Orthographic image of a scalar field (Φ or MF) over a 2D box.

    ``scale`` is the magnitude mapped to full color, half the box diagonal
    by default.
    """
    if bounds.dim != 2:
        raise ValueError(f"field visualization takes 2D bounds, got {bounds.dim}D")
    pts = lattice_points(bounds, resolution)
    values = np.asarray(values_fn(pts), dtype=np.float64)
    scale = scale if scale is not None else 0.5 * bounds.diag
    rgb = to_uint8(palette_colors(values, scale, palette))
    return Image.from_rows(rgb, int(resolution[0]), int(resolution[1]))
