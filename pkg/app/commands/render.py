"""
app/commands/render.py
`render`: one image of a scene. 3D scenes are sphere traced through a
perspective camera; 2D scenes are drawn as orthographic field images.
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Literal, Optional

import pandas as pd
from pydantic import BaseModel, Field, field_validator

from app.commands.common import add_mf_arguments, add_scene_argument, oracle_config
from app.services.loaders import build_medial_field, load_neural, merged_config
from app.services.manifest import RunManifest
from fields.scene import Scene, load_scene
from tracer.camera import Camera, orbit_poses
from tracer.marching import TraceConfig
from tracer.render import render, visualize_field_2d
from tracer.shading import SHADING_MODES

logger = logging.getLogger(__name__)


class RenderRequest(BaseModel):
    scene: str
    out: Path
    stats: Optional[Path] = None
    backend: Literal["naive", "medial"] = "naive"
    mf: Literal["oracle", "grid", "neural"] = "oracle"
    field: Literal["analytic", "neural"] = "analytic"
    shading: str = "lambertian"
    view: Literal["phi", "mf"] = "phi"
    camera: Optional[Path] = None
    width: Optional[int] = Field(default=None, ge=2)
    height: Optional[int] = Field(default=None, ge=2)
    checkpoint: Optional[Path] = None
    grid_res: Optional[int] = Field(default=None, ge=2)
    r_max: Optional[float] = Field(default=None, gt=0.0)
    max_iters: Optional[int] = Field(default=None, ge=1)
    seed: int = 0

    @field_validator("shading")
    @classmethod
    def known_shading(cls, v: str) -> str:
        if v not in SHADING_MODES:
            raise ValueError(f"unknown shading {v!r}; expected one of {SHADING_MODES}")
        return v


def register(subparsers) -> None:
    p = subparsers.add_parser("render", help="render a scene to a PPM image")
    add_scene_argument(p)
    add_mf_arguments(p)
    p.add_argument("--backend", choices=["naive", "medial"], default="naive")
    p.add_argument("--field", choices=["analytic", "neural"], default="analytic",
                   help="distance field to trace (neural needs --checkpoint)")
    p.add_argument("--shading", choices=SHADING_MODES, default="lambertian")
    p.add_argument("--view", choices=["phi", "mf"], default="phi", help="2D scenes: which field to draw")
    p.add_argument("--camera", type=Path, default=None, help="camera JSON (default: scene camera or a seeded orbit pose)")
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--out", type=Path, required=True, help="output .ppm")
    p.add_argument("--stats", type=Path, default=None, help="iteration statistics CSV")
    p.set_defaults(handler=run)


def resolve_camera(req: RenderRequest, scene: Scene, field) -> Camera:
    """--camera file > scene camera defaults > seeded orbit pose."""
    if req.camera is not None:
        data = json.loads(req.camera.read_text(encoding="utf-8"))
    elif scene.defaults.camera:
        data = dict(scene.defaults.camera)
    else:
        data = orbit_poses(field, 1, req.seed).pop().model_dump()
    data.update({k: v for k, v in {"width": req.width, "height": req.height}.items() if v is not None})
    return Camera.model_validate(data)


def _render_2d(req: RenderRequest, scene: Scene, manifest: RunManifest) -> None:
    width = req.width or 256
    extent = scene.bounds.extent
    height = req.height or max(2, int(round(width * extent[1] / extent[0])))
    if req.view == "mf":
        mf = build_medial_field(scene, req.mf, oracle_config(scene, req.r_max), req.checkpoint, req.grid_res)
        image = visualize_field_2d(mf.mf, scene.bounds, (width, height), palette="magnitude")
    else:
        image = visualize_field_2d(scene.field.phi, scene.bounds, (width, height))
    image.save(req.out)
    manifest.outputs.append(str(req.out))
    if req.stats is not None:
        logger.warning("2D scenes are not traced; --stats ignored")


def run(args: argparse.Namespace) -> RunManifest:
    req = RenderRequest.model_validate(vars(args))
    scene = load_scene(req.scene)
    trace_cfg = merged_config(TraceConfig, scene.defaults.trace,
                              {"backend": req.backend, "max_iters": req.max_iters}).resolve(scene.diag)
    manifest = RunManifest(command="render", scene=str(scene.path), seed=req.seed, config={
        "request": req.model_dump(mode="json", exclude={"out", "stats"}),
        "trace": trace_cfg.model_dump(mode="json"),
    })
    if scene.dim == 2:
        _render_2d(req, scene, manifest)
        return manifest

    field = scene.field
    if req.field == "neural":
        field = load_neural(req.checkpoint, scene)[0]
    mf = None
    if req.backend == "medial" or req.shading == "lambertian+mfao":
        mf = build_medial_field(scene, req.mf, oracle_config(scene, req.r_max), req.checkpoint, req.grid_res)

    camera = resolve_camera(req, scene, scene.field)
    manifest.config["camera"] = camera.model_dump(mode="json")
    result = render(field, camera, trace_cfg, shading=req.shading, mf=mf)
    result.image.save(req.out)
    manifest.outputs.append(str(req.out))
    logger.info("Rendered %s with %s backend: mean %.3f iterations", scene.name, req.backend, result.stats.mean)

    if req.stats is not None:
        req.stats.parent.mkdir(parents=True, exist_ok=True)
        row = {"scene": scene.name, "backend": req.backend, **result.stats.summary(),
               "hits": int(result.trace.hit.sum()), "rays": result.stats.rays}
        pd.DataFrame([row]).to_csv(req.stats, index=False)
        manifest.outputs.append(str(req.stats))
    return manifest
