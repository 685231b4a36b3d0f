"""
app/commands/bench.py
`bench`: naive vs medial iteration counts over seeded camera poses.
"""

import argparse
import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field

from app.commands.common import add_mf_arguments, add_scene_argument, oracle_config, sibling
from app.services.loaders import build_medial_field, merged_config
from app.services.manifest import RunManifest
from core.errors import Dim2NotRenderable
from fields.scene import load_scene
from tracer.bench import bench_poses, bench_table
from tracer.marching import TraceConfig

logger = logging.getLogger(__name__)


class BenchRequest(BaseModel):
    scene: str
    out: Path
    poses: int = Field(default=16, ge=1)
    width: int = Field(default=128, ge=1)
    height: int = Field(default=128, ge=1)
    fov: float = Field(default=45.0, gt=0.0, lt=180.0)
    mf: Literal["oracle", "grid", "neural"] = "oracle"
    checkpoint: Optional[Path] = None
    grid_res: Optional[int] = Field(default=None, ge=2)
    r_max: Optional[float] = Field(default=None, gt=0.0)
    max_iters: Optional[int] = Field(default=None, ge=1)
    seed: int = 0


def register(subparsers) -> None:
    p = subparsers.add_parser("bench", help="compare tracing iterations of both backends")
    add_scene_argument(p)
    add_mf_arguments(p)
    p.add_argument("--poses", type=int, default=16)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=128)
    p.add_argument("--fov", type=float, default=45.0)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--out", type=Path, required=True, help="summary CSV; histograms go next to it")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> RunManifest:
    req = BenchRequest.model_validate(vars(args))
    scene = load_scene(req.scene)
    if scene.dim != 3:
        raise Dim2NotRenderable(f"bench traces perspective rays; {scene.name} is {scene.dim}D")
    trace_cfg = merged_config(TraceConfig, scene.defaults.trace, {"max_iters": req.max_iters}).resolve(scene.diag)
    mf = build_medial_field(scene, req.mf, oracle_config(scene, req.r_max), req.checkpoint, req.grid_res)

    stats = bench_poses(scene.field, mf, req.poses, req.seed, trace_cfg,
                        width=req.width, height=req.height, fov_deg=req.fov)
    req.out.parent.mkdir(parents=True, exist_ok=True)
    bench_table(scene.name, stats).to_csv(req.out, index=False)
    outputs = [str(req.out)]
    for backend, s in stats.items():
        hist = sibling(req.out, f".{backend}.hist.csv")
        s.histogram_frame().to_csv(hist, index=False)
        outputs.append(str(hist))

    return RunManifest(command="bench", scene=str(scene.path), seed=req.seed, outputs=outputs, config={
        "request": req.model_dump(mode="json", exclude={"out"}),
        "trace": trace_cfg.model_dump(mode="json"),
    })
