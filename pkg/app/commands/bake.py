"""
app/commands/bake.py
`bake`: sample Φ, or both sides of MF, onto a lattice and write grid files.
"""

import argparse
import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field

from app.commands.common import add_scene_argument, oracle_config, sibling
from app.services.manifest import RunManifest
from core.constants import SIDE_EXTERIOR, SIDE_INTERIOR
from fields.grid import bake_grid
from fields.scene import load_scene
from medial.grid import bake_mf_grid

logger = logging.getLogger(__name__)


class BakeRequest(BaseModel):
    scene: str
    out: Path
    what: Literal["sdf", "mf"] = "sdf"
    res: int = Field(default=64, ge=2)
    r_max: Optional[float] = Field(default=None, gt=0.0)
    seed: int = 0


def register(subparsers) -> None:
    p = subparsers.add_parser("bake", help="bake Φ or MF onto a grid")
    add_scene_argument(p)
    p.add_argument("--what", choices=["sdf", "mf"], default="sdf")
    p.add_argument("--res", type=int, default=64, help="nodes per axis")
    p.add_argument("--r-max", type=float, default=None, help="exterior clamp radius (mf)")
    p.add_argument("--out", type=Path, required=True,
                   help="grid file; for mf, <stem>.interior<suffix> and <stem>.exterior<suffix> are written")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> RunManifest:
    req = BakeRequest.model_validate(vars(args))
    scene = load_scene(req.scene)
    res = (req.res,) * scene.dim
    config = {"request": req.model_dump(mode="json", exclude={"out"})}

    if req.what == "sdf":
        outputs = [str(bake_grid(scene.field, scene.bounds, res).save(req.out))]
    else:
        cfg = oracle_config(scene, req.r_max)
        config["oracle"] = cfg.model_dump(mode="json")
        outputs = []
        for side in (SIDE_INTERIOR, SIDE_EXTERIOR):
            grid = bake_mf_grid(scene.field, cfg, scene.bounds, res, side)
            outputs.append(str(grid.save(sibling(req.out, f".{side}{req.out.suffix}"))))

    return RunManifest(command="bake", scene=str(scene.path), seed=req.seed, outputs=outputs, config=config)
