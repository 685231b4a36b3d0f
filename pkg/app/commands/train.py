"""
app/commands/train.py
`train`: fit the medial network to a scene and write a checkpoint plus the
per-step loss log.
"""

import argparse
import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field

from app.commands.common import add_scene_argument, sibling
from app.services.manifest import RunManifest
from app.services.loaders import merged_config
from fields.scene import load_scene
from neural.checkpoint import save_checkpoint
from neural.training import TrainConfig, train

logger = logging.getLogger(__name__)


class TrainRequest(BaseModel):
    scene: str
    out: Path
    loss_csv: Optional[Path] = None
    steps: Optional[int] = Field(default=None, ge=1)
    batch_size: Optional[int] = Field(default=None, ge=1)
    lr: Optional[float] = Field(default=None, gt=0.0)
    width: Optional[int] = Field(default=None, ge=1)
    sigma_mode: Optional[Literal["desk", "paper"]] = None
    ablate_medial: Optional[bool] = None
    seed: int = 0


def register(subparsers) -> None:
    p = subparsers.add_parser("train", help="train a neural medial field")
    add_scene_argument(p)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--width", type=int, default=None, help="hidden width of the backbone")
    p.add_argument("--sigma-mode", choices=["desk", "paper"], default=None,
                   help="volume sample spread: 0.5*diag (desk) or 2*diag (paper)")
    p.add_argument("--ablate-medial", action="store_const", const=True, default=None,
                   help="zero the maximal, inscribed and orthogonal loss weights")
    p.add_argument("--out", type=Path, required=True, help="checkpoint path")
    p.add_argument("--loss-csv", type=Path, default=None, help="loss log (default: <out>.loss.csv)")
    p.set_defaults(handler=run)


def train_config(req: TrainRequest, scene_block: dict) -> TrainConfig:
    block = dict(scene_block)
    if req.width is not None:
        block["architecture"] = {**block.get("architecture", {}), "width": req.width}
    return merged_config(TrainConfig, block, {
        "steps": req.steps, "batch_size": req.batch_size, "lr": req.lr, "seed": req.seed,
        "sigma_mode": req.sigma_mode, "ablate_medial": req.ablate_medial,
    })


def run(args: argparse.Namespace) -> RunManifest:
    req = TrainRequest.model_validate(vars(args))
    scene = load_scene(req.scene)
    cfg = train_config(req, scene.defaults.train)

    result = train(scene.field, cfg)
    ckpt = save_checkpoint(result.net, req.out, train_cfg=cfg.model_dump(mode="json"),
                           extra={"scene": scene.name})
    loss_csv = req.loss_csv or sibling(req.out, ".loss.csv")
    loss_csv.parent.mkdir(parents=True, exist_ok=True)
    result.log.to_csv(loss_csv, index=False)
    logger.info("Training loss %.6g -> %.6g", result.initial_total, result.final_total)

    return RunManifest(command="train", scene=str(scene.path), seed=req.seed,
                       outputs=[str(ckpt), str(loss_csv)],
                       config={"train": cfg.model_dump(mode="json")})
