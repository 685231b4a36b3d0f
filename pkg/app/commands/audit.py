"""
app/commands/audit.py
`audit`: residuals of the four medial-field constraints for a chosen MF
backend, optionally corrupted on purpose.
"""

import argparse
import logging
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from app.commands.common import add_mf_arguments, add_scene_argument, oracle_config
from app.services.loaders import build_medial_field
from app.services.manifest import RunManifest
from fields.base import DistanceField, MedialField
from fields.scene import load_scene
from medial.corrupted import OffsetMedialField, ScaledMedialField, UnsignedDistanceMedialField
from medial.residuals import audit

logger = logging.getLogger(__name__)

CORRUPTIONS = ("scale", "offset", "unsigned")


def corrupt(mf: MedialField, field: DistanceField, spec: Optional[str]) -> MedialField:
    """Apply ``scale:<k>``, ``offset:<v>`` (scene units) or ``unsigned`` to *mf*."""
    if spec is None:
        return mf
    kind, _, arg = spec.partition(":")
    if kind == "unsigned":
        return UnsignedDistanceMedialField(field)
    if kind == "scale":
        return ScaledMedialField(mf, float(arg))
    if kind == "offset":
        return OffsetMedialField(mf, float(arg))
    raise ValueError(f"unknown corruption {spec!r}; expected one of {CORRUPTIONS}")


class AuditRequest(BaseModel):
    scene: str
    out: Path
    samples: int = Field(default=10_000, ge=1)
    spoke_samples: int = Field(default=8, ge=1)
    corrupt: Optional[str] = None
    mf: Literal["oracle", "grid", "neural"] = "oracle"
    checkpoint: Optional[Path] = None
    grid_res: Optional[int] = Field(default=None, ge=2)
    r_max: Optional[float] = Field(default=None, gt=0.0)
    seed: int = 0

    @field_validator("corrupt")
    @classmethod
    def known_corruption(cls, v: Optional[str]) -> Optional[str]:
        if v is None:
            return v
        kind, _, arg = v.partition(":")
        if kind not in CORRUPTIONS:
            raise ValueError(f"unknown corruption {v!r}; expected one of {CORRUPTIONS}")
        if kind != "unsigned":
            float(arg)
        return v


def register(subparsers) -> None:
    p = subparsers.add_parser("audit", help="residuals of the medial field constraints")
    add_scene_argument(p)
    add_mf_arguments(p)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--spoke-samples", type=int, default=8)
    p.add_argument("--corrupt", default=None, help="scale:<k>, offset:<v> or unsigned")
    p.add_argument("--out", type=Path, required=True, help="residual summary CSV")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> RunManifest:
    req = AuditRequest.model_validate(vars(args))
    scene = load_scene(req.scene)
    cfg = oracle_config(scene, req.r_max)
    mf = corrupt(build_medial_field(scene, req.mf, cfg, req.checkpoint, req.grid_res), scene.field, req.corrupt)

    rng = np.random.default_rng(req.seed)
    points = rng.uniform(scene.bounds.lo, scene.bounds.hi, size=(req.samples, scene.dim))
    _, table = audit(mf, scene.field, points, n_spoke_samples=req.spoke_samples)
    table.insert(0, "scene", scene.name)
    table.insert(1, "backend", req.mf if req.corrupt is None else f"{req.mf}+{req.corrupt}")
    req.out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(req.out, index=False)

    return RunManifest(command="audit", scene=str(scene.path), seed=req.seed, outputs=[str(req.out)], config={
        "request": req.model_dump(mode="json", exclude={"out"}),
        "oracle": cfg.model_dump(mode="json"),
    })
