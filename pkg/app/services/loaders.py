"""
app/services/loaders.py
Scene, medial-field backend and checkpoint loading for the CLI, plus the
flags > scene defaults > built-ins merge for per-run config models.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from pydantic import BaseModel

from core.constants import SIDE_EXTERIOR, SIDE_INTERIOR
from core.errors import CheckpointError
from fields.base import MedialField
from fields.scene import Scene
from medial.grid import GridMedialField, bake_mf_grid
from medial.oracle import OracleConfig, OracleMedialField
from neural.adapters import NeuralDistanceField, NeuralMedialField, as_fields
from neural.checkpoint import load_checkpoint

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)

MF_BACKENDS = ("oracle", "grid", "neural")
DEFAULT_GRID_RES = {2: 128, 3: 48}


def merged_config(model: Type[M], scene_block: Dict[str, Any], flags: Dict[str, Any]) -> M:
    """Validate *model* from scene defaults overlaid with the flags that were actually given."""
    data = dict(scene_block)
    data.update({k: v for k, v in flags.items() if v is not None})
    return model.model_validate(data)


def load_neural(checkpoint: Optional[Path], scene: Scene) -> tuple[NeuralDistanceField, NeuralMedialField]:
    if checkpoint is None:
        raise CheckpointError("the neural backend needs --checkpoint")
    net = load_checkpoint(checkpoint)
    if net.dim != scene.dim:
        raise CheckpointError(f"checkpoint {checkpoint} is {net.dim}D, scene {scene.name} is {scene.dim}D")
    return as_fields(net)


def build_medial_field(
    scene: Scene,
    backend: str,
    oracle_cfg: OracleConfig,
    checkpoint: Optional[Path] = None,
    grid_res: Optional[int] = None,
) -> MedialField:
    """The MF backend named by ``--mf`` for *scene*."""
    if backend == "oracle":
        return OracleMedialField(scene.field, oracle_cfg)
    if backend == "grid":
        res = (grid_res or DEFAULT_GRID_RES[scene.dim],) * scene.dim
        cfg = oracle_cfg.resolve(scene.diag)
        interior = bake_mf_grid(scene.field, cfg, scene.bounds, res, SIDE_INTERIOR)
        exterior = bake_mf_grid(scene.field, cfg, scene.bounds, res, SIDE_EXTERIOR)
        return GridMedialField(interior, exterior, scene.field, r_max=cfg.r_max, tol=cfg.tol)
    if backend == "neural":
        return load_neural(checkpoint, scene)[1]
    raise ValueError(f"unknown MF backend {backend!r}; choose from {MF_BACKENDS}")
