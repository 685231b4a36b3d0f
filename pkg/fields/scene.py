"""
fields/scene.py
Scene files: JSON ``{dim, shape, bounds, defaults}`` loaded into an analytic field.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from core.errors import BoundsDegenerate, SceneError
from core.math_utils import Bounds
from fields.analytic import AnalyticField
from fields.shapes import ShapeSpec

logger = logging.getLogger(__name__)

SCENES_DIR = Path(__file__).resolve().parents[1] / "scenes"


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------


class BoundsSpec(BaseModel):
    lo: List[float]
    hi: List[float]


class SceneDefaults(BaseModel):
    """Per-scene overrides; each block is validated by the config model that consumes it."""

    trace: Dict[str, Any] = Field(default_factory=dict)
    oracle: Dict[str, Any] = Field(default_factory=dict)
    fss: Dict[str, Any] = Field(default_factory=dict)
    train: Dict[str, Any] = Field(default_factory=dict)
    camera: Dict[str, Any] = Field(default_factory=dict)


class SceneFile(BaseModel):
    dim: Literal[2, 3]
    shape: ShapeSpec
    bounds: Optional[BoundsSpec] = None
    name: Optional[str] = None
    defaults: SceneDefaults = Field(default_factory=SceneDefaults)

    @model_validator(mode="after")
    def bounds_match_dim(self) -> "SceneFile":
        if self.bounds is not None and not (len(self.bounds.lo) == len(self.bounds.hi) == self.dim):
            raise ValueError(f"bounds corners must have {self.dim} components")
        return self


# ---------------------------------------------------------------------------
# Loaded scene
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scene:
    name: str
    path: Path
    spec: SceneFile
    field: AnalyticField

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def bounds(self) -> Bounds:
        return self.field.bounds

    @property
    def diag(self) -> float:
        return self.field.bounds.diag

    @property
    def defaults(self) -> SceneDefaults:
        return self.spec.defaults


def bundled_scenes() -> list[str]:
    return sorted(p.stem for p in SCENES_DIR.glob("*.json"))


def resolve_scene_path(ref: Union[str, Path]) -> Path:
    """A file path as given, or the name of a bundled scene."""
    path = Path(ref)
    if path.is_file():
        return path
    bundled = SCENES_DIR / f"{path.stem if path.suffix == '.json' else ref}.json"
    if bundled.is_file():
        return bundled
    raise SceneError(f"scene {ref!r} not found (bundled: {', '.join(bundled_scenes())})")


def scene_from_dict(data: dict, name: str = "inline", path: Optional[Path] = None) -> Scene:
    """Validate a parsed scene document and build its field."""
    try:
        spec = SceneFile.model_validate(data)
        bounds = Bounds(spec.bounds.lo, spec.bounds.hi) if spec.bounds is not None else None
        field = AnalyticField(spec.shape, spec.dim, bounds)
    except (ValidationError, ValueError, BoundsDegenerate) as exc:
        raise SceneError(f"invalid scene {name!r}: {exc}") from exc
    return Scene(name=spec.name or name, path=path or Path(f"{name}.json"), spec=spec, field=field)


def load_scene(ref: Union[str, Path]) -> Scene:
    path = resolve_scene_path(ref)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: not valid JSON ({exc})") from exc
    scene = scene_from_dict(data, name=path.stem, path=path)
    logger.info("Loaded scene %s (%dD, diag=%.4g)", scene.name, scene.dim, scene.diag)
    return scene
