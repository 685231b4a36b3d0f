"""
fields/shapes.py
Scene-file schema: a tagged tree of analytic primitives and CSG nodes.
"""

from typing import Annotated, Iterator, List, Literal, Union

from pydantic import BaseModel, Field, TypeAdapter, field_validator

from core.constants import MAX_SHAPE_DEPTH


# ---------------------------------------------------------------------------
# Leaf primitives
# ---------------------------------------------------------------------------


class SphereSpec(BaseModel):
    """Disk in 2D, ball in 3D."""

    type: Literal["sphere"] = "sphere"
    center: List[float]
    radius: float = Field(..., gt=0.0)


class BoxSpec(BaseModel):
    """Axis-aligned box."""

    type: Literal["box"] = "box"
    center: List[float]
    half_extents: List[float]

    @field_validator("half_extents")
    @classmethod
    def positive_extents(cls, v: List[float]) -> List[float]:
        if any(h <= 0.0 for h in v):
            raise ValueError(f"half_extents must all be > 0, got {v}")
        return v


class CapsuleSpec(BaseModel):
    """Segment ``a``-``b`` swept by a ball of ``radius``."""

    type: Literal["capsule"] = "capsule"
    a: List[float]
    b: List[float]
    radius: float = Field(..., gt=0.0)


class TorusSpec(BaseModel):
    """Torus around the +y axis (3D only)."""

    type: Literal["torus"] = "torus"
    center: List[float]
    major_r: float = Field(..., gt=0.0)
    minor_r: float = Field(..., gt=0.0)


class HalfspaceSpec(BaseModel):
    """Solid ``(x - point) . normal <= 0``."""

    type: Literal["halfspace"] = "halfspace"
    point: List[float]
    normal: List[float]

    @field_validator("normal")
    @classmethod
    def nonzero_normal(cls, v: List[float]) -> List[float]:
        if sum(c * c for c in v) <= 0.0:
            raise ValueError("halfspace normal must be non-zero")
        return v


class SlabSpec(BaseModel):
    """Solid ``|x[axis]| <= half_width``."""

    type: Literal["slab"] = "slab"
    axis: int = Field(..., ge=0, le=2)
    half_width: float = Field(..., gt=0.0)


# ---------------------------------------------------------------------------
# CSG nodes
# ---------------------------------------------------------------------------


class UnionSpec(BaseModel):
    type: Literal["union"] = "union"
    children: List["ShapeSpec"] = Field(..., min_length=1)


class IntersectionSpec(BaseModel):
    type: Literal["intersection"] = "intersection"
    children: List["ShapeSpec"] = Field(..., min_length=1)


class DifferenceSpec(BaseModel):
    """First child minus every following child."""

    type: Literal["difference"] = "difference"
    children: List["ShapeSpec"] = Field(..., min_length=2)


ShapeSpec = Annotated[
    Union[
        SphereSpec,
        BoxSpec,
        CapsuleSpec,
        TorusSpec,
        HalfspaceSpec,
        SlabSpec,
        UnionSpec,
        IntersectionSpec,
        DifferenceSpec,
    ],
    Field(discriminator="type"),
]

LeafSpec = Union[SphereSpec, BoxSpec, CapsuleSpec, TorusSpec, HalfspaceSpec, SlabSpec]
NodeSpec = Union[UnionSpec, IntersectionSpec, DifferenceSpec]

UnionSpec.model_rebuild()
IntersectionSpec.model_rebuild()
DifferenceSpec.model_rebuild()

shape_adapter: TypeAdapter = TypeAdapter(ShapeSpec)


# ---------------------------------------------------------------------------
# Tree helpers
# ---------------------------------------------------------------------------


def is_leaf(spec) -> bool:
    return not hasattr(spec, "children")


def depth(spec) -> int:
    """Tree depth (a lone primitive has depth 1)."""
    if is_leaf(spec):
        return 1
    return 1 + max(depth(c) for c in spec.children)


def iter_leaves(spec) -> Iterator[LeafSpec]:
    if is_leaf(spec):
        yield spec
        return
    for child in spec.children:
        yield from iter_leaves(child)


def check_dimension(spec, dim: int) -> None:
    """Raise ``ValueError`` if any vector in the tree does not have ``dim`` components."""
    if depth(spec) > MAX_SHAPE_DEPTH:
        raise ValueError(f"shape tree deeper than {MAX_SHAPE_DEPTH} levels")
    for leaf in iter_leaves(spec):
        for name in ("center", "half_extents", "a", "b", "point", "normal"):
            vec = getattr(leaf, name, None)
            if vec is not None and len(vec) != dim:
                raise ValueError(
                    f"{leaf.type}.{name} has {len(vec)} components, scene is {dim}D"
                )
        if leaf.type == "torus" and dim != 3:
            raise ValueError("torus primitives are 3D only")
        if leaf.type == "slab" and leaf.axis >= dim:
            raise ValueError(f"slab axis {leaf.axis} out of range for {dim}D")
