"""
database/models.py
SQLModel table definitions for the run ledger.
One RunRecord per CLI invocation, one ArtifactRecord per file it wrote.
"""

from datetime import datetime
from typing import Any, Dict, List, Optional, TYPE_CHECKING

from sqlalchemy import Column, JSON
from sqlmodel import SQLModel, Field, Relationship

if TYPE_CHECKING:
    from app.services.manifest import RunManifest


# ---------------------------------------------------------------------------
# RunRecord: one command invocation
# ---------------------------------------------------------------------------

class RunRecord(SQLModel, table=True):
    """
    A CLI run, successful or not, keyed by the manifest id of its inputs.

    Reruns with identical inputs share a ``manifest_id`` but get their own row.
    Failed runs carry their nonzero ``exit_code`` and no artifacts.
    """
    __tablename__ = "runs"

    id: Optional[int] = Field(default=None, primary_key=True)
    manifest_id: str = Field(index=True, max_length=64)
    command: str = Field(index=True, max_length=16)
    scene: str = Field(max_length=256)
    seed: int
    tool_version: str = Field(max_length=16)
    exit_code: int = Field(default=0)

    created_at: datetime = Field(default_factory=datetime.utcnow)

    # Resolved configuration snapshot
    config: Optional[Dict[str, Any]] = Field(
        default=None, sa_column=Column(JSON)
    )

    artifacts: List["ArtifactRecord"] = Relationship(back_populates="run")

    # --- Factory -----------------------------------------------------------

    @classmethod
    def from_manifest(cls, manifest: "RunManifest", exit_code: int = 0) -> "RunRecord":
        """Create a RunRecord directly from a RunManifest."""
        return cls(
            manifest_id=manifest.manifest_id,
            command=manifest.command,
            scene=manifest.scene,
            seed=manifest.seed,
            tool_version=manifest.tool_version,
            exit_code=exit_code,
            config=manifest.config,
        )


# ---------------------------------------------------------------------------
# ArtifactRecord: a file written by a run
# ---------------------------------------------------------------------------

class ArtifactRecord(SQLModel, table=True):
    __tablename__ = "artifacts"

    id: Optional[int] = Field(default=None, primary_key=True)
    run_id: int = Field(foreign_key="runs.id", index=True)
    path: str = Field(max_length=1024)
    sha256: Optional[str] = Field(default=None, max_length=64)

    run: Optional[RunRecord] = Relationship(back_populates="artifacts")
