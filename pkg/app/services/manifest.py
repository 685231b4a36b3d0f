"""
app/services/manifest.py
Run manifests: a content-addressed record of what produced each artifact,
written next to it and optionally logged to the run ledger.
"""

import asyncio
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field
from sqlalchemy.exc import SQLAlchemyError

from core.config import get_settings
from core.constants import TOOL_VERSION
from database.connection import get_engine, init_db, session_factory
from database.models import ArtifactRecord, RunRecord

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def file_sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class RunManifest(BaseModel):
    """Everything needed to rerun a command and get byte-identical outputs."""

    command: str
    scene: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    tool_version: str = TOOL_VERSION
    outputs: List[str] = Field(default_factory=list)

    @property
    def manifest_id(self) -> str:
        """SHA-256 of the canonical JSON of the inputs (outputs excluded)."""
        return hashlib.sha256(canonical_json(self.model_dump(exclude={"outputs"})).encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {"manifest_id": self.manifest_id, **self.model_dump()}


def manifest_path(artifact: Path) -> Path:
    artifact = Path(artifact)
    return artifact.with_name(artifact.name + MANIFEST_SUFFIX)


def write_manifests(manifest: RunManifest) -> list[Path]:
    """One sidecar ``<artifact>.manifest.json`` per output."""
    text = json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"
    written = []
    for out in manifest.outputs:
        side = manifest_path(Path(out))
        side.write_text(text, encoding="utf-8")
        written.append(side)
    logger.debug("Wrote %d manifests for run %s", len(written), manifest.manifest_id[:12])
    return written


# ---------------------------------------------------------------------------
# Ledger
# ---------------------------------------------------------------------------


async def record_run(manifest: RunManifest, exit_code: int = 0, url: Optional[str] = None) -> int:
    """Insert a RunRecord and its ArtifactRecords; returns the run id."""
    await init_db(url)
    async with session_factory(url)() as session:
        run = RunRecord.from_manifest(manifest, exit_code=exit_code)
        session.add(run)
        await session.flush()
        for out in manifest.outputs:
            path = Path(out)
            session.add(ArtifactRecord(
                run_id=run.id,
                path=str(path),
                sha256=file_sha256(path) if path.is_file() else None,
            ))
        await session.commit()
        run_id = int(run.id)
    # pooled connections are tied to this event loop
    await get_engine(url).dispose()
    return run_id


def record_run_sync(manifest: RunManifest, exit_code: int = 0) -> None:
    """Ledger write from synchronous CLI code; failures are logged, never raised."""
    settings = get_settings()
    if not settings.LEDGER_ENABLED:
        return
    try:
        run_id = asyncio.run(record_run(manifest, exit_code))
        logger.info("Recorded run %d (%s) in ledger", run_id, manifest.manifest_id[:12])
    except (SQLAlchemyError, OSError) as exc:
        logger.warning("Run ledger unavailable (%s); manifests still written", exc)
