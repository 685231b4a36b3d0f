"""
tests/test_ledger.py
Run manifests and the sqlite run ledger.
"""

import asyncio

from sqlmodel import select

from app.main import main
from app.services.manifest import RunManifest, canonical_json, record_run, write_manifests
from core.config import get_settings
from database.connection import get_engine, session_factory
from database.models import ArtifactRecord, RunRecord


async def _fetch(model):
    async with session_factory()() as session:
        rows = (await session.execute(select(model))).scalars().all()
    await get_engine().dispose()
    return rows


def test_manifest_id_ignores_outputs():
    a = RunManifest(command="audit", scene="scenes/disk.json", seed=1, config={"b": 2, "a": 1})
    b = RunManifest(command="audit", scene="scenes/disk.json", seed=1, config={"a": 1, "b": 2},
                    outputs=["x.csv"])
    assert a.manifest_id == b.manifest_id
    assert a.manifest_id != a.model_copy(update={"seed": 2}).manifest_id


def test_canonical_json_sorts_keys():
    assert canonical_json({"b": [1, 2], "a": "é"}) == '{"a":"é","b":[1,2]}'


def test_record_run_writes_run_and_artifacts(tmp_path):
    out = tmp_path / "table.csv"
    out.write_text("a,b\n1,2\n", encoding="utf-8")
    manifest = RunManifest(command="audit", scene="disk.json", seed=3, config={"samples": 10},
                           outputs=[str(out), str(tmp_path / "missing.csv")])
    assert write_manifests(manifest)[0].name == "table.csv.manifest.json"

    run_id = asyncio.run(record_run(manifest, exit_code=0))
    runs = asyncio.run(_fetch(RunRecord))
    artifacts = asyncio.run(_fetch(ArtifactRecord))

    assert [r.id for r in runs] == [run_id]
    assert runs[0].manifest_id == manifest.manifest_id
    assert runs[0].config == {"samples": 10}
    assert {a.run_id for a in artifacts} == {run_id}
    by_name = {a.path.rsplit("/", 1)[-1]: a.sha256 for a in artifacts}
    assert len(by_name["table.csv"]) == 64
    assert by_name["missing.csv"] is None


def test_cli_runs_are_recorded(tmp_path):
    out = tmp_path / "a.csv"
    for _ in range(2):
        assert main(["--log-level", "WARNING", "audit", "disk", "--samples", "50", "--out", str(out)]) == 0
    runs = asyncio.run(_fetch(RunRecord))
    assert len(runs) == 2
    assert runs[0].manifest_id == runs[1].manifest_id
    assert {r.command for r in runs} == {"audit"}


def test_ledger_can_be_disabled(tmp_path, monkeypatch):
    monkeypatch.setenv("LEDGER_ENABLED", "false")
    get_settings.cache_clear()
    assert main(["--log-level", "WARNING", "bake", "disk", "--res", "4", "--out", str(tmp_path / "d.grid")]) == 0
    assert not (tmp_path / "ledger.db").exists()


def test_failed_runs_are_recorded_with_their_exit_code(tmp_path):
    assert main(["--log-level", "CRITICAL", "render", "no_such_scene", "--out", str(tmp_path / "x.ppm")]) == 2
    assert main(["--log-level", "CRITICAL", "bench", "disk", "--out", str(tmp_path / "b.csv")]) == 1
    runs = asyncio.run(_fetch(RunRecord))
    assert [(r.command, r.exit_code) for r in runs] == [("render", 2), ("bench", 1)]
    assert runs[0].scene == "no_such_scene"
    assert runs[0].config["out"] == str(tmp_path / "x.ppm")
    assert asyncio.run(_fetch(ArtifactRecord)) == []
