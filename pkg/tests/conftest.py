"""
tests/conftest.py
Repo root on sys.path, scene fixtures, and the --runslow switch.
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from fields.scene import Scene, load_scene, scene_from_dict  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-size acceptance reruns")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size acceptance rerun (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def make_scene(shape: dict, dim: int, lo=None, hi=None, name: str = "inline") -> Scene:
    data = {"dim": dim, "shape": shape}
    if lo is not None:
        data["bounds"] = {"lo": list(lo), "hi": list(hi)}
    return scene_from_dict(data, name=name)


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch, tmp_path):
    """Keep the run ledger inside the test's temp dir."""
    from core.config import get_settings
    from database.connection import get_engine

    monkeypatch.setenv("LEDGER_DATABASE_URL", f"sqlite+aiosqlite:///{tmp_path / 'ledger.db'}")
    get_settings.cache_clear()
    get_engine.cache_clear()
    yield
    get_settings.cache_clear()
    get_engine.cache_clear()


@pytest.fixture(scope="session")
def disk() -> Scene:
    return load_scene("disk")


@pytest.fixture(scope="session")
def box() -> Scene:
    return load_scene("box")


@pytest.fixture(scope="session")
def slab() -> Scene:
    return load_scene("slab")


@pytest.fixture(scope="session")
def two_disk() -> Scene:
    return load_scene("two_disk")


@pytest.fixture(scope="session")
def sphere() -> Scene:
    return load_scene("sphere")


@pytest.fixture(scope="session")
def sphere_plane() -> Scene:
    return load_scene("sphere_plane")
