"""
app/commands/common.py
Arguments and helpers shared by several subcommands.
"""

import argparse
from pathlib import Path
from typing import Optional

from app.services.loaders import MF_BACKENDS, merged_config
from fields.scene import Scene
from medial.oracle import OracleConfig


def add_scene_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scene", help="bundled scene name (e.g. disk) or path to a scene JSON file")
    parser.add_argument("--seed", type=int, default=None, help="random seed (default: Settings.DEFAULT_SEED)")


def add_mf_arguments(parser: argparse.ArgumentParser, default: str = "oracle") -> None:
    parser.add_argument("--mf", choices=MF_BACKENDS, default=default, help="medial field backend")
    parser.add_argument("--checkpoint", type=Path, default=None, help="trained network (for --mf neural)")
    parser.add_argument("--grid-res", type=int, default=None, help="nodes per axis (for --mf grid)")
    parser.add_argument("--r-max", type=float, default=None, help="exterior clamp radius")


def oracle_config(scene: Scene, r_max: Optional[float]) -> OracleConfig:
    return merged_config(OracleConfig, scene.defaults.oracle, {"r_max": r_max}).resolve(scene.diag)


def sibling(path: Path, suffix: str) -> Path:
    """``out/name.csv`` -> ``out/name<suffix>``."""
    path = Path(path)
    return path.with_name(path.stem + suffix)
