"""
app/main.py
Command-line entry point: `python -m app.main <command> ...`.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from app.commands import audit, bake, bench, proxy_sets, render, train
from app.services.manifest import RunManifest, record_run_sync, write_manifests
from core.config import get_settings
from core.constants import EXIT_BAD_INPUT, EXIT_OK, EXIT_RUNTIME, TOOL_VERSION
from core.errors import CheckpointError, MedialFieldError, SceneError

logger = logging.getLogger(__name__)

COMMANDS = (render, bench, proxy_sets, train, audit, bake)
BAD_INPUT = (SceneError, CheckpointError, ValidationError, ValueError, FileNotFoundError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="medial", description="Medial fields over signed distance scenes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument("--log-level", default=None, help="overrides Settings.LOG_LEVEL")
    parser.add_argument("--no-ledger", action="store_true", help="do not record this run in the ledger")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def failure_manifest(args: argparse.Namespace) -> RunManifest:
    """Manifest of a run that wrote nothing: the parsed arguments stand in for the resolved config."""
    config = {
        k: str(v) if isinstance(v, Path) else v
        for k, v in sorted(vars(args).items())
        if k not in ("handler", "command", "scene", "seed", "log_level", "no_ledger")
    }
    return RunManifest(command=args.command, scene=str(args.scene), seed=args.seed, config=config)


def _record_failure(args: argparse.Namespace, exit_code: int) -> int:
    if not args.no_ledger:
        record_run_sync(failure_manifest(args), exit_code=exit_code)
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=(args.log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
    )
    if args.seed is None:
        args.seed = settings.DEFAULT_SEED
    if settings.TORCH_NUM_THREADS > 0:
        import torch

        torch.set_num_threads(settings.TORCH_NUM_THREADS)

    try:
        manifest = args.handler(args)
    except BAD_INPUT as exc:
        logger.error("%s: %s", args.command, exc)
        return _record_failure(args, EXIT_BAD_INPUT)
    except MedialFieldError:
        logger.exception("%s failed", args.command)
        return _record_failure(args, EXIT_RUNTIME)
    except Exception:
        logger.exception("%s failed unexpectedly", args.command)
        return _record_failure(args, EXIT_RUNTIME)

    write_manifests(manifest)
    if not args.no_ledger:
        record_run_sync(manifest, exit_code=EXIT_OK)
    logger.info("%s done: %s", args.command, ", ".join(manifest.outputs))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
