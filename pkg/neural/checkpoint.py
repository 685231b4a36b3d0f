"""
neural/checkpoint.py
Checkpoint format: one JSON header line (dimension, seed, bounds,
architecture, training config, parameter layout) followed by every
parameter and buffer as little-endian float64, in state-dict order.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import torch

from core.errors import CheckpointError
from core.math_utils import Bounds
from neural.network import ArchitectureConfig, MedialNet

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "medialnet/1"


def save_checkpoint(net: MedialNet, path: Union[str, Path], train_cfg: Optional[dict] = None,
                    extra: Optional[dict] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    state = net.state_dict()
    header = {
        "format": CHECKPOINT_FORMAT,
        "dim": net.dim,
        "seed": net.seed,
        "bounds": net.bounds.to_dict(),
        "architecture": net.arch.model_dump(),
        "train": train_cfg or {},
        "params": [[name, list(t.shape)] for name, t in state.items()],
        **(extra or {}),
    }
    blob = b"".join(t.detach().to(torch.float64).cpu().numpy().astype("<f8").tobytes() for t in state.values())
    with path.open("wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        fh.write(blob)
    logger.info("Wrote checkpoint %s (%d tensors)", path, len(state))
    return path


def read_header(path: Union[str, Path]) -> tuple[dict, bytes]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint {path} does not exist")
    raw = path.read_bytes()
    line, sep, blob = raw.partition(b"\n")
    try:
        header = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable header ({exc})") from exc
    if not sep or header.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path}: not a {CHECKPOINT_FORMAT} checkpoint")
    return header, blob


def load_checkpoint(path: Union[str, Path]) -> MedialNet:
    header, blob = read_header(path)
    try:
        arch = ArchitectureConfig.model_validate(header["architecture"])
        bounds = Bounds(header["bounds"]["lo"], header["bounds"]["hi"])
        net = MedialNet(int(header["dim"]), arch, bounds, seed=int(header["seed"]), initialize=False)
    except (KeyError, ValueError) as exc:
        raise CheckpointError(f"{path}: invalid header ({exc})") from exc

    values = np.frombuffer(blob, dtype="<f8")
    expected = sum(int(np.prod(shape)) for _, shape in header["params"])
    if values.size != expected:
        raise CheckpointError(f"{path}: expected {expected} parameters, found {values.size}")

    state, offset = {}, 0
    for name, shape in header["params"]:
        count = int(np.prod(shape))
        state[name] = torch.as_tensor(values[offset:offset + count].reshape(shape).copy(), dtype=arch.torch_dtype)
        offset += count
    try:
        net.load_state_dict(state)
    except RuntimeError as exc:
        raise CheckpointError(f"{path}: parameters do not match the architecture ({exc})") from exc
    net.eval()
    logger.info("Loaded checkpoint %s (%dD, width=%d)", path, net.dim, arch.width)
    return net
