"""
neural/training.py
Adam training loop for the medial network against an analytic scene.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Literal, Optional

import numpy as np
import pandas as pd
import torch
from pydantic import BaseModel, Field, field_validator

from core.constants import LOSS_TERMS, LOSS_WEIGHTS, MEDIAL_LOSS_TERMS
from core.errors import DivergedLoss
from fields.analytic import AnalyticField
from neural.losses import effective_weights, losses, weighted_total
from neural.network import ArchitectureConfig, MedialNet, init_network
from neural.sampling import sample_batch

logger = logging.getLogger(__name__)

SIGMA_DIAGS = {"desk": 0.5, "paper": 2.0}


class TrainConfig(BaseModel):
    """
    Training run settings.

    ``sigma_volume`` defaults from ``sigma_mode``: 0.5·diag (``desk``) or
    2·diag (``paper``).
    """

    steps: int = Field(default=2000, ge=1)
    batch_size: int = Field(default=8192, ge=1)
    lr: float = Field(default=1e-3, gt=0.0)
    seed: int = 0
    sigma_volume: Optional[float] = Field(default=None, gt=0.0)
    sigma_mode: Literal["desk", "paper"] = "desk"
    loss_weights: Dict[str, float] = Field(default_factory=lambda: dict(LOSS_WEIGHTS))
    ablate_medial: bool = False
    log_every: int = Field(default=100, ge=1)
    architecture: ArchitectureConfig = Field(default_factory=ArchitectureConfig)

    @field_validator("loss_weights")
    @classmethod
    def known_nonnegative(cls, v: Dict[str, float]) -> Dict[str, float]:
        unknown = set(v) - set(LOSS_TERMS)
        if unknown:
            raise ValueError(f"unknown loss terms {sorted(unknown)}")
        negative = {k: w for k, w in v.items() if w < 0.0}
        if negative:
            raise ValueError(f"loss weights must be >= 0, got {negative}")
        return {**LOSS_WEIGHTS, **v}

    def sigma(self, diag: float) -> float:
        return self.sigma_volume if self.sigma_volume is not None else SIGMA_DIAGS[self.sigma_mode] * diag

    def weights(self) -> dict[str, float]:
        w = dict(self.loss_weights)
        if self.ablate_medial:
            for name in MEDIAL_LOSS_TERMS:
                w[name] = 0.0
        return w


@dataclass
class TrainResult:
    net: MedialNet
    log: pd.DataFrame

    @property
    def initial_total(self) -> float:
        return float(self.log["total"].iloc[0])

    @property
    def final_total(self) -> float:
        return float(self.log["total"].iloc[-1])


def train(field: AnalyticField, cfg: TrainConfig, net: Optional[MedialNet] = None) -> TrainResult:
    """
    Fit a MedialNet to *field*.

    The run is deterministic for fixed ``(cfg, scene)``: the batch stream
    comes from ``np.random.default_rng(cfg.seed)`` and the network from
    ``cfg.seed``.

    Returns
    -------
    TrainResult
        The trained network and a per-step log with columns
        ``step, <terms>, total`` (terms unweighted, total weighted).

    Raises
    ------
    DivergedLoss
        If the weighted total becomes non-finite.
    """
    torch.use_deterministic_algorithms(True)
    diag = field.bounds.diag
    sigma = cfg.sigma(diag)
    weights = cfg.weights()
    if net is None:
        net = init_network(field.dim, cfg.seed, cfg.architecture, field.bounds)
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)

    logger.info(
        "Training %dD net (width=%d, %s) for %d steps, batch=%d, sigma=%.4g%s",
        field.dim, cfg.architecture.width, cfg.architecture.dtype, cfg.steps, cfg.batch_size, sigma,
        " [medial terms ablated]" if cfg.ablate_medial else "",
    )

    rows = []
    for step in range(cfg.steps):
        batch = sample_batch(field, cfg.batch_size, sigma, rng)
        terms = losses(net, field, batch)
        w = effective_weights(weights, step / max(cfg.steps - 1, 1))
        total = weighted_total(terms, w)
        if not torch.isfinite(total):
            raise DivergedLoss(f"total loss became {float(total)} at step {step}")

        optimizer.zero_grad(set_to_none=True)
        total.backward()
        optimizer.step()

        row = {"step": step, **{k: float(terms[k].detach()) for k in LOSS_TERMS}, "total": float(total.detach())}
        rows.append(row)
        if step % cfg.log_every == 0 or step == cfg.steps - 1:
            logger.info("step %6d  total=%.6g  surface=%.3e  eikonal=%.3e",
                        step, row["total"], row["surface"], row["eikonal"])

    return TrainResult(net=net, log=pd.DataFrame(rows, columns=["step", *LOSS_TERMS, "total"]))
