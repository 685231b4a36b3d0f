"""
neural/network.py
Four-headed medial network: Fourier-encoded input, shared softplus backbone,
and heads for Φ, MF⁺ (exterior), MF⁻ (interior) and ∇Φ.
"""

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
import torch
from pydantic import BaseModel, Field
from torch import nn

from core.constants import (
    BACKBONE_LAYERS,
    FOURIER_ALPHA,
    FOURIER_BANDS,
    GEOMETRIC_INIT_RADIUS_REL,
    HEAD_WIDTH,
    SOFTPLUS_BETA,
)
from core.math_utils import Bounds

logger = logging.getLogger(__name__)

HEAD_NAMES = ("phi", "mf_plus", "mf_minus", "grad")
INIT_FIT_POINTS = 4096
INIT_FIT_RIDGE = 1e-8


class ArchitectureConfig(BaseModel):
    """Network shape. ``width`` 512 matches the large-scale setup; 128 is the desk default."""

    width: int = Field(default=128, ge=1)
    depth: int = Field(default=BACKBONE_LAYERS, ge=1)
    head_width: int = Field(default=HEAD_WIDTH, ge=1)
    head_layers: int = Field(default=2, ge=0)
    fourier_bands: int = Field(default=FOURIER_BANDS, ge=0)
    fourier_sigma: float = Field(default=1.0, gt=0.0)
    fourier_alpha: float = Field(default=FOURIER_ALPHA, ge=0.0)
    softplus_beta: float = Field(default=SOFTPLUS_BETA, gt=0.0)
    activation: Literal["softplus", "identity"] = "softplus"
    geometric_init: bool = True
    dtype: Literal["float32", "float64"] = "float32"

    @property
    def torch_dtype(self) -> torch.dtype:
        return torch.float64 if self.dtype == "float64" else torch.float32


@dataclass
class NetOutput:
    """Raw head outputs for a batch; MF selected by the network's own Φ sign."""
    phi: torch.Tensor
    mf_plus: torch.Tensor
    mf_minus: torch.Tensor
    grad: torch.Tensor

    @property
    def mf(self) -> torch.Tensor:
        return torch.where(self.phi > 0.0, self.mf_plus, self.mf_minus)


class MedialNet(nn.Module):
    """
    Parameters
    ----------
    dim : int
        2 or 3.
    arch : ArchitectureConfig
    bounds : Bounds
        Scene box; sets the geometric-initialization sphere.
    seed : int
        Drives the Fourier matrix and every initial weight.
    initialize : bool
        Skip the geometric fit when parameters will be overwritten (checkpoint load).
    """

    def __init__(self, dim: int, arch: ArchitectureConfig, bounds: Bounds, seed: int = 0,
                 initialize: bool = True) -> None:
        super().__init__()
        if dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {dim}")
        self.dim = dim
        self.arch = arch
        self.bounds = bounds
        self.seed = seed
        dtype = arch.torch_dtype

        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(seed)
            fourier = torch.randn(arch.fourier_bands, dim, dtype=torch.float64) * arch.fourier_sigma
            self.register_buffer("fourier_matrix", fourier.to(dtype))
            self.register_buffer("fourier_weights", (arch.fourier_alpha * fourier.norm(dim=1)).to(dtype))

            self.in_features = dim + 2 * arch.fourier_bands
            widths = [self.in_features] + [arch.width] * arch.depth
            self.backbone = nn.ModuleList(
                nn.Linear(a, b, dtype=dtype) for a, b in zip(widths[:-1], widths[1:])
            )
            self.heads = nn.ModuleDict({
                name: self._make_head(arch, dim if name == "grad" else 1, dtype) for name in HEAD_NAMES
            })
            if arch.geometric_init and initialize:
                self._geometric_init()

    @staticmethod
    def _make_head(arch: ArchitectureConfig, out: int, dtype: torch.dtype) -> nn.ModuleList:
        widths = [arch.width] + [arch.head_width] * arch.head_layers + [out]
        return nn.ModuleList(nn.Linear(a, b, dtype=dtype) for a, b in zip(widths[:-1], widths[1:]))

    # --- evaluation -------------------------------------------------------

    def activation(self, z: torch.Tensor) -> torch.Tensor:
        if self.arch.activation == "identity":
            return z
        return nn.functional.softplus(z, beta=self.arch.softplus_beta)

    def encode(self, x: torch.Tensor) -> torch.Tensor:
        """``[x, w·sin(2πBx), w·cos(2πBx)]``."""
        if self.arch.fourier_bands == 0:
            return x
        proj = 2.0 * np.pi * x @ self.fourier_matrix.T
        w = self.fourier_weights
        return torch.cat([x, w * torch.sin(proj), w * torch.cos(proj)], dim=-1)

    def features(self, x: torch.Tensor) -> torch.Tensor:
        h = self.encode(x)
        for layer in self.backbone:
            h = self.activation(layer(h))
        return h

    def _run_head(self, name: str, h: torch.Tensor, penultimate: bool = False) -> torch.Tensor:
        layers = self.heads[name]
        for layer in layers[:-1]:
            h = self.activation(layer(h))
        return h if penultimate else layers[-1](h)

    def forward(self, x: torch.Tensor) -> NetOutput:
        h = self.features(x)
        return NetOutput(
            phi=self._run_head("phi", h).squeeze(-1),
            mf_plus=self._run_head("mf_plus", h).squeeze(-1),
            mf_minus=self._run_head("mf_minus", h).squeeze(-1),
            grad=self._run_head("grad", h),
        )

    # --- initialization ---------------------------------------------------

    def _geometric_init(self) -> None:
        """
        Bias the Φ path towards a sphere of radius ``0.5·diag`` around the
        scene center: normal init scaled by fan-out on the backbone and Φ
        head, Fourier columns of the first layer zeroed, then the last Φ
        layer least-squares fitted to ``‖x − c‖ − 0.5·diag``.
        """
        phi_path = list(self.backbone) + list(self.heads["phi"][:-1])
        with torch.no_grad():
            for k, layer in enumerate(phi_path):
                nn.init.normal_(layer.weight, 0.0, np.sqrt(2.0) / np.sqrt(layer.out_features))
                nn.init.zeros_(layer.bias)
                if k == 0 and self.arch.fourier_bands:
                    layer.weight[:, self.dim:] = 0.0

            center = torch.as_tensor(self.bounds.center, dtype=torch.float64)
            radius = GEOMETRIC_INIT_RADIUS_REL * self.bounds.diag
            dirs = torch.randn(INIT_FIT_POINTS, self.dim, dtype=torch.float64)
            dirs = dirs / dirs.norm(dim=1, keepdim=True)
            rho = 1.25 * self.bounds.diag * torch.rand(INIT_FIT_POINTS, 1, dtype=torch.float64) ** (1.0 / self.dim)
            pts = center + rho * dirs
            target = (pts - center).norm(dim=1) - radius

            x = pts.to(self.arch.torch_dtype)
            feats = self._run_head("phi", self.features(x), penultimate=True).to(torch.float64)
            design = torch.cat([feats, torch.ones(feats.shape[0], 1, dtype=torch.float64)], dim=1)
            gram = design.T @ design + INIT_FIT_RIDGE * INIT_FIT_POINTS * torch.eye(design.shape[1], dtype=torch.float64)
            coef = torch.linalg.solve(gram, design.T @ target)

            last = self.heads["phi"][-1]
            last.weight.copy_(coef[:-1].reshape(1, -1).to(last.weight.dtype))
            last.bias.copy_(coef[-1:].to(last.bias.dtype))
        logger.debug("Geometric init fitted phi head to radius %.4g", radius)


def init_network(dim: int, seed: int, arch: ArchitectureConfig, bounds: Bounds) -> MedialNet:
    """Deterministic network for ``(dim, seed, arch, bounds)``."""
    return MedialNet(dim, arch, bounds, seed=seed)


def input_gradient(net: MedialNet, x: torch.Tensor, create_graph: bool = False) -> torch.Tensor:
    """∂Φ/∂x of the Φ head by reverse-mode autodiff."""
    x = x.detach().requires_grad_(True)
    with torch.enable_grad():
        phi = net(x).phi
        (grad,) = torch.autograd.grad(phi.sum(), x, create_graph=create_graph)
    return grad


def to_tensor(points: np.ndarray, net: MedialNet) -> torch.Tensor:
    return torch.as_tensor(np.asarray(points, dtype=np.float64), dtype=net.arch.torch_dtype)
