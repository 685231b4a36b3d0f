"""
neural/losses.py
The nine training losses as batch-mean estimators.

Predictions (network or reference) are gathered into a FieldPredictions
bundle first, so the same estimators score the network during training and
exact reference fields in tests. All returned terms are non-negative 0-d
tensors.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch

from core.constants import CURVATURE_STEP_REL, LOSS_TERMS, MINSURFACE_SHARPNESS, ORTHOGONALITY_FD_REL
from core.errors import EmptyBatch
from fields.base import DistanceField, MedialField
from fields.ops import unit_gradient
from neural.network import MedialNet, to_tensor
from neural.sampling import SampleBatch

logger = logging.getLogger(__name__)


@dataclass
class GroundTruth:
    """Supervision drawn from the exact field for one batch."""
    field: DistanceField
    surface_normals: torch.Tensor
    volume_phi: torch.Tensor
    volume_grad: torch.Tensor

    @property
    def outside(self) -> torch.Tensor:
        return self.volume_phi > 0.0


@dataclass
class FieldPredictions:
    """
    Everything the estimators read.

    ``volume_mf`` is already side-selected by the ground-truth sign and
    ``volume_grad_mf`` is its input gradient; ``volume_grad_shifted`` is ∇Φ
    re-evaluated at ``x + h·∇Φ(x)``.
    """
    surface_phi: torch.Tensor
    surface_grad: torch.Tensor
    volume_points: torch.Tensor
    volume_phi: torch.Tensor
    volume_grad: torch.Tensor
    volume_grad_shifted: torch.Tensor
    volume_mf: torch.Tensor
    volume_grad_mf: torch.Tensor
    volume_grad_head: torch.Tensor
    curvature_step: float


# ---------------------------------------------------------------------------
# Building predictions
# ---------------------------------------------------------------------------


def ground_truth(field: DistanceField, batch: SampleBatch, dtype: torch.dtype = torch.float64) -> GroundTruth:
    phi = field.phi(batch.volume_points)
    grad, _ = unit_gradient(field, batch.volume_points)
    return GroundTruth(
        field=field,
        surface_normals=torch.as_tensor(batch.surface_normals, dtype=dtype),
        volume_phi=torch.as_tensor(phi, dtype=dtype),
        volume_grad=torch.as_tensor(grad, dtype=dtype),
    )


def _grad(out: torch.Tensor, wrt: torch.Tensor) -> torch.Tensor:
    (g,) = torch.autograd.grad(out.sum(), wrt, create_graph=True)
    return g


def network_predictions(net: MedialNet, batch: SampleBatch, gt: GroundTruth, diag: float) -> FieldPredictions:
    """Forward passes with nested autograd so every term is differentiable in the parameters."""
    h = CURVATURE_STEP_REL * diag
    xs = to_tensor(batch.surface_points, net).requires_grad_(True)
    xv = to_tensor(batch.volume_points, net).requires_grad_(True)

    out_s = net(xs)
    grad_s = _grad(out_s.phi, xs)

    out_v = net(xv)
    grad_v = _grad(out_v.phi, xv)
    mf_sel = torch.where(gt.outside, out_v.mf_plus, out_v.mf_minus)
    grad_mf = _grad(mf_sel, xv)

    shifted = xv + h * grad_v
    grad_shifted = _grad(net(shifted).phi, shifted)

    return FieldPredictions(
        surface_phi=out_s.phi,
        surface_grad=grad_s,
        volume_points=xv,
        volume_phi=out_v.phi,
        volume_grad=grad_v,
        volume_grad_shifted=grad_shifted,
        volume_mf=mf_sel,
        volume_grad_mf=grad_mf,
        volume_grad_head=out_v.grad,
        curvature_step=h,
    )


def reference_predictions(field: DistanceField, mf: MedialField, batch: SampleBatch,
                          fd_step: Optional[float] = None) -> FieldPredictions:
    """Predictions made of exact values: Φ and ∇Φ from *field*, MF from *mf* (∇MF by central differences)."""
    diag = field.bounds.diag
    h = CURVATURE_STEP_REL * diag
    fd = fd_step if fd_step is not None else ORTHOGONALITY_FD_REL * diag
    x = batch.volume_points
    grad_v, _ = unit_gradient(field, x)
    grad_shifted, _ = unit_gradient(field, x + h * grad_v)
    grad_s, _ = unit_gradient(field, batch.surface_points)
    grad_mf = np.empty_like(x)
    for k in range(x.shape[1]):
        e = np.zeros(x.shape[1])
        e[k] = fd
        grad_mf[:, k] = (mf.mf(x + e) - mf.mf(x - e)) / (2.0 * fd)

    t = lambda a: torch.as_tensor(a, dtype=torch.float64)  # noqa: E731
    return FieldPredictions(
        surface_phi=t(field.phi(batch.surface_points)),
        surface_grad=t(grad_s),
        volume_points=t(x),
        volume_phi=t(field.phi(x)),
        volume_grad=t(grad_v),
        volume_grad_shifted=t(grad_shifted),
        volume_mf=t(mf.mf(x)),
        volume_grad_mf=t(grad_mf),
        volume_grad_head=t(grad_v),
        curvature_step=h,
    )


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


def inscribed_target(pred: FieldPredictions, gt: GroundTruth) -> torch.Tensor:
    """
    ``|Φ_GT(Π_M(x))|`` with Π_M built from the predicted Φ, ∇Φ and MF.

    Φ_GT is a numpy field, so the value enters through its first-order
    expansion around the detached projection: the value is exact and its
    derivative with respect to Π_M is ``sign(Φ_GT)·∇Φ_GT``.
    """
    g = pred.volume_grad
    unit = g / g.norm(dim=1, keepdim=True).clamp_min(1e-12)
    n = torch.sign(pred.volume_phi)[:, None] * unit
    proj = pred.volume_points + n * (pred.volume_mf - pred.volume_phi.abs())[:, None]

    at = proj.detach().to(torch.float64).cpu().numpy()
    value = gt.field.phi(at)
    slope = np.sign(value)[:, None] * gt.field.gradient(at)
    value_t = torch.as_tensor(np.abs(value), dtype=proj.dtype)
    slope_t = torch.as_tensor(slope, dtype=proj.dtype)
    return value_t + ((proj - proj.detach()) * slope_t).sum(dim=1)


def loss_terms(pred: FieldPredictions, gt: GroundTruth) -> dict[str, torch.Tensor]:
    """Unweighted batch means of all nine terms."""
    if pred.surface_phi.numel() == 0 or pred.volume_phi.numel() == 0:
        raise EmptyBatch("loss estimators need at least one surface and one volume sample")
    dtype = pred.volume_phi.dtype
    normals = gt.surface_normals.to(dtype)
    phi_gt = gt.volume_phi.to(dtype)
    grad_gt = gt.volume_grad.to(dtype)

    grad_norm = pred.volume_grad.norm(dim=1)
    curvature = (pred.volume_grad_shifted - pred.volume_grad) / pred.curvature_step

    return {
        "surface": (pred.surface_phi ** 2).mean(),
        "normal": ((pred.surface_grad - normals) ** 2).sum(dim=1).mean(),
        "maximal": (torch.clamp(phi_gt.abs() - pred.volume_mf, min=0.0) ** 2).mean(),
        "inscribed": ((pred.volume_mf - inscribed_target(pred, gt)) ** 2).mean(),
        "orthogonal": ((pred.volume_grad_mf * grad_gt).sum(dim=1) ** 2).mean(),
        "eikonal": ((grad_norm - 1.0) ** 2).mean(),
        "minsurface": torch.exp(-MINSURFACE_SHARPNESS * pred.volume_phi.abs()).mean(),
        "curvature": curvature.abs().sum(dim=1).mean(),
        "gradient": ((pred.volume_grad_head - pred.volume_grad) ** 2).sum(dim=1).mean(),
    }


def curvature_weight(progress: float, base: float = 1e-1) -> float:
    """``base · 10^(−4t)``; with the default base this is ``10^−(1+4t)``."""
    t = min(max(float(progress), 0.0), 1.0)
    return base * 10.0 ** (-4.0 * t)


def effective_weights(weights: dict[str, float], progress: float) -> dict[str, float]:
    out = dict(weights)
    out["curvature"] = curvature_weight(progress, weights.get("curvature", 0.0))
    return out


def weighted_total(terms: dict[str, torch.Tensor], weights: dict[str, float]) -> torch.Tensor:
    # fixed summation order
    total = torch.zeros((), dtype=terms["surface"].dtype)
    for name in LOSS_TERMS:
        w = weights.get(name, 0.0)
        if w:
            total = total + w * terms[name]
    return total


def losses(net: MedialNet, field: DistanceField, batch: SampleBatch) -> dict[str, torch.Tensor]:
    """All nine terms for *net* on *batch* supervised by *field*."""
    if len(batch.surface_points) == 0 or len(batch.volume_points) == 0:
        raise EmptyBatch("batch has no surface or no volume samples")
    gt = ground_truth(field, batch, dtype=net.arch.torch_dtype)
    return loss_terms(network_predictions(net, batch, gt, field.bounds.diag), gt)
