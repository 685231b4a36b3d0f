"""
tests/test_losses.py
Loss estimators on exact reference fields and parameter gradients on a tiny network.
"""

import numpy as np
import pytest
import torch

from core.constants import LOSS_TERMS
from core.errors import EmptyBatch
from fields.surface import sample_surface
from medial.oracle import OracleMedialField
from neural.losses import (
    curvature_weight,
    effective_weights,
    ground_truth,
    loss_terms,
    losses,
    reference_predictions,
    weighted_total,
)
from neural.network import ArchitectureConfig, init_network
from neural.sampling import SampleBatch, sample_batch

TINY = ArchitectureConfig(width=6, depth=1, head_width=4, head_layers=1, fourier_bands=2,
                          softplus_beta=10.0, dtype="float64")


def _disk_batch(disk, n: int = 256, seed: int = 0) -> SampleBatch:
    """Surface samples plus volume points kept clear of ∂O and of the center."""
    rng = np.random.default_rng(seed)
    surface, normals = sample_surface(disk.field, n, rng)
    volume = rng.uniform(-1.9, 1.9, size=(4 * n, 2))
    r = np.linalg.norm(volume, axis=1)
    volume = volume[(np.abs(r - 1.0) > 0.05) & (r > 0.05)][:n]
    return SampleBatch(surface_points=surface, surface_normals=normals, volume_points=volume)


# ---------------------------------------------------------------------------
# Exact reference
# ---------------------------------------------------------------------------


def test_exact_field_zeroes_the_constraint_terms(disk):
    batch = _disk_batch(disk)
    pred = reference_predictions(disk.field, OracleMedialField(disk.field), batch)
    terms = loss_terms(pred, ground_truth(disk.field, batch))
    for name in ("surface", "normal", "maximal", "inscribed", "eikonal", "gradient", "curvature"):
        assert float(terms[name]) == pytest.approx(0.0, abs=1e-8), name
    assert float(terms["orthogonal"]) < 1e-3


def test_all_terms_are_non_negative(disk):
    batch = _disk_batch(disk, n=64, seed=1)
    net = init_network(2, 0, TINY, disk.bounds)
    terms = losses(net, disk.field, batch)
    assert set(terms) == set(LOSS_TERMS)
    for name, value in terms.items():
        assert value.ndim == 0
        assert float(value) >= 0.0, name


def test_zero_surface_phi_gives_zero_surface_loss(disk):
    batch = _disk_batch(disk, n=32, seed=2)
    pred = reference_predictions(disk.field, OracleMedialField(disk.field), batch)
    pred.surface_phi = torch.zeros_like(pred.surface_phi)
    assert float(loss_terms(pred, ground_truth(disk.field, batch))["surface"]) == 0.0


def test_mf_equal_to_abs_phi_is_maximal(disk):
    batch = _disk_batch(disk, n=32, seed=3)
    pred = reference_predictions(disk.field, OracleMedialField(disk.field), batch)
    pred.volume_mf = pred.volume_phi.abs()
    assert float(loss_terms(pred, ground_truth(disk.field, batch))["maximal"]) == 0.0


def test_empty_batch(disk):
    net = init_network(2, 0, TINY, disk.bounds)
    empty = SampleBatch(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)))
    with pytest.raises(EmptyBatch):
        losses(net, disk.field, empty)


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


def test_curvature_schedule():
    assert curvature_weight(0.0) == pytest.approx(1e-1)
    assert curvature_weight(0.5) == pytest.approx(1e-3)
    assert curvature_weight(1.0) == pytest.approx(1e-5)
    assert curvature_weight(3.0) == pytest.approx(1e-5)


def test_effective_weights_only_touch_curvature():
    weights = {"surface": 2.0, "curvature": 1e-1}
    out = effective_weights(weights, 1.0)
    assert out["surface"] == 2.0
    assert out["curvature"] == pytest.approx(1e-5)
    assert weights["curvature"] == 1e-1


def test_weighted_total():
    terms = {name: torch.tensor(float(i + 1), dtype=torch.float64) for i, name in enumerate(LOSS_TERMS)}
    total = weighted_total(terms, {"surface": 2.0, "eikonal": 0.5})
    eikonal = float(terms["eikonal"])
    assert float(total) == pytest.approx(2.0 * 1.0 + 0.5 * eikonal)


# ---------------------------------------------------------------------------
# Parameter gradients
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("term", LOSS_TERMS)
def test_parameter_gradients_match_finite_differences(disk, term):
    batch = sample_batch(disk.field, 12, 0.5, np.random.default_rng(4))
    net = init_network(2, 1, TINY, disk.bounds)
    params = [p for p in net.parameters()]

    net.zero_grad()
    losses(net, disk.field, batch)[term].backward()
    auto = torch.cat([p.grad.reshape(-1) if p.grad is not None else torch.zeros(p.numel(), dtype=p.dtype)
                      for p in params])

    rng = np.random.default_rng(5)
    flat = torch.cat([p.detach().reshape(-1) for p in params])
    picks = rng.choice(flat.numel(), size=12, replace=False)
    sizes = np.cumsum([0] + [p.numel() for p in params])
    h = 1e-5
    fd = []
    for k in picks:
        owner = int(np.searchsorted(sizes, k, side="right") - 1)
        local = int(k - sizes[owner])
        # .data edits bypass autograd; the losses themselves need input gradients
        view = params[owner].data.view(-1)
        base = float(view[local])
        values = []
        for shifted in (base + h, base - h):
            view[local] = shifted
            values.append(float(losses(net, disk.field, batch)[term].detach()))
        view[local] = base
        fd.append((values[0] - values[1]) / (2.0 * h))

    fd = np.array(fd)
    got = auto[torch.as_tensor(picks)].detach().numpy()
    scale = max(np.max(np.abs(fd)), 1e-6)
    np.testing.assert_allclose(got, fd, rtol=1e-3, atol=1e-3 * scale)
