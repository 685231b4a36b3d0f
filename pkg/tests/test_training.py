"""
tests/test_training.py
Training loop, its configuration, and the full-size acceptance reruns (--runslow).
"""

import numpy as np
import pandas as pd
import pytest
import torch
from pydantic import ValidationError

from core.constants import LOSS_TERMS, MEDIAL_LOSS_TERMS
from core.errors import DivergedLoss
from fields.surface import sample_surface
from neural import training
from neural.adapters import as_fields
from medial.residuals import audit
from neural.network import ArchitectureConfig, init_network
from neural.sampling import sample_batch
from neural.training import TrainConfig, train

SMALL = ArchitectureConfig(width=32, depth=2, head_width=16, head_layers=1, fourier_bands=8)


def _cfg(**overrides) -> TrainConfig:
    base = {"steps": 40, "batch_size": 128, "lr": 1e-2, "seed": 0, "log_every": 10, "architecture": SMALL}
    return TrainConfig(**{**base, **overrides})


def test_short_run_reduces_the_loss(disk):
    result = train(disk.field, _cfg())
    assert list(result.log.columns) == ["step", *LOSS_TERMS, "total"]
    assert len(result.log) == 40
    assert result.log["total"].tail(5).mean() < result.log["total"].head(5).mean()


def test_training_is_deterministic(box):
    a = train(box.field, _cfg(steps=5))
    b = train(box.field, _cfg(steps=5))
    pd.testing.assert_frame_equal(a.log, b.log)
    for ta, tb in zip(a.net.state_dict().values(), b.net.state_dict().values()):
        assert torch.equal(ta, tb)


def test_ablation_zeroes_the_medial_weights():
    weights = TrainConfig(ablate_medial=True).weights()
    for name in MEDIAL_LOSS_TERMS:
        assert weights[name] == 0.0
    assert weights["surface"] == 1e4


def test_ablated_run_still_trains(disk):
    result = train(disk.field, _cfg(ablate_medial=True))
    assert np.isfinite(result.final_total)
    assert result.log["total"].tail(5).mean() < result.log["total"].head(5).mean()


def test_loss_weight_validation():
    with pytest.raises(ValidationError):
        TrainConfig(loss_weights={"smoothness": 1.0})
    with pytest.raises(ValidationError):
        TrainConfig(loss_weights={"surface": -1.0})
    merged = TrainConfig(loss_weights={"surface": 5.0}).loss_weights
    assert merged["surface"] == 5.0
    assert merged["eikonal"] == 1.0


def test_sigma_modes():
    assert TrainConfig().sigma(4.0) == pytest.approx(2.0)
    assert TrainConfig(sigma_mode="paper").sigma(4.0) == pytest.approx(8.0)
    assert TrainConfig(sigma_volume=0.3, sigma_mode="paper").sigma(4.0) == pytest.approx(0.3)


def test_non_finite_loss_raises(disk, monkeypatch):
    def nan_losses(net, field, batch):
        return {name: torch.tensor(float("nan")) for name in LOSS_TERMS}

    monkeypatch.setattr(training, "losses", nan_losses)
    with pytest.raises(DivergedLoss):
        train(disk.field, _cfg(steps=3))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def test_sample_batch_is_seeded_and_on_surface(disk):
    a = sample_batch(disk.field, 256, 0.5, np.random.default_rng(1))
    b = sample_batch(disk.field, 256, 0.5, np.random.default_rng(1))
    np.testing.assert_array_equal(a.volume_points, b.volume_points)
    assert np.max(np.abs(np.linalg.norm(a.surface_points, axis=1) - 1.0)) < 1e-9
    assert len(a) == 512


def test_volume_offsets_follow_sigma(disk):
    sigma = 0.7
    batch = sample_batch(disk.field, 100_000, sigma, np.random.default_rng(2))
    offsets = batch.volume_points - batch.surface_points
    assert np.std(offsets) == pytest.approx(sigma, rel=0.05)


def test_sample_batch_rejects_bad_arguments(disk):
    with pytest.raises(ValueError):
        sample_batch(disk.field, 0, 0.5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_batch(disk.field, 8, 0.0, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# Full-size reruns
# ---------------------------------------------------------------------------


def _surface_mae(net, scene) -> float:
    field, _ = as_fields(net)
    pts, _ = sample_surface(scene.field, 4096, np.random.default_rng(0))
    return float(np.mean(np.abs(field.phi(pts))))


def _residual_means(net, scene) -> dict[str, float]:
    _, mf = as_fields(net)
    pts = np.random.default_rng(0).uniform(scene.bounds.lo, scene.bounds.hi, size=(2000, scene.dim))
    reports, _ = audit(mf, scene.field, pts)
    return {r.name: r.mean for r in reports}


@pytest.mark.slow
@pytest.mark.parametrize("name", ["disk", "box"])
def test_full_training_reaches_surface_accuracy_and_cuts_residuals(request, name):
    scene = request.getfixturevalue(name)
    cfg = TrainConfig(steps=20_000, batch_size=1024)
    net = init_network(scene.dim, cfg.seed, cfg.architecture, scene.bounds)
    before = _residual_means(net, scene)
    full = train(scene.field, cfg, net=net)
    after = _residual_means(full.net, scene)
    for residual, value in after.items():
        assert value <= 0.1 * before[residual] + 1e-6, (residual, before[residual], value)

    ablated = train(scene.field, TrainConfig(steps=20_000, batch_size=1024, ablate_medial=True))

    mae_full, mae_ablated = _surface_mae(full.net, scene), _surface_mae(ablated.net, scene)
    assert mae_full < 5e-3 * scene.diag
    assert max(mae_full, mae_ablated) <= 2.0 * min(mae_full, mae_ablated)
    assert full.final_total < full.initial_total

    if name == "disk":
        _, mf = as_fields(full.net)
        assert mf.mf(np.array([[0.3, 0.0]]))[0] == pytest.approx(1.0, rel=0.1)
