"""
tests/test_network.py
MedialNet construction, forward pass, input gradients, adapters and checkpoints.
"""

import numpy as np
import pytest
import torch

from core.errors import CheckpointError
from neural.adapters import as_fields
from neural.checkpoint import load_checkpoint, read_header, save_checkpoint
from neural.network import ArchitectureConfig, init_network, input_gradient

TINY = ArchitectureConfig(width=16, depth=2, head_width=8, head_layers=1, fourier_bands=4, dtype="float64")


def _state_bytes(net) -> list[bytes]:
    return [t.detach().numpy().tobytes() for t in net.state_dict().values()]


def test_forward_shapes(disk):
    net = init_network(2, 0, TINY, disk.bounds)
    out = net(torch.zeros(5, 2, dtype=torch.float64))
    assert out.phi.shape == (5,)
    assert out.mf_plus.shape == (5,)
    assert out.mf_minus.shape == (5,)
    assert out.grad.shape == (5, 2)


def test_same_seed_gives_identical_parameters(sphere):
    a = init_network(3, 7, TINY, sphere.bounds)
    b = init_network(3, 7, TINY, sphere.bounds)
    c = init_network(3, 8, TINY, sphere.bounds)
    assert _state_bytes(a) == _state_bytes(b)
    assert _state_bytes(a) != _state_bytes(c)


def test_forward_is_reproducible(disk):
    net = init_network(2, 0, TINY, disk.bounds)
    x = torch.as_tensor(np.random.default_rng(0).uniform(-2, 2, size=(64, 2)))
    assert torch.equal(net(x).phi, net(x).phi)


def test_rejects_bad_dimension(disk):
    with pytest.raises(ValueError):
        init_network(4, 0, TINY, disk.bounds)


def test_fourier_weights_scale_with_frequency_norm(disk):
    net = init_network(2, 0, TINY, disk.bounds)
    norms = net.fourier_matrix.norm(dim=1)
    torch.testing.assert_close(net.fourier_weights, TINY.fourier_alpha * norms)


def test_geometric_init_is_sphere_like(disk):
    net = init_network(2, 0, ArchitectureConfig(), disk.bounds)
    angles = np.linspace(0.0, 2.0 * np.pi, 16, endpoint=False)
    ring = disk.diag * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    with torch.no_grad():
        at_center = net(torch.zeros(1, 2)).phi
        at_ring = net(torch.as_tensor(ring, dtype=torch.float32)).phi
    assert float(at_center[0]) < 0.0
    assert bool(torch.all(at_ring > 0.0))


def test_mf_selection_follows_phi_sign(disk):
    net = init_network(2, 1, TINY, disk.bounds)
    x = torch.as_tensor(np.random.default_rng(1).uniform(-4, 4, size=(256, 2)))
    out = net(x)
    outside = out.phi > 0.0
    assert bool(outside.any()) and bool((~outside).any())
    assert torch.equal(out.mf[outside], out.mf_plus[outside])
    assert torch.equal(out.mf[~outside], out.mf_minus[~outside])


def test_zero_weight_head_outputs_its_bias(disk):
    net = init_network(2, 0, TINY, disk.bounds)
    last = net.heads["mf_plus"][-1]
    with torch.no_grad():
        last.weight.zero_()
        last.bias.fill_(0.25)
    out = net(torch.randn(10, 2, dtype=torch.float64))
    torch.testing.assert_close(out.mf_plus, torch.full((10,), 0.25, dtype=torch.float64))


# ---------------------------------------------------------------------------
# Input gradients
# ---------------------------------------------------------------------------


def test_input_gradient_matches_finite_differences(box):
    net = init_network(2, 3, TINY, box.bounds)
    x = torch.as_tensor(np.random.default_rng(2).uniform(-2, 2, size=(1000, 2)))
    auto = input_gradient(net, x)
    h = 1e-5
    fd = torch.empty_like(x)
    with torch.no_grad():
        for k in range(2):
            e = torch.zeros(2, dtype=x.dtype)
            e[k] = h
            fd[:, k] = (net(x + e).phi - net(x - e).phi) / (2.0 * h)
    rel = (auto - fd).norm(dim=1) / fd.norm(dim=1).clamp_min(1e-3)
    assert float(rel.max()) < 1e-4


def test_linear_network_gradient_is_weight_product(disk):
    arch = ArchitectureConfig(width=8, depth=2, head_width=4, head_layers=1, fourier_bands=0,
                              activation="identity", geometric_init=False, dtype="float64")
    net = init_network(2, 0, arch, disk.bounds)
    product = (net.heads["phi"][1].weight @ net.heads["phi"][0].weight
               @ net.backbone[1].weight @ net.backbone[0].weight)
    x = torch.randn(20, 2, dtype=torch.float64)
    grad = input_gradient(net, x)
    torch.testing.assert_close(grad, product.detach().expand(20, 2))


def test_constant_network_has_zero_gradient(disk):
    net = init_network(2, 0, TINY, disk.bounds)
    with torch.no_grad():
        net.heads["phi"][-1].weight.zero_()
    grad = input_gradient(net, torch.randn(8, 2, dtype=torch.float64))
    assert torch.count_nonzero(grad) == 0


# ---------------------------------------------------------------------------
# Adapters
# ---------------------------------------------------------------------------


def test_adapters_match_forward(disk):
    net = init_network(2, 4, TINY, disk.bounds)
    field, mf = as_fields(net)
    pts = np.random.default_rng(3).uniform(-2, 2, size=(50, 2))
    with torch.no_grad():
        out = net(torch.as_tensor(pts))
    np.testing.assert_array_equal(field.phi(pts), out.phi.numpy())
    np.testing.assert_array_equal(mf.mf(pts), out.mf.numpy())
    assert not mf.clamped(pts).any()
    assert field.bounds is disk.bounds


def test_adapter_falls_back_to_autodiff_for_degenerate_gradient_head(disk):
    net = init_network(2, 5, TINY, disk.bounds)
    last = net.heads["grad"][-1]
    with torch.no_grad():
        last.weight.zero_()
        last.bias.zero_()
    field, _ = as_fields(net)
    pts = np.random.default_rng(4).uniform(-2, 2, size=(10, 2))
    np.testing.assert_allclose(field.gradient(pts), field.autodiff_gradient(pts))


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


def test_checkpoint_round_trip(tmp_path, disk):
    net = init_network(2, 6, TINY, disk.bounds)
    path = save_checkpoint(net, tmp_path / "disk.ckpt", train_cfg={"steps": 3}, extra={"scene": "disk"})
    header, _ = read_header(path)
    assert header["dim"] == 2
    assert header["train"] == {"steps": 3}
    assert header["scene"] == "disk"

    loaded = load_checkpoint(path)
    assert _state_bytes(loaded) == _state_bytes(net)
    x = torch.randn(16, 2, dtype=torch.float64)
    assert torch.equal(loaded(x).phi, net(x).phi)


def test_checkpoint_round_trip_float32(tmp_path, sphere):
    net = init_network(3, 0, ArchitectureConfig(width=8, depth=1, fourier_bands=2), sphere.bounds)
    loaded = load_checkpoint(save_checkpoint(net, tmp_path / "s.ckpt"))
    assert _state_bytes(loaded) == _state_bytes(net)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "nope.ckpt")


def test_truncated_checkpoint(tmp_path, disk):
    path = save_checkpoint(init_network(2, 0, TINY, disk.bounds), tmp_path / "t.ckpt")
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_foreign_checkpoint(tmp_path):
    path = tmp_path / "foreign.ckpt"
    path.write_bytes(b'{"format": "something-else"}\n')
    with pytest.raises(CheckpointError):
        load_checkpoint(path)
    path.write_bytes(b"\xff\xfe not json\n")
    with pytest.raises(CheckpointError):
        load_checkpoint(path)
