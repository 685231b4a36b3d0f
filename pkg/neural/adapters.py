"""
neural/adapters.py
Numpy-facing DistanceField / MedialField views of a trained MedialNet.
"""

import numpy as np
import torch

from core.math_utils import as_points, chunked, normalize_rows
from neural.network import MedialNet, input_gradient, to_tensor


class NeuralDistanceField:
    """
    Φ from the Φ head; ∇Φ from the gradient head, with autodiff of the Φ
    head wherever the gradient head's output is degenerate.
    """

    def __init__(self, net: MedialNet) -> None:
        self.net = net
        self.dim = net.dim
        self.bounds = net.bounds

    def _forward(self, points: np.ndarray):
        with torch.no_grad():
            return self.net(to_tensor(points, self.net))

    def phi(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        return chunked(lambda q: self._forward(q).phi.double().numpy(), p)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        g = chunked(lambda q: self._forward(q).grad.double().numpy(), p)
        _, defined = normalize_rows(g)
        if not np.all(defined):
            bad = np.flatnonzero(~defined)
            g[bad] = self.autodiff_gradient(p[bad])
        return g

    def autodiff_gradient(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)
        return input_gradient(self.net, to_tensor(p, self.net)).double().numpy()


class NeuralMedialField:
    """MF⁺ where the network's Φ is positive, MF⁻ elsewhere. The network never reports a clamp."""

    def __init__(self, net: MedialNet) -> None:
        self.net = net
        self.dim = net.dim

    def heads(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(phi, mf_plus, mf_minus)`` as float64 arrays."""
        p, _ = as_points(points)
        with torch.no_grad():
            out = self.net(to_tensor(p, self.net))
        return out.phi.double().numpy(), out.mf_plus.double().numpy(), out.mf_minus.double().numpy()

    def mf(self, points: np.ndarray) -> np.ndarray:
        p, _ = as_points(points)

        def select(q):
            phi, plus, minus = self.heads(q)
            return np.where(phi > 0.0, plus, minus)

        return chunked(select, p)

    def clamped(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(as_points(points)[0].shape[0], dtype=bool)


def as_fields(net: MedialNet) -> tuple[NeuralDistanceField, NeuralMedialField]:
    net.eval()
    return NeuralDistanceField(net), NeuralMedialField(net)
