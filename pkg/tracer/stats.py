"""
tracer/stats.py
Iteration statistics pooled over frames.

``mean``/``min``/``max`` summarize the per-frame mean iteration counts; the
histogram pools every traced ray, misses and budget-exhausted rays included.
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class IterationStats:
    histogram: np.ndarray      # histogram[k] = rays that took exactly k iterations
    frame_means: np.ndarray

    @classmethod
    def from_frames(cls, frames: list[np.ndarray]) -> "IterationStats":
        if not frames:
            raise ValueError("need at least one frame")
        top = max(int(f.max()) if f.size else 0 for f in frames)
        hist = np.zeros(top + 1, dtype=np.int64)
        for f in frames:
            hist += np.bincount(f.astype(np.int64), minlength=top + 1)
        means = np.array([float(f.mean()) if f.size else 0.0 for f in frames])
        return cls(histogram=hist, frame_means=means)

    @property
    def rays(self) -> int:
        return int(self.histogram.sum())

    @property
    def mean(self) -> float:
        return float(self.frame_means.mean())

    @property
    def min(self) -> float:
        return float(self.frame_means.min())

    @property
    def max(self) -> float:
        return float(self.frame_means.max())

    @property
    def pooled_mean(self) -> float:
        k = np.arange(self.histogram.size)
        return float((k * self.histogram).sum() / max(self.rays, 1))

    def tail_fraction(self, threshold: float) -> float:
        """Fraction of rays needing strictly more than *threshold* iterations."""
        k = np.arange(self.histogram.size)
        return float(self.histogram[k > threshold].sum() / max(self.rays, 1))

    def histogram_frame(self) -> pd.DataFrame:
        buckets = np.flatnonzero(self.histogram)
        return pd.DataFrame({"bucket": buckets, "count": self.histogram[buckets]})

    def summary(self) -> dict:
        return {"mean": self.mean, "min": self.min, "max": self.max}
