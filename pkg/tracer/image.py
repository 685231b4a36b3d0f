"""
tracer/image.py
8-bit RGB images and the binary PPM (P6) codec.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Image:
    pixels: np.ndarray   # (height, width, 3) uint8

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3 or self.pixels.dtype != np.uint8:
            raise ValueError(f"pixels must be (h, w, 3) uint8, got {self.pixels.shape} {self.pixels.dtype}")

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @classmethod
    def from_rows(cls, rgb: np.ndarray, width: int, height: int) -> "Image":
        return cls(np.ascontiguousarray(rgb.reshape(height, width, 3), dtype=np.uint8))

    def to_ppm(self) -> bytes:
        return f"P6\n{self.width} {self.height}\n255\n".encode("ascii") + self.pixels.tobytes()

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_ppm())
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Image":
        data = Path(path).read_bytes()
        tokens, pos = [], 0
        while len(tokens) < 4:
            while data[pos:pos + 1].isspace():
                pos += 1
            start = pos
            while not data[pos:pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos].decode("ascii"))
        if tokens[0] != "P6" or tokens[3] != "255":
            raise ValueError(f"{path}: only 8-bit P6 images are supported")
        width, height = int(tokens[1]), int(tokens[2])
        body = np.frombuffer(data[pos + 1:pos + 1 + width * height * 3], dtype=np.uint8)
        return cls(body.reshape(height, width, 3).copy())


def to_uint8(rgb: np.ndarray) -> np.ndarray:
    """Float colors in [0, 1] to bytes, rounding half to even."""
    return np.clip(np.rint(np.asarray(rgb, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)
