from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

# BT.601 full-range coefficients
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False)
class Frame:
    """
    One decoded 8-bit RGB image.

    `pixels` is a read-only (height, width, 3) uint8 array in row-major order.
    """

    pixels: np.ndarray
    index: int = 0

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3:
            raise ValueError(
                f"Frame pixels must be (height, width, 3), got {pixels.shape}"
            )
        if pixels.shape[0] <= 0 or pixels.shape[1] <= 0:
            raise ValueError("Frame dimensions must be positive")
        if pixels.dtype != np.uint8:
            pixels = np.clip(np.rint(pixels), 0, 255).astype(np.uint8)
        elif pixels.flags.writeable:
            pixels = pixels.copy()
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def size(self):
        return self.width, self.height

    def with_index(self, index):
        return Frame(self.pixels, index)


@dataclass(frozen=True, eq=False)
class FrameSequence:
    frames: Tuple[Frame, ...]
    frame_rate: Fraction = Fraction(25, 1)
    source_id: str = ""

    def __post_init__(self):
        frames = tuple(
            frame if frame.index == i else frame.with_index(i)
            for i, frame in enumerate(self.frames)
        )
        if frames:
            size = frames[0].size
            for frame in frames:
                if frame.size != size:
                    raise ValueError(
                        f"Frame {frame.index} of '{self.source_id}' is "
                        f"{frame.width}x{frame.height}, expected {size[0]}x{size[1]}"
                    )
        if self.frame_rate <= 0:
            raise ValueError("Frame rate must be positive")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "frame_rate", Fraction(self.frame_rate))

    def __len__(self):
        return len(self.frames)

    def __getitem__(self, item):
        return self.frames[item]

    def __iter__(self):
        return iter(self.frames)

    @property
    def width(self):
        return self.frames[0].width if self.frames else 0

    @property
    def height(self):
        return self.frames[0].height if self.frames else 0

    @property
    def aspect(self):
        return self.width / self.height

    def slice(self, start, end):
        return FrameSequence(
            tuple(self.frames[start:end]), self.frame_rate, self.source_id
        )


def luma(frame):
    """Per-pixel 8-bit luma, Y = round(0.299 R + 0.587 G + 0.114 B)."""
    pixels = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    y = pixels.astype(np.float64) @ LUMA_WEIGHTS
    return np.clip(np.rint(y), 0, 255).astype(np.uint8)


def mean_luma(frame):
    return float(luma(frame).mean())


def rgb_to_yuv(pixels):
    rgb = pixels.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    u = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    v = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    planes = [np.clip(np.rint(plane), 0, 255).astype(np.uint8) for plane in (y, u, v)]
    return planes


def yuv_to_rgb(y, u, v):
    y = y.astype(np.float64)
    u = u.astype(np.float64) - 128.0
    v = v.astype(np.float64) - 128.0
    r = y + 1.402 * v
    g = y - 0.344136 * u - 0.714136 * v
    b = y + 1.772 * u
    rgb = np.stack([r, g, b], axis=-1)
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def solid_frame(width, height, color, index=0):
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[...] = color
    return Frame(pixels, index)
