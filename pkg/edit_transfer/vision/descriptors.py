"""
BRIEF-style 256-bit binary descriptors.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import ndimage

from ..constants import DESCRIPTOR_BITS, DESCRIPTOR_BORDER, DESCRIPTOR_BYTES

PATTERN_SEED = 20210601
PATTERN_RADIUS = 15
SMOOTHING_SIZE = 5


def _sampling_pattern():
    rng = np.random.default_rng(PATTERN_SEED)
    pattern = rng.integers(
        -PATTERN_RADIUS, PATTERN_RADIUS + 1, size=(DESCRIPTOR_BITS, 4)
    )
    # a pair comparing a pixel with itself carries no information
    same = (pattern[:, 0] == pattern[:, 2]) & (pattern[:, 1] == pattern[:, 3])
    nudge = np.where(pattern[same, 0] < PATTERN_RADIUS, 1, -1)
    pattern[same, 2] = pattern[same, 0] + nudge
    pattern.flags.writeable = False
    return pattern


# (ux, uy, vx, vy) per bit, fixed for the lifetime of the format
PATTERN = _sampling_pattern()

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint16)


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    """
    Descriptors for the keypoints that survived the border check.

    `bits` is an (n, 32) uint8 array, row i describing `keypoints[i]`.
    `dropped` lists the input indices that were too close to the border.
    """

    keypoints: list
    bits: np.ndarray
    dropped: List[int] = field(default_factory=list)

    def __len__(self):
        return len(self.keypoints)


def smooth(image):
    return ndimage.uniform_filter(
        np.asarray(image, dtype=np.float64), size=SMOOTHING_SIZE, mode="reflect"
    )


def describe(image, points, smoothed=None):
    image = np.asarray(image)
    height, width = image.shape
    if smoothed is None:
        smoothed = smooth(image)

    kept, dropped = [], []
    for i, point in enumerate(points):
        x, y = int(round(point.x)), int(round(point.y))
        if (
            DESCRIPTOR_BORDER <= x < width - DESCRIPTOR_BORDER
            and DESCRIPTOR_BORDER <= y < height - DESCRIPTOR_BORDER
        ):
            kept.append(i)
        else:
            dropped.append(i)

    if not kept:
        bits = np.zeros((0, DESCRIPTOR_BYTES), dtype=np.uint8)
        return DescriptorSet([], bits, dropped)

    xs = np.array([int(round(points[i].x)) for i in kept])[:, None]
    ys = np.array([int(round(points[i].y)) for i in kept])[:, None]
    first = smoothed[ys + PATTERN[:, 1], xs + PATTERN[:, 0]]
    second = smoothed[ys + PATTERN[:, 3], xs + PATTERN[:, 2]]
    bits = np.packbits(first < second, axis=1)
    return DescriptorSet([points[i] for i in kept], bits, dropped)


def hamming_matrix(a, b, chunk=256):
    """Pairwise Hamming distances between two (n, 32) uint8 descriptor arrays."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    out = np.empty((len(a), len(b)), dtype=np.int32)
    for start in range(0, len(a), chunk):
        block = a[start : start + chunk, None, :] ^ b[None, :, :]
        out[start : start + chunk] = _POPCOUNT[block].sum(axis=2)
    return out


def hamming(a, b):
    return int(hamming_matrix(np.asarray(a)[None], np.asarray(b)[None])[0, 0])
