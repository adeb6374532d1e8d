"""
FAST segment-test corner detection.
"""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

# Bresenham circle of radius 3, clockwise from 12 o'clock, as (dx, dy)
RING = (
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
)
ARC_LENGTH = 9
RING_RADIUS = 3
MAX_SUBPIXEL_OFFSET = 0.5


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    score: float = 0.0
    is_foreground: bool = False


def _contiguous_arc(mask):
    """True where at least ARC_LENGTH consecutive ring entries are set."""
    n = len(RING)
    found = np.zeros(mask.shape[1:], dtype=bool)
    for start in range(n):
        arc = mask[start].copy()
        for step in range(1, ARC_LENGTH):
            arc &= mask[(start + step) % n]
        found |= arc
    return found


def _peak_offset(before, peak, after):
    """Vertex of the parabola through three equally spaced scores, in pixels."""
    curvature = before - 2 * peak + after
    offset = np.divide(
        before - after,
        2 * curvature,
        out=np.zeros_like(peak),
        where=curvature < 0,
    )
    return np.clip(offset, -MAX_SUBPIXEL_OFFSET, MAX_SUBPIXEL_OFFSET)


def fast_detect(image, threshold=20, max_points=500):
    """
    Detect FAST-9 corners on an 8-bit luma image.

    A pixel is a corner when at least 9 contiguous pixels of its 16-pixel
    ring are all brighter than center + threshold or all darker than
    center - threshold. The score is the summed intensity excess of the
    qualifying ring pixels; corners are non-maximum suppressed over 3x3
    neighbourhoods and the `max_points` strongest are returned, ordered by
    descending score then row then column. Positions are refined to
    subpixel precision by a parabola fit of the score along each axis.
    """
    image = np.asarray(image)
    height, width = image.shape
    r = RING_RADIUS
    if height < 2 * r + 1 or width < 2 * r + 1:
        return []

    img = image.astype(np.int16)
    center = img[r : height - r, r : width - r]
    ring = np.stack(
        [img[r + dy : height - r + dy, r + dx : width - r + dx] for dx, dy in RING]
    )
    brighter = ring > center + threshold
    darker = ring < center - threshold
    bright_corner = _contiguous_arc(brighter)
    dark_corner = _contiguous_arc(darker)

    bright_score = np.where(brighter, ring - center - threshold, 0).sum(axis=0)
    dark_score = np.where(darker, center - threshold - ring, 0).sum(axis=0)
    score = np.zeros(center.shape, dtype=np.float64)
    score = np.where(bright_corner, bright_score, score)
    score = np.where(dark_corner, np.maximum(score, dark_score), score)

    full = np.zeros((height, width), dtype=np.float64)
    full[r : height - r, r : width - r] = score
    local_max = ndimage.maximum_filter(full, size=3, mode="constant", cval=0.0)
    ys, xs = np.nonzero((full > 0) & (full >= local_max))
    scores = full[ys, xs]

    order = np.lexsort((xs, ys, -scores))[:max_points]
    xs, ys, scores = xs[order], ys[order], scores[order]
    sub_x = xs + _peak_offset(full[ys, xs - 1], scores, full[ys, xs + 1])
    sub_y = ys + _peak_offset(full[ys - 1, xs], scores, full[ys + 1, xs])
    return [
        Keypoint(float(x), float(y), float(score))
        for x, y, score in zip(sub_x, sub_y, scores)
    ]


def keypoint_array(points):
    if not points:
        return np.zeros((0, 2), dtype=np.float64)
    return np.array([(p.x, p.y) for p in points], dtype=np.float64)
