"""
Re-rendering target footage with a source shot's style.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from django.conf import settings

from .constants import (
    FRAMING_SEARCH_ITERATIONS,
    FRAMING_SEARCH_TOLERANCE,
    ContentCategory,
)
from .exceptions import FrameIndexError, FramingInfeasibleError
from .media import Frame, mean_luma
from .motion import frame_corners, mosaic_bounds
from .utils import round_half_up
from .vision import Homography
from .vision.warping import warp_pixels

logger = logging.getLogger(__name__)

FIT_EPSILON = 1e-9


@dataclass(frozen=True)
class FramingSolution:
    """Initial placement of the output window: p_target = scale * p + offset."""

    scale: float
    offset_x: float = 0.0
    offset_y: float = 0.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"Framing scale must be positive, got {self.scale}")

    @classmethod
    def identity(cls):
        return cls(1.0)

    @property
    def offset(self):
        return self.offset_x, self.offset_y

    @property
    def h_start(self):
        s = self.scale
        return Homography([[s, 0, self.offset_x], [0, s, self.offset_y], [0, 0, 1]])

    def to_dict(self):
        return {
            "scale": round(self.scale, 9),
            "offset": [round(self.offset_x, 9), round(self.offset_y, 9)],
        }

    @classmethod
    def from_dict(cls, data):
        offset_x, offset_y = data["offset"]
        return cls(float(data["scale"]), float(offset_x), float(offset_y))


@dataclass(frozen=True, eq=False)
class RenderedShot:
    frames: Tuple[Frame, ...]
    shot_index: int
    target_id: str
    framing: FramingSolution
    speed: float

    def __len__(self):
        return len(self.frames)

    @property
    def provenance(self):
        return {
            "shot": self.shot_index,
            "target": self.target_id,
            "framing": self.framing.to_dict(),
            "speed": self.speed,
        }


def stabilize_track(target):
    """Per-frame mappings from the target's start frame back into frame t."""
    return [cumulative.inverse() for cumulative in target.cumulative]


def _bisect_scale(fits, lo, hi):
    if fits(hi):
        return hi
    for _ in range(FRAMING_SEARCH_ITERATIONS):
        if hi - lo < FRAMING_SEARCH_TOLERANCE:
            break
        middle = (lo + hi) / 2
        if fits(middle):
            lo = middle
        else:
            hi = middle
    return lo


def _inside(bounds, scale, offset, target_w, target_h):
    x0 = scale * bounds.x0 + offset[0]
    y0 = scale * bounds.y0 + offset[1]
    x1 = scale * bounds.x1 + offset[0]
    y1 = scale * bounds.y1 + offset[1]
    return (
        x0 >= -FIT_EPSILON
        and y0 >= -FIT_EPSILON
        and x1 <= target_w + FIT_EPSILON
        and y1 <= target_h + FIT_EPSILON
    )


def _centred_offset(bounds, scale, target_w, target_h):
    return (
        (target_w - scale * bounds.width) / 2 - scale * bounds.x0,
        (target_h - scale * bounds.height) / 2 - scale * bounds.y0,
    )


def _aligned_offset(style, content, scale):
    cx, cy = content.center
    return cx - scale * style.width / 2, cy - scale * style.height / 2


def _clamped_offset(bounds, scale, offset, target_w, target_h):
    lo_x, hi_x = -scale * bounds.x0, target_w - scale * bounds.x1
    lo_y, hi_y = -scale * bounds.y0, target_h - scale * bounds.y1
    return (
        float(np.clip(offset[0], lo_x, max(lo_x, hi_x))),
        float(np.clip(offset[1], lo_y, max(lo_y, hi_y))),
    )


def solve_framing(style, target_size, target_content=None, min_scale=None):
    """
    Place the style's moving window inside the target frame.

    The window sweep B (the mosaic bounds of the style track at output
    size) is scaled as large as possible while every frame of the motion
    stays inside the target. Single-focus shots with a known content box
    start centred on that box; other shots centre the whole sweep.
    """
    if min_scale is None:
        min_scale = settings.EDIT_TRANSFER_MIN_FRAMING_SCALE
    target_w, target_h = target_size
    bounds = mosaic_bounds(style.track, style.width, style.height)
    largest = min(target_w / bounds.width, target_h / bounds.height)
    if largest < min_scale:
        raise FramingInfeasibleError(
            f"Shot {style.index}: a {target_w}x{target_h} target cannot hold a "
            f"{bounds.width:.1f}x{bounds.height:.1f} motion sweep above scale "
            f"{min_scale}"
        )

    def fits_anywhere(s):
        centred = _centred_offset(bounds, s, target_w, target_h)
        return _inside(bounds, s, centred, target_w, target_h)

    scale = _bisect_scale(fits_anywhere, min_scale, largest)
    offset = _centred_offset(bounds, scale, target_w, target_h)

    if style.category == ContentCategory.SINGLE_FOCUS and target_content is not None:

        def fits_aligned(s):
            aligned = _aligned_offset(style, target_content, s)
            return _inside(bounds, s, aligned, target_w, target_h)

        if fits_aligned(min_scale):
            scale = _bisect_scale(fits_aligned, min_scale, largest)
            offset = _aligned_offset(style, target_content, scale)
        else:
            logger.warning(
                f"Shot {style.index}: content box cannot be centred, offset clamped"
            )
            offset = _clamped_offset(
                bounds,
                scale,
                _aligned_offset(style, target_content, scale),
                target_w,
                target_h,
            )

    return FramingSolution(float(scale), float(offset[0]), float(offset[1]))


def source_index(style, t, length):
    return min(max(round_half_up(style.speed * t), 0), length - 1)


def compose_warp(style, stab, framing, t):
    """
    Mapping from output pixel coordinates at output frame t to target pixel
    coordinates in target frame round(speed * t).
    """
    if not 0 <= t < len(style):
        raise FrameIndexError(f"Frame {t} is outside shot {style.index}")
    target_t = source_index(style, t, len(stab))
    style_t = source_index(style, t, len(style.track))
    return stab[target_t] @ framing.h_start @ style.track.cumulative[style_t]


def warp_frame(src, w_matrix, out_size):
    pixels, _ = warp_pixels(src.pixels, w_matrix.m, out_size)
    return Frame(pixels, src.index)


def apply_brightness(frame, target_mean):
    """Scale all channels so the mean luma moves to `target_mean`."""
    gain = target_mean / max(mean_luma(frame), 1.0)
    pixels = np.clip(np.rint(frame.pixels * gain), 0, 255).astype(np.uint8)
    return Frame(pixels, frame.index)


def render_shot(style, target, target_track, framing):
    stab = stabilize_track(target_track)
    out_size = (style.width, style.height)
    frames = []
    for t in range(len(style)):
        w_matrix = compose_warp(style, stab, framing, t)
        source = target[source_index(style, t, len(target))]
        frame = warp_frame(source, w_matrix, out_size)
        frames.append(apply_brightness(frame, style.brightness[t]).with_index(t))
    logger.info(
        f"Rendered shot {style.index} from '{target.source_id}' "
        f"at scale {framing.scale:.3f}"
    )
    return RenderedShot(
        tuple(frames), style.index, target.source_id, framing, style.speed
    )


def window_footprints(style, framing):
    """Output window corners in target start-frame coordinates, per frame."""
    corners = frame_corners(style.width, style.height)
    return [
        (framing.h_start @ cumulative).apply(corners)
        for cumulative in style.track.cumulative
    ]
