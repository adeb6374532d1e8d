"""
Camera motion tracks: frame-to-frame homographies with foreground
rejection, their accumulation into start-frame coordinates and mosaics.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Tuple

import numpy as np
from django.conf import settings

from .constants import KEYFRAME_OVERLAP, MOTION_FAILURE_RATIO
from .exceptions import ConfigurationError, GeometryError, MosaicTooLargeError
from .media import Frame, luma
from .utils import load_json
from .vision import (
    Homography,
    align_homography,
    describe,
    estimate_homography_ransac,
    fast_detect,
)
from .vision import match as match_descriptors
from .vision.alignment import corner_shift
from .vision.keypoints import keypoint_array
from .vision.warping import warp_pixels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float
    label: str = ""

    def contains(self, px, py):
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h

    @property
    def area(self):
        return self.w * self.h

    @property
    def center(self):
        return self.x + self.w / 2, self.y + self.h / 2

    def to_dict(self):
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h, "label": self.label}

    @classmethod
    def from_dict(cls, data):
        return cls(
            float(data["x"]),
            float(data["y"]),
            float(data["w"]),
            float(data["h"]),
            str(data.get("label", "")),
        )


@dataclass(frozen=True)
class ForegroundAnnotation:
    frame: int
    boxes: Tuple[Box, ...] = ()

    def contains(self, px, py):
        return any(box.contains(px, py) for box in self.boxes)

    def within(self, width, height):
        return all(
            box.x >= 0
            and box.y >= 0
            and box.w >= 0
            and box.h >= 0
            and box.x + box.w <= width
            and box.y + box.h <= height
            for box in self.boxes
        )

    def to_dict(self):
        return {"frame": self.frame, "boxes": [box.to_dict() for box in self.boxes]}

    @classmethod
    def from_dict(cls, data):
        return cls(
            int(data["frame"]),
            tuple(Box.from_dict(box) for box in data.get("boxes", [])),
        )


def read_annotations(path):
    """Load a foreground sidecar: [{frame, boxes: [{x, y, w, h, label}]}]."""
    try:
        data = load_json(path)
        annotations = [ForegroundAnnotation.from_dict(item) for item in data]
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ConfigurationError(f"Invalid annotation sidecar {path}: {e}")
    return sorted(annotations, key=lambda annotation: annotation.frame)


def check_annotations(annotations, width, height, path=None):
    """Reject sidecars whose boxes leave the width x height frame."""
    for annotation in annotations:
        if not annotation.within(width, height):
            raise ConfigurationError(
                f"Annotation sidecar {path}: a box on frame {annotation.frame} "
                f"lies outside the {width}x{height} frame"
            )


def annotation_path(annotations_dir, source_id):
    if annotations_dir is None:
        return None
    path = Path(annotations_dir) / f"{source_id}.json"
    return path if path.is_file() else None


def shift_annotations(annotations, start, end):
    """Annotations of frames [start, end), renumbered to start at 0."""
    return [
        replace(annotation, frame=annotation.frame - start)
        for annotation in annotations or []
        if start <= annotation.frame < end
    ]


def mark_foreground(points, annotation):
    if annotation is None or not annotation.boxes:
        return list(points)
    return [
        replace(point, is_foreground=annotation.contains(point.x, point.y))
        for point in points
    ]


def foreground_mask(annotation, width, height):
    """Pixels covered by any box of `annotation`."""
    mask = np.zeros((height, width), dtype=bool)
    for box in annotation.boxes if annotation else ():
        x0, y0 = max(int(math.floor(box.x)), 0), max(int(math.floor(box.y)), 0)
        x1 = min(int(math.ceil(box.x + box.w)), width)
        y1 = min(int(math.ceil(box.y + box.h)), height)
        mask[y0:y1, x0:x1] = True
    return mask


@dataclass(frozen=True)
class MotionParams:
    fast_threshold: int = 20
    max_keypoints: int = 500
    match_ratio: float = 0.8
    inlier_px: float = 1.5
    max_iters: int = 1000
    confidence: float = 0.99
    stride: int = 1
    refine: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.stride < 1:
            raise ConfigurationError("Motion stride must be at least 1")
        if self.inlier_px <= 0:
            raise ConfigurationError("RANSAC inlier_px must be positive")

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            "fast_threshold": settings.EDIT_TRANSFER_FAST_THRESHOLD,
            "max_keypoints": settings.EDIT_TRANSFER_MAX_KEYPOINTS,
            "match_ratio": settings.EDIT_TRANSFER_MATCH_RATIO,
            "inlier_px": settings.EDIT_TRANSFER_RANSAC_INLIER_PX,
            "max_iters": settings.EDIT_TRANSFER_RANSAC_MAX_ITERS,
            "confidence": settings.EDIT_TRANSFER_RANSAC_CONFIDENCE,
            "stride": settings.EDIT_TRANSFER_MOTION_STRIDE,
            "refine": settings.EDIT_TRANSFER_MOTION_REFINE,
        }
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True, eq=False)
class HomographyTrack:
    """
    Camera motion of one shot.

    step[t] maps frame t-1 pixel coordinates to frame t (step[0] is the
    identity) and cumulative[t] maps frame t into start-frame coordinates.
    `fallback[t]` is set when step t could not be estimated and was replaced
    by the identity. `inliers[t]` holds the frame-t positions of the step's
    RANSAC inliers.
    """

    step: Tuple[Homography, ...]
    cumulative: Tuple[Homography, ...]
    start_index: int = 0
    fallback: Tuple[bool, ...] = ()
    estimated: Tuple[bool, ...] = ()
    inliers: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if len(self.step) != len(self.cumulative):
            raise ValueError("Track step and cumulative lengths differ")
        n = len(self.step)
        object.__setattr__(self, "fallback", tuple(self.fallback) or (False,) * n)
        object.__setattr__(self, "estimated", tuple(self.estimated) or (False,) * n)

    def __len__(self):
        return len(self.step)

    @classmethod
    def from_steps(cls, steps, start_index=0, **kwargs):
        steps = tuple(steps)
        return cls(steps, tuple(accumulate(steps)), start_index, **kwargs)

    @classmethod
    def static(cls, length, start_index=0):
        return cls.from_steps([Homography.identity()] * length, start_index)

    @property
    def flagged_frames(self):
        return [t for t, flag in enumerate(self.fallback) if flag]

    @property
    def failed(self):
        attempted = sum(self.estimated)
        if attempted == 0:
            return False
        return sum(self.fallback) / attempted > MOTION_FAILURE_RATIO

    def to_dict(self):
        return {
            "start_index": self.start_index,
            "step": [h.to_list() for h in self.step],
            "fallback": list(self.fallback),
            "estimated": list(self.estimated),
        }

    @classmethod
    def from_dict(cls, data):
        return cls.from_steps(
            [Homography.from_list(m) for m in data["step"]],
            int(data.get("start_index", 0)),
            fallback=tuple(bool(v) for v in data.get("fallback", ())),
            estimated=tuple(bool(v) for v in data.get("estimated", ())),
        )


def accumulate(steps):
    """
    Prefix-compose frame-to-frame steps into start-frame mappings:
    cumulative[t] = cumulative[t - 1] @ step[t]^-1.
    """
    steps = list(steps)
    if not steps:
        return []
    if not steps[0].is_identity():
        raise ValueError("The first step of a track must be the identity")
    cumulative = [Homography.identity()]
    for step in steps[1:]:
        cumulative.append(cumulative[-1] @ step.inverse())
    return cumulative


def _frame_features(frame, annotation, params):
    image = luma(frame)
    points = fast_detect(image, params.fast_threshold, params.max_keypoints)
    points = [p for p in mark_foreground(points, annotation) if not p.is_foreground]
    return describe(image, points)


def _estimate_step(previous, current, params, seed):
    matches = match_descriptors(previous, current, params.match_ratio)
    src = keypoint_array([previous.keypoints[i] for i in matches.indices_a])
    dst = keypoint_array([current.keypoints[j] for j in matches.indices_b])
    homography, mask = estimate_homography_ransac(
        src,
        dst,
        inlier_px=params.inlier_px,
        max_iters=params.max_iters,
        seed=seed,
        confidence=params.confidence,
    )
    return homography, dst[mask]


def _refine_step(frames, by_frame, placed, previous, t, step, reference, params):
    """
    Re-estimate step t on pixel intensities against the keyframe.

    Returns the step to keep and the keyframe for the next step. The
    feature estimate is kept, and frame t becomes the keyframe, when the
    alignment fails or disagrees with it by more than twice the inlier
    threshold at a frame corner.
    """
    key, current = frames[reference], frames[t]
    guess = placed[previous] @ step.inverse()
    try:
        alignment = align_homography(
            luma(key),
            luma(current),
            placed[reference].inverse() @ guess,
            reference_mask=foreground_mask(by_frame.get(reference), *key.size),
            image_mask=foreground_mask(by_frame.get(t), *current.size),
        )
        refined = (placed[reference] @ alignment.homography).inverse()
        refined = refined @ placed[previous]
    except GeometryError as e:
        logger.debug(f"Motion step {t} kept its keypoint estimate: {e}")
        return step, t
    disagreement = corner_shift(
        (refined @ step.inverse()).m, current.width, current.height
    )
    if disagreement > 2 * params.inlier_px:
        logger.debug(
            f"Motion step {t} kept its keypoint estimate, alignment moved a "
            f"corner by {disagreement:.2f} px"
        )
        return step, t
    if alignment.overlap < KEYFRAME_OVERLAP:
        reference = t
    return refined, reference


def track_camera(frames, fg=None, params=None):
    """
    Estimate the camera motion of a shot.

    Keypoints inside the foreground boxes of `fg` (annotations indexed
    relative to the first frame of `frames`) are discarded before matching.
    Each keypoint step is then refined by aligning the frame's background
    pixels with the current keyframe, so errors do not pile up from step to
    step. A step that cannot be estimated falls back to the identity and is
    flagged; the track is marked failed when most steps fell back.
    """
    params = params or MotionParams.from_settings()
    frames = list(frames)
    if not frames:
        raise ValueError("Cannot track an empty shot")
    by_frame = {annotation.frame: annotation for annotation in fg or []}

    n = len(frames)
    steps = [Homography.identity()] * n
    fallback = [False] * n
    estimated = [False] * n
    inliers = [np.zeros((0, 2))] * n
    cache = {}
    # start-frame mapping of every estimated frame
    placed = {0: Homography.identity()}
    reference = 0

    def features(t):
        if t not in cache:
            cache[t] = _frame_features(frames[t], by_frame.get(t), params)
        return cache[t]

    for t in range(params.stride, n, params.stride):
        previous = t - params.stride
        estimated[t] = True
        try:
            step, points = _estimate_step(
                features(previous), features(t), params, params.seed + t
            )
        except GeometryError as e:
            logger.warning(f"Motion step {t} fell back to identity: {e}")
            fallback[t] = True
            placed[t] = placed[previous]
            reference = t
            continue
        if params.refine:
            step, reference = _refine_step(
                frames, by_frame, placed, previous, t, step, reference, params
            )
        placed[t] = placed[previous] @ step.inverse()
        steps[t] = step
        inliers[t] = points
        cache.pop(previous, None)

    track = HomographyTrack.from_steps(
        steps,
        frames[0].index,
        fallback=tuple(fallback),
        estimated=tuple(estimated),
        inliers=tuple(inliers),
    )
    if track.failed:
        logger.warning(
            f"Motion tracking failed for {sum(fallback)} of {sum(estimated)} steps"
        )
    return track


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def center(self):
        return (self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2

    def to_list(self):
        return [self.x0, self.y0, self.x1, self.y1]


def frame_corners(w, h):
    return np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)


def mosaic_bounds(track, w, h):
    """Bounding rectangle, in start-frame coordinates, of every frame's corners."""
    corners = np.vstack([c.apply(frame_corners(w, h)) for c in track.cumulative])
    x0, y0 = corners.min(axis=0)
    x1, y1 = corners.max(axis=0)
    return Rect(float(x0), float(y0), float(x1), float(y1))


def render_mosaic(frames, track, max_area=None):
    """
    Composite every frame of a shot into start-frame coordinates.

    Earlier frames win where frames overlap.
    """
    frames = list(frames)
    if max_area is None:
        max_area = settings.EDIT_TRANSFER_MOSAIC_MAX_AREA
    height, width = frames[0].height, frames[0].width
    bounds = mosaic_bounds(track, width, height)
    canvas_w = max(1, int(math.ceil(bounds.width - 1e-6)))
    canvas_h = max(1, int(math.ceil(bounds.height - 1e-6)))
    if canvas_w * canvas_h > max_area:
        raise MosaicTooLargeError(
            f"Mosaic of {canvas_w}x{canvas_h} exceeds the {max_area} pixel limit"
        )

    canvas = np.zeros((canvas_h, canvas_w, 3), dtype=np.uint8)
    written = np.zeros((canvas_h, canvas_w), dtype=bool)
    origin = Homography.translation(bounds.x0, bounds.y0)
    for frame, cumulative in zip(frames, track.cumulative):
        pixels, valid = warp_pixels(
            frame.pixels, (cumulative.inverse() @ origin).m, (canvas_w, canvas_h)
        )
        fresh = valid & ~written
        canvas[fresh] = pixels[fresh]
        written |= fresh
    return Frame(canvas)
