"""
Shot boundary detection and scene grouping.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np
from django.conf import settings
from scipy.sparse import lil_matrix
from scipy.sparse.csgraph import connected_components

from .constants import HISTOGRAM_BINS, Transition
from .exceptions import ConfigurationError, GeometryError
from .media import luma, mean_luma
from .utils import even_sample_indices
from .vision import describe, estimate_fundamental_ransac, fast_detect, match
from .vision.keypoints import keypoint_array

logger = logging.getLogger(__name__)

REPRESENTATIVE_FRAMES = 3


@dataclass(frozen=True, eq=False)
class Histogram:
    """Normalized 8x8x8 RGB histogram; bin (r, g, b) lives at r * 64 + g * 8 + b."""

    bins: np.ndarray

    def __getitem__(self, rgb_bin):
        r, g, b = rgb_bin
        return float(self.bins[r * 64 + g * 8 + b])


@dataclass(frozen=True)
class Shot:
    start: int
    end: int
    transition_in: str = Transition.HARD_CUT
    scene_id: int = 0

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(
                f"Shot must have start < end, got [{self.start}, {self.end})"
            )

    def __len__(self):
        return self.end - self.start

    @property
    def middle(self):
        return self.start + (len(self) - 1) // 2

    def to_dict(self):
        return {
            "start": self.start,
            "end": self.end,
            "transition_in": str(self.transition_in),
            "scene_id": self.scene_id,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            start=int(data["start"]),
            end=int(data["end"]),
            transition_in=Transition(data.get("transition_in", Transition.HARD_CUT)),
            scene_id=int(data.get("scene_id", 0)),
        )


@dataclass(frozen=True)
class ShotDetectParams:
    cut_threshold: float = 0.5
    fade_window: int = 12
    fade_threshold: float = 0.4
    min_shot_len: int = 8
    scene_match_threshold: int = 15
    fast_threshold: int = 20
    max_keypoints: int = 500
    match_ratio: float = 0.8
    fundamental_inlier_px: float = 2.0
    ransac_max_iters: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.fade_threshold <= self.cut_threshold <= 1:
            raise ConfigurationError(
                "Shot detection needs 0 < fade_threshold <= cut_threshold <= 1, "
                f"got fade_threshold={self.fade_threshold}, "
                f"cut_threshold={self.cut_threshold}"
            )
        if self.min_shot_len < 1:
            raise ConfigurationError("min_shot_len must be at least 1")
        if self.fade_window < 1:
            raise ConfigurationError("fade_window must be at least 1")

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            "cut_threshold": settings.EDIT_TRANSFER_CUT_THRESHOLD,
            "fade_window": settings.EDIT_TRANSFER_FADE_WINDOW,
            "fade_threshold": settings.EDIT_TRANSFER_FADE_THRESHOLD,
            "min_shot_len": settings.EDIT_TRANSFER_MIN_SHOT_LEN,
            "scene_match_threshold": settings.EDIT_TRANSFER_SCENE_MATCH_THRESHOLD,
            "fast_threshold": settings.EDIT_TRANSFER_FAST_THRESHOLD,
            "max_keypoints": settings.EDIT_TRANSFER_MAX_KEYPOINTS,
            "match_ratio": settings.EDIT_TRANSFER_MATCH_RATIO,
            "fundamental_inlier_px": settings.EDIT_TRANSFER_FUNDAMENTAL_INLIER_PX,
            "ransac_max_iters": settings.EDIT_TRANSFER_RANSAC_MAX_ITERS,
        }
        values.update(overrides)
        return cls(**values)


def color_histogram(frame):
    pixels = frame.pixels >> 5
    index = (
        pixels[..., 0].astype(np.int64) * 64
        + pixels[..., 1].astype(np.int64) * 8
        + pixels[..., 2].astype(np.int64)
    )
    counts = np.bincount(index.ravel(), minlength=HISTOGRAM_BINS)
    return Histogram(counts / counts.sum())


def hist_distance(a, b):
    """One minus histogram intersection, in [0, 1]."""
    intersection = np.minimum(a.bins, b.bins).sum()
    return float(min(1.0, max(0.0, 1.0 - intersection)))


def _is_luma_extremum(means, k, window):
    lo = max(0, k - window)
    hi = min(len(means), k + window + 1)
    neighbourhood = means[lo:hi]
    if means[k] == neighbourhood.min():
        return int(np.argmin(neighbourhood)) + lo == k and means[k - 1] > means[k]
    if means[k] == neighbourhood.max():
        return int(np.argmax(neighbourhood)) + lo == k and means[k - 1] < means[k]
    return False


def _is_gradual(histograms, steps, k, params):
    """Either side of frame k changes steadily by more than the fade threshold."""
    window = params.fade_window
    n = len(histograms)
    sides = []
    if k - window >= 0:
        sides.append((k - window, k))
    if k + window < n:
        sides.append((k, k + window))
    for lo, hi in sides:
        if hist_distance(histograms[lo], histograms[hi]) <= params.fade_threshold:
            continue
        if all(steps[t] <= params.cut_threshold for t in range(lo + 1, hi + 1)):
            return True
    return False


def detect_shots(seq, params=None):
    """
    Split a sequence into shots that tile it.

    A hard cut is placed where consecutive histograms differ by more than
    the cut threshold. A fade is placed at a frame whose mean luma is the
    first extremum of its fade window and whose neighbourhood drifts past
    the fade threshold without any single-step cut. Boundaries closer than
    `min_shot_len` to the previously kept one are dropped.
    """
    params = params or ShotDetectParams.from_settings()
    n = len(seq)
    if n == 0:
        raise ValueError("Cannot detect shots in an empty sequence")

    histograms = [color_histogram(frame) for frame in seq]
    means = np.array([mean_luma(frame) for frame in seq])
    steps = [0.0] + [
        hist_distance(histograms[t - 1], histograms[t]) for t in range(1, n)
    ]

    boundaries = {}
    for t in range(1, n):
        if steps[t] > params.cut_threshold:
            boundaries[t] = Transition.HARD_CUT
        elif _is_luma_extremum(means, t, params.fade_window) and _is_gradual(
            histograms, steps, t, params
        ):
            boundaries[t] = Transition.FADE

    kept = []
    previous = 0
    for t in sorted(boundaries):
        if t - previous < params.min_shot_len:
            logger.debug(f"Suppressed {boundaries[t]} at frame {t}")
            continue
        kept.append(t)
        previous = t

    starts = [0] + kept
    ends = kept + [n]
    shots = [
        Shot(start, end, boundaries.get(start, Transition.HARD_CUT))
        for start, end in zip(starts, ends)
    ]
    logger.info(
        f"Detected {len(shots)} shots in '{seq.source_id}' "
        f"({sum(s.transition_in == Transition.FADE for s in shots)} after fades)"
    )
    return shots


def _representative_features(seq, shot, params):
    features = []
    for index in even_sample_indices(shot.start, shot.end, REPRESENTATIVE_FRAMES):
        image = luma(seq[index])
        points = fast_detect(image, params.fast_threshold, params.max_keypoints)
        features.append(describe(image, points))
    return features


def _verified_matches(a, b, params):
    matches = match(a, b, params.match_ratio)
    if len(matches) < params.scene_match_threshold:
        return 0
    src = keypoint_array([a.keypoints[i] for i in matches.indices_a])
    dst = keypoint_array([b.keypoints[j] for j in matches.indices_b])
    try:
        _, mask = estimate_fundamental_ransac(
            src,
            dst,
            inlier_px=params.fundamental_inlier_px,
            max_iters=params.ransac_max_iters,
            seed=params.seed,
        )
    except GeometryError:
        return 0
    return int(mask.sum())


def _linked(features_a, features_b, params):
    for a in features_a:
        for b in features_b:
            if _verified_matches(a, b, params) >= params.scene_match_threshold:
                return True
    return False


def group_scenes(seq, shots, params=None):
    """
    Assign scene ids: shots whose representative frames share enough
    geometrically consistent keypoint matches belong to one scene.
    """
    params = params or ShotDetectParams.from_settings()
    if not shots:
        return []

    features = [_representative_features(seq, shot, params) for shot in shots]
    graph = lil_matrix((len(shots), len(shots)), dtype=np.int8)
    for i in range(len(shots)):
        for j in range(i + 1, len(shots)):
            if _linked(features[i], features[j], params):
                logger.debug(f"Shots {i} and {j} show the same scene")
                graph[i, j] = 1
    _, labels = connected_components(graph.tocsr(), directed=False)

    renumbered = {}
    for label in labels:
        renumbered.setdefault(int(label), len(renumbered))
    return [
        replace(shot, scene_id=renumbered[int(label)])
        for shot, label in zip(shots, labels)
    ]
