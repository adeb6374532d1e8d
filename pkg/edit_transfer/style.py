"""
Per-shot style records: content category, brightness curve, playback speed
and camera motion.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Tuple

from django.conf import settings

from .constants import ContentCategory, Transition
from .exceptions import InvalidSpeedError
from .media import mean_luma
from .motion import ForegroundAnnotation, HomographyTrack
from .shots import Shot
from .utils import even_sample_indices

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContentLabel:
    category: str = ContentCategory.BACKGROUND
    object_counts: Dict[str, float] = field(default_factory=dict)

    def to_dict(self):
        return {
            "category": str(self.category),
            "object_counts": dict(sorted(self.object_counts.items())),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            ContentCategory(data["category"]),
            {str(k): float(v) for k, v in data.get("object_counts", {}).items()},
        )


def categorize(salient_count, single_focus_min=None, multi_subject_min=None):
    if single_focus_min is None:
        single_focus_min = settings.EDIT_TRANSFER_SINGLE_FOCUS_MIN
    if multi_subject_min is None:
        multi_subject_min = settings.EDIT_TRANSFER_MULTI_SUBJECT_MIN
    if salient_count < single_focus_min:
        return ContentCategory.BACKGROUND
    if salient_count <= multi_subject_min:
        return ContentCategory.SINGLE_FOCUS
    return ContentCategory.MULTI_SUBJECT


def label_scene(annotations, salient_labels=None):
    """
    Label a shot from annotation samples by its mean salient-object count.

    `object_counts` holds the mean count of every label seen; the category
    only looks at the salient ones.
    """
    if salient_labels is None:
        salient_labels = settings.EDIT_TRANSFER_SALIENT_LABELS
    salient_labels = set(salient_labels)
    annotations = list(annotations)
    if not annotations:
        return ContentLabel(ContentCategory.BACKGROUND, {})

    totals = Counter()
    for annotation in annotations:
        totals.update(box.label for box in annotation.boxes)
    counts = {label: total / len(annotations) for label, total in totals.items()}
    salient = sum(count for label, count in counts.items() if label in salient_labels)
    return ContentLabel(categorize(salient), counts)


def sample_annotations(annotations, start, end, count=None):
    """
    Annotations of `count` evenly spaced frames of [start, end).

    Frames without an annotation are sampled as empty.
    """
    if count is None:
        count = settings.EDIT_TRANSFER_LABEL_SAMPLES
    by_frame = {annotation.frame: annotation for annotation in annotations or []}
    return [
        by_frame.get(index, ForegroundAnnotation(index))
        for index in even_sample_indices(start, end, count)
    ]


def brightness_curve(frames):
    return [mean_luma(frame) for frame in frames]


def _parse_speed(key, value):
    try:
        speed = float(value)
    except (TypeError, ValueError):
        raise InvalidSpeedError(f"Speed for shot {key} is not a number: {value!r}")
    if not math.isfinite(speed) or speed <= 0:
        raise InvalidSpeedError(f"Speed for shot {key} must be positive, got {value}")
    return speed


def validate_speed_map(speeds):
    """Normalize a {shot_index: factor} map; JSON string keys are accepted."""
    validated = {}
    for key, value in (speeds or {}).items():
        try:
            index = int(key)
        except (TypeError, ValueError):
            raise InvalidSpeedError(f"Speed map key {key!r} is not a shot index")
        validated[index] = _parse_speed(key, value)
    return validated


@dataclass(frozen=True, eq=False)
class ShotStyle:
    index: int
    shot: Shot
    track: HomographyTrack
    label: ContentLabel
    speed: float
    brightness: Tuple[float, ...]
    transition_in: str
    width: int
    height: int

    def __post_init__(self):
        if self.speed <= 0:
            raise InvalidSpeedError(f"Shot {self.index} speed must be positive")
        if len(self.brightness) != len(self.shot):
            raise ValueError(
                f"Shot {self.index} has {len(self.shot)} frames but "
                f"{len(self.brightness)} brightness values"
            )

    def __len__(self):
        return len(self.shot)

    @property
    def aspect(self):
        return self.width / self.height

    @property
    def category(self):
        return self.label.category

    def to_dict(self):
        return {
            "index": self.index,
            "shot": self.shot.to_dict(),
            "track": self.track.to_dict(),
            "label": self.label.to_dict(),
            "speed": self.speed,
            "brightness": [round(value, 6) for value in self.brightness],
            "transition_in": str(self.transition_in),
            "width": self.width,
            "height": self.height,
            "aspect": self.aspect,
            "motion_failed": self.track.failed,
            "flagged_frames": self.track.flagged_frames,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            index=int(data["index"]),
            shot=Shot.from_dict(data["shot"]),
            track=HomographyTrack.from_dict(data["track"]),
            label=ContentLabel.from_dict(data["label"]),
            speed=float(data["speed"]),
            brightness=tuple(float(v) for v in data["brightness"]),
            transition_in=Transition(data["transition_in"]),
            width=int(data["width"]),
            height=int(data["height"]),
        )


def assemble_style(shot, track, label, curve, speeds=None, *, width, height, index=0):
    """Combine the extracted attributes of shot `index` into its ShotStyle."""
    speed = validate_speed_map(speeds).get(index, 1.0)
    style = ShotStyle(
        index=index,
        shot=shot,
        track=track,
        label=label,
        speed=speed,
        brightness=tuple(float(value) for value in curve),
        transition_in=shot.transition_in,
        width=int(width),
        height=int(height),
    )
    logger.debug(f"Shot {index}: {len(shot)} frames, {label.category}, speed {speed}")
    return style
