"""
Raw footage repository index and footage selection for shot styles.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional

from django.conf import settings

from .exceptions import DuplicateClipError, NoMatchingFootageError
from .motion import Box
from .style import ContentLabel, label_scene, sample_annotations
from .utils import ceil_frames, cosine_similarity

logger = logging.getLogger(__name__)


@dataclass
class RepoClip:
    source_id: str
    duration: int
    frame_rate: Fraction
    width: int
    height: int
    label: ContentLabel
    used: int = 0
    content_box: Optional[Box] = None
    path: str = ""

    def __post_init__(self):
        if self.duration < 1:
            raise ValueError(f"Clip '{self.source_id}' has no frames")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"Clip '{self.source_id}' has an invalid frame size")
        self.frame_rate = Fraction(self.frame_rate)

    @property
    def aspect(self):
        return self.width / self.height

    @property
    def object_counts(self):
        return self.label.object_counts

    @property
    def category(self):
        return self.label.category

    def to_dict(self):
        return {
            "source_id": self.source_id,
            "path": self.path,
            "duration": self.duration,
            "fps_num": self.frame_rate.numerator,
            "fps_den": self.frame_rate.denominator,
            "width": self.width,
            "height": self.height,
            "aspect": self.aspect,
            "label": self.label.to_dict(),
            "content_box": self.content_box.to_dict() if self.content_box else None,
        }

    @classmethod
    def from_dict(cls, data):
        content_box = data.get("content_box")
        return cls(
            source_id=data["source_id"],
            duration=int(data["duration"]),
            frame_rate=Fraction(int(data["fps_num"]), int(data["fps_den"])),
            width=int(data["width"]),
            height=int(data["height"]),
            label=ContentLabel.from_dict(data["label"]),
            content_box=Box.from_dict(content_box) if content_box else None,
            path=data.get("path", ""),
        )


@dataclass
class RepoIndex:
    clips: List[RepoClip] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for clip in self.clips:
            if clip.source_id in seen:
                raise DuplicateClipError(
                    f"Clip id '{clip.source_id}' appears more than once"
                )
            seen.add(clip.source_id)

    def __len__(self):
        return len(self.clips)

    def __iter__(self):
        return iter(self.clips)

    def get(self, source_id):
        for clip in self.clips:
            if clip.source_id == source_id:
                return clip
        raise KeyError(source_id)

    @property
    def used_counts(self) -> Dict[str, int]:
        return {clip.source_id: clip.used for clip in self.clips}

    def to_dict(self):
        return {"clips": [clip.to_dict() for clip in self.clips]}

    @classmethod
    def from_dict(cls, data):
        return cls([RepoClip.from_dict(clip) for clip in data.get("clips", [])])


def largest_salient_box(annotations, frame=0, salient_labels=None):
    if salient_labels is None:
        salient_labels = settings.EDIT_TRANSFER_SALIENT_LABELS
    boxes = [
        box
        for annotation in annotations or []
        if annotation.frame == frame
        for box in annotation.boxes
        if box.label in salient_labels
    ]
    if not boxes:
        return None
    return max(boxes, key=lambda box: box.area)


def index_repository(clips, salient_labels=None):
    """
    Build the repository index from (FrameSequence, annotations) pairs.

    A missing annotation list labels the clip as background footage.
    """
    entries = []
    for seq, annotations in clips:
        label = label_scene(
            sample_annotations(annotations, 0, len(seq)), salient_labels
        )
        entries.append(
            RepoClip(
                source_id=seq.source_id,
                duration=len(seq),
                frame_rate=seq.frame_rate,
                width=seq.width,
                height=seq.height,
                label=label,
                content_box=largest_salient_box(
                    annotations, salient_labels=salient_labels
                ),
            )
        )
        logger.debug(f"Indexed '{seq.source_id}': {len(seq)} frames, {label.category}")
    return RepoIndex(entries)


class FootageSelection(NamedTuple):
    source_id: str
    offset: int = 0
    category_waived: bool = False


def required_duration(style):
    """Raw frames consumed by a shot played back at its speed."""
    return ceil_frames(len(style) * style.speed)


def aspect_matches(clip, style, tolerance=None):
    if tolerance is None:
        tolerance = settings.EDIT_TRANSFER_ASPECT_TOLERANCE
    return abs(clip.aspect - style.aspect) <= tolerance * style.aspect


def _no_match(style, index, tolerance):
    by_aspect = [clip for clip in index if aspect_matches(clip, style, tolerance)]
    if not by_aspect:
        nearest = min(
            index,
            key=lambda clip: (abs(clip.aspect - style.aspect), clip.source_id),
        )
        message = (
            f"no clip has aspect {style.aspect:.4f} within "
            f"{tolerance:.0%}; nearest is '{nearest.source_id}' "
            f"with aspect {nearest.aspect:.4f}"
        )
        return NoMatchingFootageError(message, "aspect", nearest.source_id)
    needed = required_duration(style)
    nearest = max(by_aspect, key=lambda clip: (clip.duration, clip.source_id))
    message = (
        f"no clip has the {needed} frames needed at speed {style.speed}; "
        f"nearest is '{nearest.source_id}' with {nearest.duration} frames"
    )
    return NoMatchingFootageError(message, "duration", nearest.source_id)


def select_footage(style, index, aspect_tolerance=None):
    """
    Choose the target clip for a shot style.

    Clips must match the style's aspect ratio and hold enough raw frames for
    the shot at its playback speed. Among those, clips sharing the style's
    content category are preferred when any exists; the rest are ranked by
    object-count cosine similarity, then by fewest uses, then by id. The
    chosen clip's use count is incremented.
    """
    if aspect_tolerance is None:
        aspect_tolerance = settings.EDIT_TRANSFER_ASPECT_TOLERANCE
    if len(index) == 0:
        raise NoMatchingFootageError("the repository index is empty")

    needed = required_duration(style)
    eligible = [
        clip
        for clip in index
        if aspect_matches(clip, style, aspect_tolerance) and clip.duration >= needed
    ]
    if not eligible:
        raise _no_match(style, index, aspect_tolerance)

    same_category = [clip for clip in eligible if clip.category == style.category]
    waived = not same_category
    if waived:
        logger.warning(
            f"Shot {style.index}: no {style.category} footage, "
            "content category filter waived"
        )
    candidates = same_category or eligible

    def rank(clip):
        similarity = cosine_similarity(style.label.object_counts, clip.object_counts)
        return (-similarity, clip.used, clip.source_id)

    chosen = min(candidates, key=rank)
    chosen.used += 1
    logger.info(f"Shot {style.index} -> '{chosen.source_id}' (use {chosen.used})")
    return FootageSelection(chosen.source_id, 0, waived)
