"""
The analyze, index, transfer and review stages. Each stage reads its inputs
from the project configuration and the output directory and persists its
results there as JSON, PNG and Y4M files.
"""
import logging
from dataclasses import dataclass, field
from functools import wraps
from pathlib import Path
from typing import List

from filelock import FileLock, Timeout

from .constants import (
    INDEX_FILENAME,
    LOCK_FILENAME,
    OUTPUT_FILENAME,
    PLAN_FILENAME,
    REVIEW_PDF_FILENAME,
    SHOTS_FILENAME,
    SIDE_BY_SIDE_FILENAME,
    STYLES_FILENAME,
    TIMELINE_FILENAME,
    ContentCategory,
)
from .exceptions import (
    ConfigurationError,
    EditTransferBaseException,
    NoMatchingFootageError,
    PipelineError,
)
from .exporters import (
    ReviewExporter,
    TimelineExporter,
    framing_panel,
    keypoint_panel,
    side_by_side,
)
from .media import FrameSequence, is_sequence_path, load_sequence, luma, save_y4m
from .media.frame_dir import write_png
from .motion import (
    annotation_path,
    check_annotations,
    mark_foreground,
    read_annotations,
    render_mosaic,
    shift_annotations,
    track_camera,
)
from .retrieval import RepoIndex, index_repository, select_footage
from .shots import detect_shots, group_scenes
from .style import (
    ShotStyle,
    assemble_style,
    brightness_curve,
    label_scene,
    sample_annotations,
    validate_speed_map,
)
from .transfer import (
    FramingSolution,
    render_shot,
    solve_framing,
    window_footprints,
)
from .utils import dump_json, load_json, round_half_up
from .vision import fast_detect

logger = logging.getLogger(__name__)

MOSAICS_DIR = "mosaics"
REVIEW_DIR = "review"
SHOT_IMAGE = "shot_{:03d}.png"
TIMELINE_CSV_FILENAME = "timeline.csv"

FLAG_MOTION_FAILED = "motion_failed"
FLAG_MOTION_FALLBACK = "motion_fallback"
FLAG_TARGET_MOTION_FAILED = "target_motion_failed"
FLAG_CATEGORY_WAIVED = "category_waived"


@dataclass
class EditPlan:
    fingerprint: str
    source_id: str
    frame_rate: str
    records: List[dict] = field(default_factory=list)

    def to_dict(self):
        return {
            "fingerprint": self.fingerprint,
            "source_id": self.source_id,
            "frame_rate": self.frame_rate,
            "records": self.records,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["fingerprint"], data["source_id"], data["frame_rate"], data["records"]
        )


def pipeline_stage(stage):
    """
    Run a stage under the output directory's advisory lock. Library errors
    escaping the stage are reported as pipeline errors naming the stage.
    """

    def decorator(f):
        @wraps(f)
        def wrapper(config, *args, **kwargs):
            output_dir = Path(config.output_dir)
            output_dir.mkdir(parents=True, exist_ok=True)
            lock = FileLock(str(output_dir / LOCK_FILENAME), timeout=0)
            try:
                lock.acquire()
            except Timeout:
                raise PipelineError(
                    stage, output_dir, "another command is using this output directory"
                )
            logger.info(f"Stage {stage} started ({config.fingerprint[:12]})")
            try:
                result = f(config, *args, **kwargs)
            except (PipelineError, ConfigurationError):
                raise
            except EditTransferBaseException as e:
                logger.error(f"Stage {stage} failed: {e}")
                raise PipelineError(stage, config.source.name, str(e))
            finally:
                lock.release()
            logger.info(f"Stage {stage} completed")
            return result

        return wrapper

    return decorator


def _load(stage, path):
    try:
        seq = load_sequence(path)
    except (EditTransferBaseException, OSError) as e:
        raise PipelineError(stage, Path(path).name, f"cannot decode: {e}")
    if not len(seq):
        raise PipelineError(stage, Path(path).name, "holds no frames")
    return seq


def _annotations(config, seq):
    path = annotation_path(config.annotations_dir, seq.source_id)
    if path is None:
        return []
    annotations = read_annotations(path)
    check_annotations(annotations, seq.width, seq.height, path)
    return annotations


def _speed_map(config):
    if config.speed_map is None:
        return {}
    try:
        return validate_speed_map(load_json(config.speed_map))
    except (OSError, ValueError, AttributeError) as e:
        raise ConfigurationError(f"Invalid speed map {config.speed_map}: {e}")


def _shot_image(directory, index):
    return Path(directory) / SHOT_IMAGE.format(index)


def write_mosaics(seq, styles, directory, max_area):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for style in styles:
        frames = seq.slice(style.shot.start, style.shot.end)
        mosaic = render_mosaic(frames, style.track, max_area)
        path = _shot_image(directory, style.index)
        write_png(mosaic, path)
        paths.append(path)
    return paths


def extract_styles(config, seq, annotations):
    shot_params = config.shot_params()
    shots = group_scenes(seq, detect_shots(seq, shot_params), shot_params)
    speeds = _speed_map(config)
    styles = []
    for index, shot in enumerate(shots):
        frames = seq.slice(shot.start, shot.end)
        track = track_camera(
            frames,
            shift_annotations(annotations, shot.start, shot.end),
            config.motion_params(seed_offset=shot.start),
        )
        label = label_scene(
            sample_annotations(annotations, shot.start, shot.end),
            config.salient_labels,
        )
        styles.append(
            assemble_style(
                shot,
                track,
                label,
                brightness_curve(frames),
                speeds,
                index=index,
                width=seq.width,
                height=seq.height,
            )
        )
    return shots, styles


@pipeline_stage("analyze")
def cmd_analyze(config):
    """Detect shots and extract per-shot styles from the source video."""
    seq = _load("analyze", config.source)
    annotations = _annotations(config, seq)
    shots, styles = extract_styles(config, seq, annotations)

    output_dir = Path(config.output_dir)
    dump_json([shot.to_dict() for shot in shots], output_dir / SHOTS_FILENAME)
    dump_json(
        {
            "source_id": seq.source_id,
            "frames": len(seq),
            "frame_rate": str(seq.frame_rate),
            "styles": [style.to_dict() for style in styles],
        },
        output_dir / STYLES_FILENAME,
    )
    write_mosaics(seq, styles, output_dir / MOSAICS_DIR, config.mosaic_max_area)
    logger.info(f"Analyzed '{seq.source_id}': {len(shots)} shots")
    return styles


def repository_clips(repo_dir):
    return sorted(
        (path for path in Path(repo_dir).iterdir() if is_sequence_path(path)),
        key=lambda path: path.name,
    )


def build_index(config):
    paths = repository_clips(config.repo_dir)
    if not paths:
        raise PipelineError("index", config.repo_dir, "repository holds no clips")
    clips = []
    for path in paths:
        seq = _load("index", path)
        clips.append((seq, _annotations(config, seq)))
    try:
        index = index_repository(clips, config.salient_labels)
    except EditTransferBaseException as e:
        raise PipelineError("index", config.repo_dir, str(e))
    for clip, path in zip(index, paths):
        clip.path = path.name
    return index


@pipeline_stage("index")
def cmd_index(config):
    """Index every clip of the raw footage repository."""
    index = build_index(config)
    dump_json(index.to_dict(), Path(config.output_dir) / INDEX_FILENAME)
    logger.info(f"Indexed {len(index)} clips from {config.repo_dir}")
    return index


def load_styles(config):
    path = Path(config.output_dir) / STYLES_FILENAME
    if not path.is_file():
        seq = _load("transfer", config.source)
        _, styles = extract_styles(config, seq, _annotations(config, seq))
        return seq, styles
    data = load_json(path)
    return None, [ShotStyle.from_dict(item) for item in data["styles"]]


def load_index(config):
    path = Path(config.output_dir) / INDEX_FILENAME
    if not path.is_file():
        return build_index(config)
    return RepoIndex.from_dict(load_json(path))


def _plan_record(style, selection, framing, rendered, target_track):
    flags = []
    if style.track.failed:
        flags.append(FLAG_MOTION_FAILED)
    elif style.track.flagged_frames:
        flags.append(FLAG_MOTION_FALLBACK)
    if target_track.failed:
        flags.append(FLAG_TARGET_MOTION_FAILED)
    if selection.category_waived:
        flags.append(FLAG_CATEGORY_WAIVED)
    brightness = style.brightness
    return {
        "index": style.index,
        "shot": style.shot.to_dict(),
        "style": {
            "category": str(style.category),
            "object_counts": style.label.to_dict()["object_counts"],
            "speed": style.speed,
            "transition_in": str(style.transition_in),
            "mean_brightness": round(sum(brightness) / len(brightness), 6),
            "flagged_frames": style.track.flagged_frames,
        },
        "source_id": selection.source_id,
        "offset": selection.offset,
        "framing": framing.to_dict(),
        "frames": len(rendered),
        "flags": flags,
        "provenance": rendered.provenance,
    }


def _clip_frames(config, index, source_id, needed):
    clip = index.get(source_id)
    seq = _load("transfer", Path(config.repo_dir) / clip.path)
    return clip, seq.slice(0, min(needed, len(seq)))


@pipeline_stage("transfer")
def cmd_transfer(config):
    """Select footage for every source shot and render the output video."""
    source, styles = load_styles(config)
    if source is None:
        source = _load("transfer", config.source)
    index = load_index(config)
    for clip in index:
        clip.used = 0

    plan = EditPlan(config.fingerprint, source.source_id, str(source.frame_rate))
    frames = []
    for style in styles:
        try:
            selection = select_footage(style, index, config.aspect_tolerance)
        except NoMatchingFootageError as e:
            raise PipelineError(
                "transfer",
                f"shot {style.index}",
                f"{e.constraint or 'repository'} constraint failed: {e}",
            )
        last = round_half_up(style.speed * (len(style) - 1))
        clip, target = _clip_frames(config, index, selection.source_id, last + 1)
        target_track = track_camera(
            target,
            _annotations(config, target),
            config.motion_params(seed_offset=style.shot.start),
        )
        content = None
        if style.category == ContentCategory.SINGLE_FOCUS:
            content = clip.content_box
        framing = solve_framing(
            style, (target.width, target.height), content, config.min_framing_scale
        )
        rendered = render_shot(style, target, target_track, framing)
        frames.extend(rendered.frames)
        plan.records.append(
            _plan_record(style, selection, framing, rendered, target_track)
        )

    output_dir = Path(config.output_dir)
    output = FrameSequence(tuple(frames), source.frame_rate, "output")
    save_y4m(output, output_dir / OUTPUT_FILENAME)
    dump_json(plan.to_dict(), output_dir / PLAN_FILENAME)
    logger.info(f"Rendered {len(output)} frames for {len(plan.records)} shots")
    return plan


def _load_plan(config):
    path = Path(config.output_dir) / PLAN_FILENAME
    if not path.is_file():
        raise PipelineError("review", path.name, "no plan found, run transfer first")
    return EditPlan.from_dict(load_json(path))


def _write_keypoint_panels(config, seq, styles, annotations, directory):
    directory.mkdir(parents=True, exist_ok=True)
    params = config.motion_params()
    by_frame = {annotation.frame: annotation for annotation in annotations}
    for style in styles:
        frame = seq[style.shot.start]
        points = fast_detect(luma(frame), params.fast_threshold, params.max_keypoints)
        points = mark_foreground(points, by_frame.get(style.shot.start))
        keypoint_panel(frame, points).save(_shot_image(directory, style.index))


def _write_framing_panels(config, plan, styles, directory):
    directory.mkdir(parents=True, exist_ok=True)
    index = load_index(config)
    for record, style in zip(plan.records, styles):
        clip = index.get(record["source_id"])
        target = _load("review", Path(config.repo_dir) / clip.path)
        framing = FramingSolution.from_dict(record["framing"])
        footprints = window_footprints(style, framing)
        framing_panel(target[0], footprints).save(_shot_image(directory, style.index))


@pipeline_stage("review")
def cmd_review(config):
    """Emit the side-by-side video, timelines, mosaics, panels and review sheet."""
    plan = _load_plan(config)
    output_dir = Path(config.output_dir)
    review_dir = output_dir / REVIEW_DIR
    review_dir.mkdir(parents=True, exist_ok=True)

    source = _load("review", config.source)
    output = _load("review", output_dir / OUTPUT_FILENAME)
    _, styles = load_styles(config)
    save_y4m(side_by_side(source, output), output_dir / SIDE_BY_SIDE_FILENAME)

    timeline = TimelineExporter(plan.to_dict())
    dump_json(timeline.get_timeline(), output_dir / TIMELINE_FILENAME)
    timeline.write_csv(review_dir / TIMELINE_CSV_FILENAME)

    mosaic_paths = write_mosaics(
        source, styles, review_dir / MOSAICS_DIR, config.mosaic_max_area
    )
    annotations = _annotations(config, source)
    _write_keypoint_panels(
        config, source, styles, annotations, review_dir / "keypoints"
    )
    _write_framing_panels(config, plan, styles, review_dir / "framing")

    pdf = ReviewExporter(plan.to_dict(), mosaic_paths).get_pdf()
    pdf.output(str(output_dir / REVIEW_PDF_FILENAME), "F")
    logger.info(f"Review bundle written to {output_dir}")
    return plan


__all__ = [
    "EditPlan",
    "cmd_analyze",
    "cmd_index",
    "cmd_review",
    "cmd_transfer",
]
