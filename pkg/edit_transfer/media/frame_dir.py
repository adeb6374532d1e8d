import json
import logging
import re
from fractions import Fraction
from pathlib import Path

import numpy as np
from PIL import Image

from ..exceptions import FrameDirectoryError
from .frames import Frame, FrameSequence

logger = logging.getLogger(__name__)

META_FILENAME = "meta.json"
FRAME_FILENAME = "frame_{:06d}.png"
FRAME_PATTERN = re.compile(r"^frame_(\d{6})\.png$")


def read_png(path):
    with Image.open(path) as image:
        return np.asarray(image.convert("RGB"))


def write_png(frame, path):
    pixels = frame.pixels if isinstance(frame, Frame) else np.asarray(frame)
    Image.fromarray(pixels).save(path, format="PNG")


def read_frame_dir(path):
    path = Path(path)
    meta_path = path / META_FILENAME
    if not meta_path.is_file():
        raise FrameDirectoryError(f"Frame directory {path} has no {META_FILENAME}")
    with open(meta_path, encoding="utf-8") as f:
        meta = json.load(f)
    try:
        frame_rate = Fraction(int(meta["fps_num"]), int(meta["fps_den"]))
    except (KeyError, ValueError, ZeroDivisionError, TypeError):
        raise FrameDirectoryError(f"{meta_path} must define fps_num and fps_den")
    source_id = meta.get("source_id") or path.name

    indexed = {}
    for entry in path.iterdir():
        match = FRAME_PATTERN.match(entry.name)
        if match:
            indexed[int(match.group(1))] = entry
    for expected, index in enumerate(sorted(indexed)):
        if index != expected:
            raise FrameDirectoryError(
                f"Frame directory {path} has nonconsecutive indices: "
                f"expected frame_{expected:06d}.png, found frame_{index:06d}.png"
            )

    frames = []
    size = None
    for index in sorted(indexed):
        pixels = read_png(indexed[index])
        if size is None:
            size = pixels.shape
        elif pixels.shape != size:
            raise FrameDirectoryError(
                f"{indexed[index].name} is {pixels.shape[1]}x{pixels.shape[0]}, "
                f"expected {size[1]}x{size[0]}"
            )
        frames.append(Frame(pixels, index))

    logger.debug(f"Read {len(frames)} frames from {path}")
    return FrameSequence(tuple(frames), frame_rate, source_id)


def write_frame_dir(sequence, path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    for frame in sequence:
        write_png(frame, path / FRAME_FILENAME.format(frame.index))
    meta = {
        "fps_num": sequence.frame_rate.numerator,
        "fps_den": sequence.frame_rate.denominator,
        "source_id": sequence.source_id,
    }
    with open(path / META_FILENAME, "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
    return path
