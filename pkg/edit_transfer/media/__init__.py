from pathlib import Path

from .frame_dir import (
    META_FILENAME,
    read_frame_dir,
    read_png,
    write_frame_dir,
    write_png,
)
from .frames import Frame, FrameSequence, luma, mean_luma, solid_frame
from .y4m import parse_y4m, read_y4m, save_y4m, write_y4m


def is_sequence_path(path):
    path = Path(path)
    if path.is_dir():
        return (path / META_FILENAME).is_file()
    return path.suffix.lower() == ".y4m" and path.is_file()


def load_sequence(path):
    """Decode a `.y4m` file or a PNG frame directory."""
    path = Path(path)
    if path.is_dir():
        return read_frame_dir(path)
    return read_y4m(path)


__all__ = [
    "Frame",
    "FrameSequence",
    "is_sequence_path",
    "load_sequence",
    "luma",
    "mean_luma",
    "parse_y4m",
    "read_frame_dir",
    "read_png",
    "read_y4m",
    "save_y4m",
    "solid_frame",
    "write_frame_dir",
    "write_png",
    "write_y4m",
]
