"""
YUV4MPEG2 stream codec.

Streams are decoded into full-range RGB frames (BT.601 coefficients) and
always encoded as C444 so a write/parse round trip loses at most one code
value per channel.
"""
import logging
from fractions import Fraction
from pathlib import Path

import numpy as np
from PIL import Image

from ..exceptions import MediaFormatError
from .frames import Frame, FrameSequence, rgb_to_yuv, yuv_to_rgb

logger = logging.getLogger(__name__)

SIGNATURE = b"YUV4MPEG2"
FRAME_TAG = b"FRAME"

COLORSPACES_444 = {"444"}
COLORSPACES_420 = {"420", "420jpeg", "420paldv", "420mpeg2"}


def _parse_header(data):
    end = data.find(b"\n")
    if not data.startswith(SIGNATURE) or end < 0:
        raise MediaFormatError("Missing YUV4MPEG2 signature line", offset=0)
    tokens = data[:end].split(b" ")
    if tokens[0] != SIGNATURE:
        raise MediaFormatError("Missing YUV4MPEG2 signature line", offset=0)

    params = {}
    offset = len(SIGNATURE) + 1
    for token in tokens[1:]:
        if not token:
            offset += 1
            continue
        try:
            key, value = chr(token[0]), token[1:].decode("ascii")
        except UnicodeDecodeError:
            raise MediaFormatError("Non-ASCII header parameter", offset=offset)
        params[key] = (value, offset)
        offset += len(token) + 1

    def _int_param(key):
        if key not in params:
            raise MediaFormatError(f"Header parameter {key} is missing", offset=0)
        value, at = params[key]
        if not value.isdigit() or int(value) <= 0:
            raise MediaFormatError(f"Invalid header parameter {key}{value}", offset=at)
        return int(value)

    width = _int_param("W")
    height = _int_param("H")

    frame_rate = Fraction(25, 1)
    if "F" in params:
        value, at = params["F"]
        num, _, den = value.partition(":")
        if not (num.isdigit() and den.isdigit()) or int(num) == 0 or int(den) == 0:
            raise MediaFormatError(f"Invalid frame rate F{value}", offset=at)
        frame_rate = Fraction(int(num), int(den))

    colorspace, at = params.get("C", ("420jpeg", 0))
    if colorspace not in COLORSPACES_444 | COLORSPACES_420:
        raise MediaFormatError(f"Unsupported colorspace C{colorspace}", offset=at)

    return width, height, frame_rate, colorspace, end + 1


def _upsample_chroma(plane, width, height):
    image = Image.fromarray(plane, mode="L")
    return np.asarray(image.resize((width, height), Image.BILINEAR))


def parse_y4m(data, source_id=""):
    data = bytes(data)
    width, height, frame_rate, colorspace, offset = _parse_header(data)
    luma_size = width * height
    if colorspace in COLORSPACES_444:
        chroma_w, chroma_h = width, height
    else:
        chroma_w, chroma_h = (width + 1) // 2, (height + 1) // 2
    chroma_size = chroma_w * chroma_h
    payload_size = luma_size + 2 * chroma_size

    frames = []
    while offset < len(data):
        line_end = data.find(b"\n", offset)
        if not data.startswith(FRAME_TAG, offset) or line_end < 0:
            raise MediaFormatError("Expected FRAME record", offset=offset)
        header = data[offset:line_end]
        if len(header) > len(FRAME_TAG) and header[len(FRAME_TAG)] != ord(" "):
            raise MediaFormatError("Malformed FRAME record", offset=offset)
        start = line_end + 1
        if start + payload_size > len(data):
            raise MediaFormatError(
                f"Truncated frame payload: need {payload_size} bytes, "
                f"{len(data) - start} available",
                offset=start,
            )
        payload = np.frombuffer(data, dtype=np.uint8, count=payload_size, offset=start)
        y = payload[:luma_size].reshape(height, width)
        u = payload[luma_size : luma_size + chroma_size].reshape(chroma_h, chroma_w)
        v = payload[luma_size + chroma_size :].reshape(chroma_h, chroma_w)
        if colorspace in COLORSPACES_420:
            u = _upsample_chroma(u, width, height)
            v = _upsample_chroma(v, width, height)
        frames.append(Frame(yuv_to_rgb(y, u, v), len(frames)))
        offset = start + payload_size

    logger.debug(f"Parsed {len(frames)} frames of {width}x{height} from '{source_id}'")
    return FrameSequence(tuple(frames), frame_rate, source_id)


def write_y4m(sequence):
    if not len(sequence):
        raise ValueError("Cannot encode an empty frame sequence")
    rate = sequence.frame_rate
    header = (
        f"YUV4MPEG2 W{sequence.width} H{sequence.height} "
        f"F{rate.numerator}:{rate.denominator} Ip A1:1 C444\n"
    )
    chunks = [header.encode("ascii")]
    for frame in sequence:
        chunks.append(FRAME_TAG + b"\n")
        chunks.extend(plane.tobytes() for plane in rgb_to_yuv(frame.pixels))
    return b"".join(chunks)


def read_y4m(path, source_id=None):
    with open(path, "rb") as f:
        data = f.read()
    if source_id is None:
        source_id = Path(path).stem
    return parse_y4m(data, source_id)


def save_y4m(sequence, path):
    with open(path, "wb") as f:
        f.write(write_y4m(sequence))
