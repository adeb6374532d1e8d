import abc
import csv

import numpy as np
from django.utils.translation import gettext_lazy as _
from fpdf import FPDF
from PIL import Image, ImageDraw

from .media import Frame, FrameSequence

FOREGROUND_COLOR = (255, 0, 0)
BACKGROUND_COLOR = (0, 0, 255)
WINDOW_COLOR = (0, 255, 0)
SWEEP_COLOR = (255, 255, 0)
KEYPOINT_RADIUS = 2

PAGE_IMAGE_WIDTH = 190
PAGE_IMAGE_MAX_HEIGHT = 150

TIMELINE_HEADERS = [
    _("Shot"),
    _("Start"),
    _("End"),
    _("Transition"),
    _("Scene"),
    _("Category"),
    _("Speed"),
    _("Target clip"),
    _("Scale"),
    _("Flags"),
]


def _get_timeline_row(record):
    shot = record["shot"]
    return [
        record["index"],
        shot["start"],
        shot["end"],
        shot["transition_in"],
        shot["scene_id"],
        record["style"]["category"],
        record["style"]["speed"],
        record["source_id"],
        record["framing"]["scale"],
        " ".join(record["flags"]),
    ]


def boundaries(lengths):
    """Start frames of consecutive segments with the given lengths."""
    return [int(v) for v in np.concatenate([[0], np.cumsum(lengths)[:-1]])]


class TimelineExporter:
    def __init__(self, plan):
        self.plan = plan

    def get_headers(self):
        return [str(header) for header in TIMELINE_HEADERS]

    def get_rows(self):
        return [_get_timeline_row(record) for record in self.plan["records"]]

    def get_timeline(self):
        source_lengths = [
            record["shot"]["end"] - record["shot"]["start"]
            for record in self.plan["records"]
        ]
        output_lengths = [record["frames"] for record in self.plan["records"]]
        return {
            "source": {
                "frames": int(sum(source_lengths)),
                "boundaries": boundaries(source_lengths),
            },
            "output": {
                "frames": int(sum(output_lengths)),
                "boundaries": boundaries(output_lengths),
            },
            "shots": [
                dict(zip(["index", "start", "end", "transition_in"], row[:4]))
                for row in self.get_rows()
            ],
        }

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(self.get_headers())
            for row in self.get_rows():
                writer.writerow(row)


def keypoint_panel(frame, keypoints):
    """The frame with background keypoints in blue and foreground ones in red."""
    image = Image.fromarray(frame.pixels).convert("RGB")
    draw = ImageDraw.Draw(image)
    r = KEYPOINT_RADIUS
    for point in keypoints:
        color = FOREGROUND_COLOR if point.is_foreground else BACKGROUND_COLOR
        box = [point.x - r, point.y - r, point.x + r, point.y + r]
        draw.ellipse(box, outline=color)
    return image


def framing_panel(frame, footprints):
    """
    The target start frame with the output window's first footprint and
    the bounding box of its whole sweep.
    """
    image = Image.fromarray(frame.pixels).convert("RGB")
    draw = ImageDraw.Draw(image)
    corners = np.vstack(footprints)
    x0, y0 = corners.min(axis=0)
    x1, y1 = corners.max(axis=0)
    draw.rectangle([float(x0), float(y0), float(x1), float(y1)], outline=SWEEP_COLOR)
    start = [tuple(float(v) for v in corner) for corner in footprints[0]]
    draw.polygon(start, outline=WINDOW_COLOR)
    return image


def _letterbox(pixels, height):
    top = (height - pixels.shape[0]) // 2
    padded = np.zeros((height, pixels.shape[1], 3), dtype=np.uint8)
    padded[top : top + pixels.shape[0]] = pixels
    return padded


def side_by_side(source, output):
    """Source frames on the left, output on the right, letterboxed to one height."""
    height = max(source.height, output.height)
    frames = [
        Frame(
            np.hstack(
                [_letterbox(left.pixels, height), _letterbox(right.pixels, height)]
            )
        )
        for left, right in zip(source, output)
    ]
    return FrameSequence(tuple(frames), source.frame_rate, "side_by_side")


class BasePDF(FPDF, metaclass=abc.ABCMeta):
    def header(self):
        self.set_font("Arial", "B", 15)
        self.cell(80)
        self.cell(30, 10, self.get_title(), 0, 0, "C")
        self.ln(20)

    def footer(self):
        self.set_y(-15)
        self.set_font("Arial", "I", 8)
        self.cell(0, 5, f"{self.page_no()}", 0, 0, "C")

    @abc.abstractmethod
    def get_title(self):
        pass

    @abc.abstractmethod
    def set_content(self, obj):
        pass


class ShotReviewPDF(BasePDF):
    def __init__(self, fingerprint=""):
        super().__init__()
        self.fingerprint = fingerprint

    def get_title(self):
        return str(_("Edit review"))

    def set_content(self, obj):
        record, mosaic_path = obj
        shot = record["shot"]
        style = record["style"]
        framing = record["framing"]
        content = [
            f"{_('Shot')} {record['index']}: "
            f"{_('frames')} {shot['start']}-{shot['end']} ({shot['transition_in']})",
            f"{_('Scene')}: {shot['scene_id']}",
            f"{_('Category')}: {style['category']}",
            f"{_('Speed')}: {style['speed']}x",
            f"{_('Mean brightness')}: {style['mean_brightness']:.1f}",
            f"{_('Target clip')}: {record['source_id']}",
            f"{_('Framing')}: {_('scale')} {framing['scale']:.4f}, "
            f"{_('offset')} ({framing['offset'][0]:.1f}, {framing['offset'][1]:.1f})",
            f"{_('Flags')}: {', '.join(record['flags']) or '-'}",
            f"{_('Plan')}: {self.fingerprint[:16]}",
        ]
        for line in content:
            self.cell(0, 7, line, 0, 1)
        if mosaic_path is not None:
            with Image.open(mosaic_path) as image:
                width, height = image.size
            w = PAGE_IMAGE_WIDTH
            if w * height / width > PAGE_IMAGE_MAX_HEIGHT:
                w = PAGE_IMAGE_MAX_HEIGHT * width / height
            self.ln(5)
            self.image(str(mosaic_path), x=10, y=self.get_y(), w=w)


class ReviewExporter:
    def __init__(self, plan, mosaic_paths):
        self.plan = plan
        self.mosaic_paths = mosaic_paths

    def get_pdf(self):
        pdf = ShotReviewPDF(self.plan["fingerprint"])
        for record, mosaic_path in zip(self.plan["records"], self.mosaic_paths):
            pdf.add_page()
            pdf.set_font("Times", "", 12)
            pdf.set_content((record, mosaic_path))
        return pdf
