import csv
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from edit_transfer.exporters import (
    FOREGROUND_COLOR,
    TIMELINE_HEADERS,
    ReviewExporter,
    TimelineExporter,
    boundaries,
    framing_panel,
    keypoint_panel,
    side_by_side,
)
from edit_transfer.media import solid_frame, write_png
from edit_transfer.tests.factories.media import make_sequence
from edit_transfer.vision import Keypoint


def plan_record(index, start, end, frames, transition="hard_cut"):
    return {
        "index": index,
        "shot": {
            "start": start,
            "end": end,
            "transition_in": transition,
            "scene_id": 0,
        },
        "style": {
            "category": "background",
            "object_counts": {},
            "speed": 1.0,
            "transition_in": transition,
            "mean_brightness": 100.0,
            "flagged_frames": [],
        },
        "source_id": f"clip_{index}",
        "offset": 0,
        "framing": {"scale": 0.75, "offset": [1.0, 2.0]},
        "frames": frames,
        "flags": ["category_waived"] if index else [],
        "provenance": {},
    }


class TimelineExporterTestCase(SimpleTestCase):
    def setUp(self):
        self.plan = {
            "fingerprint": "ab" * 32,
            "source_id": "source",
            "frame_rate": "25",
            "records": [
                plan_record(0, 0, 10, 10),
                plan_record(1, 10, 16, 12, "fade"),
            ],
        }

    def test_boundaries(self):
        self.assertEqual(boundaries([3, 4, 5]), [0, 3, 7])

    def test_rows(self):
        exporter = TimelineExporter(self.plan)
        self.assertEqual(len(exporter.get_headers()), len(TIMELINE_HEADERS))
        rows = exporter.get_rows()
        self.assertEqual(rows[1][:4], [1, 10, 16, "fade"])
        self.assertEqual(rows[1][-1], "category_waived")

    def test_timeline(self):
        timeline = TimelineExporter(self.plan).get_timeline()
        self.assertEqual(timeline["source"], {"frames": 16, "boundaries": [0, 10]})
        self.assertEqual(timeline["output"], {"frames": 22, "boundaries": [0, 10]})
        self.assertEqual(timeline["shots"][1]["transition_in"], "fade")

    def test_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "timeline.csv"
            TimelineExporter(self.plan).write_csv(path)
            with open(path, newline="") as f:
                rows = list(csv.reader(f))
        self.assertEqual(len(rows), 3)
        self.assertEqual(rows[0][0], "Shot")

    def test_review_pdf(self):
        with tempfile.TemporaryDirectory() as tmp:
            mosaic = Path(tmp) / "shot_000.png"
            write_png(solid_frame(40, 20, (10, 200, 10)), mosaic)
            pdf = ReviewExporter(self.plan, [mosaic, None]).get_pdf()
            self.assertEqual(pdf.page_no(), 2)
            pdf.output(str(Path(tmp) / "review.pdf"), "F")
            self.assertGreater((Path(tmp) / "review.pdf").stat().st_size, 0)


class PanelTestCase(SimpleTestCase):
    def test_keypoint_panel(self):
        frame = solid_frame(40, 30, (0, 0, 0))
        points = [Keypoint(10, 10, is_foreground=True), Keypoint(30, 20)]
        image = keypoint_panel(frame, points)
        self.assertEqual(image.size, (40, 30))
        pixels = np.asarray(image)
        self.assertTrue(np.any(np.all(pixels == FOREGROUND_COLOR, axis=2)))

    def test_framing_panel(self):
        frame = solid_frame(40, 30, (0, 0, 0))
        footprint = np.array([[5, 5], [20, 5], [20, 15], [5, 15]], dtype=float)
        image = framing_panel(frame, [footprint, footprint + [10, 0]])
        self.assertEqual(image.size, (40, 30))
        self.assertTrue(np.asarray(image).any())

    def test_side_by_side(self):
        source = make_sequence([solid_frame(8, 4, (255, 255, 255))] * 2, "source")
        output = make_sequence([solid_frame(6, 6, (100, 100, 100))] * 3, "output")
        combined = side_by_side(source, output)
        self.assertEqual(len(combined), 2)
        self.assertEqual((combined.width, combined.height), (14, 6))
        self.assertTrue(np.all(combined[0].pixels[0, :8] == 0))
        self.assertTrue(np.all(combined[0].pixels[1, :8] == 255))
        self.assertEqual(combined.source_id, "side_by_side")
