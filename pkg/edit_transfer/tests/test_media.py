import json
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from edit_transfer.exceptions import FrameDirectoryError, MediaFormatError
from edit_transfer.media import (
    Frame,
    FrameSequence,
    load_sequence,
    luma,
    mean_luma,
    parse_y4m,
    read_frame_dir,
    save_y4m,
    solid_frame,
    write_frame_dir,
    write_png,
    write_y4m,
)
from edit_transfer.tests.factories.media import make_sequence, noise_pixels


class FrameTestCase(SimpleTestCase):
    def test_pixels_are_read_only(self):
        frame = solid_frame(4, 3, (10, 20, 30))
        self.assertEqual(frame.size, (4, 3))
        with self.assertRaises(ValueError):
            frame.pixels[0, 0, 0] = 1

    def test_rejects_non_rgb_arrays(self):
        with self.assertRaises(ValueError):
            Frame(np.zeros((4, 4), dtype=np.uint8))
        with self.assertRaises(ValueError):
            Frame(np.zeros((0, 4, 3), dtype=np.uint8))

    def test_sequence_renumbers_frames(self):
        frames = [solid_frame(4, 4, (0, 0, 0), index=7) for _ in range(3)]
        seq = FrameSequence(tuple(frames), Fraction(30000, 1001), "clip")
        self.assertEqual([frame.index for frame in seq], [0, 1, 2])
        self.assertEqual(seq.frame_rate, Fraction(30000, 1001))

    def test_sequence_rejects_mixed_sizes(self):
        frames = (solid_frame(4, 4, (0, 0, 0)), solid_frame(5, 4, (0, 0, 0)))
        with self.assertRaises(ValueError):
            FrameSequence(frames)

    def test_luma(self):
        frame = solid_frame(2, 2, (255, 0, 0))
        self.assertTrue(np.all(luma(frame) == 76))
        self.assertEqual(mean_luma(solid_frame(2, 2, (200, 200, 200))), 200.0)


class Y4mTestCase(SimpleTestCase):
    def test_write_and_parse(self):
        seq = make_sequence(
            [Frame(noise_pixels(8, 6, seed=i)) for i in range(3)],
            source_id="noise",
            frame_rate=Fraction(24000, 1001),
        )
        parsed = parse_y4m(write_y4m(seq), "noise")
        self.assertEqual(len(parsed), 3)
        self.assertEqual((parsed.width, parsed.height), (8, 6))
        self.assertEqual(parsed.frame_rate, Fraction(24000, 1001))
        for original, decoded in zip(seq, parsed):
            difference = np.abs(
                original.pixels.astype(int) - decoded.pixels.astype(int)
            )
            self.assertLessEqual(difference.max(), 1)

    def test_parse_420_stream(self):
        data = b"YUV4MPEG2 W2 H2 F25:1 C420jpeg\nFRAME\n" + bytes([128] * 6)
        seq = parse_y4m(data)
        self.assertEqual(len(seq), 1)
        self.assertTrue(np.all(seq[0].pixels == 128))

    def test_default_frame_rate(self):
        data = b"YUV4MPEG2 W2 H2 C444\nFRAME\n" + bytes(12)
        self.assertEqual(parse_y4m(data).frame_rate, Fraction(25, 1))

    def test_all_zero_planes(self):
        data = b"YUV4MPEG2 W2 H2 F25:1 C444\nFRAME\n" + bytes(12)
        seq = parse_y4m(data)
        self.assertEqual((len(seq), seq.width, seq.height), (1, 2, 2))

    def test_empty_stream(self):
        with self.assertRaises(MediaFormatError):
            parse_y4m(b"")

    def test_missing_signature(self):
        with self.assertRaises(MediaFormatError) as cm:
            parse_y4m(b"NOTY4M W2 H2\n")
        self.assertEqual(cm.exception.offset, 0)

    def test_missing_dimension(self):
        with self.assertRaises(MediaFormatError):
            parse_y4m(b"YUV4MPEG2 W2 F25:1\n")

    def test_invalid_frame_rate(self):
        with self.assertRaises(MediaFormatError):
            parse_y4m(b"YUV4MPEG2 W2 H2 F25:0\n")

    def test_unsupported_colorspace(self):
        with self.assertRaises(MediaFormatError):
            parse_y4m(b"YUV4MPEG2 W2 H2 Cmono\n")

    def test_truncated_frame(self):
        header = b"YUV4MPEG2 W2 H2 C444\n"
        data = header + b"FRAME\n" + bytes(5)
        with self.assertRaises(MediaFormatError) as cm:
            parse_y4m(data)
        self.assertEqual(cm.exception.offset, len(header) + len(b"FRAME\n"))

    def test_garbage_between_frames(self):
        data = b"YUV4MPEG2 W2 H2 C444\nFRAME\n" + bytes(12) + b"JUNK\n"
        with self.assertRaises(MediaFormatError):
            parse_y4m(data)

    def test_empty_sequence_cannot_be_encoded(self):
        with self.assertRaises(ValueError):
            write_y4m(FrameSequence(()))


class FrameDirectoryTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_write_and_read(self):
        seq = make_sequence(
            [Frame(noise_pixels(6, 4, seed=i)) for i in range(2)], "walk", 30
        )
        path = write_frame_dir(seq, self.root / "walk_dir")
        loaded = read_frame_dir(path)
        self.assertEqual(loaded.source_id, "walk")
        self.assertEqual(loaded.frame_rate, Fraction(30, 1))
        self.assertTrue(np.array_equal(loaded[1].pixels, seq[1].pixels))

    def test_source_id_defaults_to_directory_name(self):
        path = self.root / "beach"
        path.mkdir()
        write_png(solid_frame(4, 4, (1, 2, 3)), path / "frame_000000.png")
        with open(path / "meta.json", "w") as f:
            json.dump({"fps_num": 25, "fps_den": 1}, f)
        self.assertEqual(read_frame_dir(path).source_id, "beach")

    def test_missing_meta(self):
        with self.assertRaises(FrameDirectoryError):
            read_frame_dir(self.root)

    def test_nonconsecutive_indices(self):
        path = self.root / "gappy"
        path.mkdir()
        write_png(solid_frame(4, 4, (0, 0, 0)), path / "frame_000000.png")
        write_png(solid_frame(4, 4, (0, 0, 0)), path / "frame_000002.png")
        with open(path / "meta.json", "w") as f:
            json.dump({"fps_num": 25, "fps_den": 1}, f)
        with self.assertRaisesRegex(FrameDirectoryError, "frame_000001.png"):
            read_frame_dir(path)

    def test_mixed_frame_sizes(self):
        path = self.root / "mixed"
        path.mkdir()
        write_png(solid_frame(4, 4, (0, 0, 0)), path / "frame_000000.png")
        write_png(solid_frame(5, 4, (0, 0, 0)), path / "frame_000001.png")
        with open(path / "meta.json", "w") as f:
            json.dump({"fps_num": 25, "fps_den": 1}, f)
        with self.assertRaises(FrameDirectoryError):
            read_frame_dir(path)

    def test_load_sequence_dispatches_on_path(self):
        seq = make_sequence([solid_frame(4, 4, (50, 50, 50))], "gray")
        save_y4m(seq, self.root / "gray.y4m")
        self.assertEqual(load_sequence(self.root / "gray.y4m").source_id, "gray")
        write_frame_dir(seq, self.root / "gray_frames")
        self.assertEqual(load_sequence(self.root / "gray_frames").source_id, "gray")
