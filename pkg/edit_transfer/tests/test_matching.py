from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from edit_transfer.tests.factories.media import noise_pixels
from edit_transfer.vision import (
    Keypoint,
    describe,
    fast_detect,
    hamming,
    hamming_matrix,
    match,
)
from edit_transfer.vision.matching import NO_DISTANCE, _two_nearest_lsh


class DescribeTestCase(SimpleTestCase):
    def setUp(self):
        self.image = noise_pixels(80, 80, seed=11)[..., 0]

    def test_border_points_are_dropped(self):
        points = [Keypoint(40, 40), Keypoint(3, 40), Keypoint(40, 70)]
        descriptors = describe(self.image, points)
        self.assertEqual(len(descriptors), 1)
        self.assertEqual(descriptors.dropped, [1, 2])
        self.assertEqual(descriptors.bits.shape, (1, 32))

    def test_no_surviving_points(self):
        descriptors = describe(self.image, [Keypoint(0, 0)])
        self.assertEqual(len(descriptors), 0)
        self.assertEqual(descriptors.bits.shape, (0, 32))

    def test_translation_keeps_descriptor(self):
        shifted = np.roll(self.image, 3, axis=1)
        a = describe(self.image, [Keypoint(40, 40)])
        b = describe(shifted, [Keypoint(43, 40)])
        self.assertEqual(hamming(a.bits[0], b.bits[0]), 0)

    def test_inverted_image_flips_every_comparison(self):
        # a ramp with no two pattern samples of equal brightness
        ramp = np.add.outer(0.37 * np.arange(80), np.arange(80.0))
        a = describe(ramp, [Keypoint(40, 40)])
        b = describe(255 - ramp, [Keypoint(40, 40)])
        self.assertEqual(hamming(a.bits[0], b.bits[0]), 256)

    def test_different_content_differs(self):
        other = noise_pixels(80, 80, seed=12)[..., 0]
        a = describe(self.image, [Keypoint(40, 40)])
        b = describe(other, [Keypoint(40, 40)])
        self.assertGreater(hamming(a.bits[0], b.bits[0]), 40)


class HammingTestCase(SimpleTestCase):
    def test_hamming(self):
        zeros = np.zeros(32, dtype=np.uint8)
        ones = np.full(32, 255, dtype=np.uint8)
        self.assertEqual(hamming(zeros, ones), 256)
        self.assertEqual(hamming(ones, ones), 0)

    def test_hamming_matrix(self):
        a = np.zeros((2, 32), dtype=np.uint8)
        a[1, 0] = 0b00000111
        distances = hamming_matrix(a, a[::-1])
        self.assertEqual(distances.tolist(), [[3, 0], [0, 3]])


class MatchTestCase(SimpleTestCase):
    def setUp(self):
        self.image = noise_pixels(96, 96, seed=5)[..., 0]
        self.descriptors = describe(self.image, fast_detect(self.image))

    def test_identical_sets_match_one_to_one(self):
        matches = match(self.descriptors, self.descriptors)
        self.assertGreater(len(matches), 20)
        for a, b, distance in matches:
            self.assertEqual(a, b)
            self.assertEqual(distance, 0)
        self.assertEqual(len(set(matches.indices_b)), len(matches))

    def test_shifted_image_matches(self):
        shifted = np.roll(self.image, 4, axis=1)
        other = describe(shifted, fast_detect(shifted))
        matches = match(self.descriptors, other)
        self.assertGreater(len(matches), 20)
        offsets = [
            other.keypoints[j].x - self.descriptors.keypoints[i].x
            for i, j, _ in matches
        ]
        close = np.isclose(offsets, 4.0, atol=1e-9)
        self.assertGreater(close.sum(), 0.9 * len(offsets))

    def test_empty_input(self):
        empty = np.zeros((0, 32), dtype=np.uint8)
        self.assertEqual(len(match(empty, self.descriptors)), 0)

    def test_ratio_must_lie_in_unit_interval(self):
        with self.assertRaises(ValueError):
            match(self.descriptors, self.descriptors, ratio=1.0)


class LargeSetMatchTestCase(SimpleTestCase):
    """Sets of 2000 descriptors or more are matched through LSH buckets."""

    def setUp(self):
        rng = np.random.default_rng(17)
        self.a = rng.integers(0, 256, size=(2100, 32), dtype=np.uint8)
        self.b = self.a.copy()
        # flip four bits of the first half, the last 16 bytes stay intact
        for row in self.b:
            for bit in rng.choice(128, size=4, replace=False):
                row[bit // 8] ^= np.uint8(1 << (bit % 8))

    def test_lsh_neighbours(self):
        best, first, second = _two_nearest_lsh(self.a, self.b)
        self.assertEqual(best.tolist(), list(range(2100)))
        self.assertTrue(np.all(first == 4))
        self.assertTrue(np.all(second > 40))

    @patch(
        "edit_transfer.vision.matching._two_nearest_exhaustive",
        side_effect=AssertionError("exhaustive scan used"),
    )
    def test_match_uses_lsh(self, mock_exhaustive):
        matches = match(self.a, self.b)
        self.assertEqual(len(matches), 2100)
        self.assertEqual(matches.indices_a, matches.indices_b)
        self.assertTrue(all(distance == 4 for _, _, distance in matches))
        mock_exhaustive.assert_not_called()

    def test_query_without_shared_substring(self):
        query = np.bitwise_not(self.b[:1])
        best, first, _ = _two_nearest_lsh(query, self.b)
        self.assertEqual(best.tolist(), [-1])
        self.assertEqual(first.tolist(), [NO_DISTANCE])
