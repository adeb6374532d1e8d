import numpy as np
from django.test import SimpleTestCase

from edit_transfer.exceptions import AlignmentError
from edit_transfer.tests.factories.media import texture_master
from edit_transfer.vision import Homography, align_homography
from edit_transfer.vision.alignment import corner_shift
from edit_transfer.vision.warping import inverse_map

SIZE = 160
CENTER = ((SIZE - 1) / 2, (SIZE - 1) / 2)


class AlignHomographyTestCase(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.master = texture_master(256, seed=51)
        cls.crop = Homography.translation(48, 48)
        cls.reference, _ = inverse_map(cls.master, cls.crop.m, (SIZE, SIZE))
        # image(p) = reference(truth p)
        rotation = Homography.rotation(0.5, center=CENTER)
        cls.truth = rotation @ Homography.translation(1.3, -0.7)
        cls.image, _ = inverse_map(cls.master, (cls.crop @ cls.truth).m, (SIZE, SIZE))

    def assert_recovers_truth(self, alignment):
        residual = alignment.homography @ self.truth.inverse()
        self.assertLess(corner_shift(residual.m, SIZE, SIZE), 0.1)

    def test_recovers_small_motion(self):
        alignment = align_homography(
            self.reference, self.image, Homography.translation(1, -1)
        )
        self.assert_recovers_truth(alignment)
        self.assertGreater(alignment.overlap, 0.9)
        self.assertLess(alignment.rms, 1.0)
        self.assertGreater(alignment.iterations, 1)

    def test_brightness_change(self):
        alignment = align_homography(
            self.reference, 0.8 * self.image + 12, Homography.translation(1, -1)
        )
        self.assert_recovers_truth(alignment)

    def test_masked_pixels_are_ignored(self):
        image = self.image.copy()
        image[40:90, 30:100] = 255
        mask = np.zeros(image.shape, dtype=bool)
        mask[35:95, 25:105] = True
        alignment = align_homography(
            self.reference, image, Homography.translation(1, -1), image_mask=mask
        )
        self.assert_recovers_truth(alignment)

    def test_too_little_overlap(self):
        with self.assertRaises(AlignmentError):
            align_homography(
                self.reference, self.image, Homography.translation(150, 150)
            )

    def test_everything_masked(self):
        mask = np.ones(self.image.shape, dtype=bool)
        with self.assertRaises(AlignmentError):
            align_homography(
                self.reference, self.image, Homography.identity(), image_mask=mask
            )

    def test_corner_shift(self):
        self.assertEqual(corner_shift(Homography.translation(2, -3).m, 10, 10), 3.0)
        self.assertEqual(corner_shift(np.eye(3), 10, 10), 0.0)
