from django.test import SimpleTestCase, override_settings

from edit_transfer.constants import ContentCategory, Transition
from edit_transfer.exceptions import InvalidSpeedError
from edit_transfer.media import solid_frame
from edit_transfer.motion import Box, ForegroundAnnotation, HomographyTrack
from edit_transfer.shots import Shot
from edit_transfer.style import (
    ContentLabel,
    ShotStyle,
    assemble_style,
    brightness_curve,
    categorize,
    label_scene,
    sample_annotations,
    validate_speed_map,
)
from edit_transfer.tests.factories import ShotStyleFactory


def people(frame, count):
    boxes = tuple(Box(10 * i, 0, 5, 5, "person") for i in range(count))
    return ForegroundAnnotation(frame, boxes)


class CategorizeTestCase(SimpleTestCase):
    def test_thresholds(self):
        self.assertEqual(categorize(0, 0.5, 2.0), ContentCategory.BACKGROUND)
        self.assertEqual(categorize(0.5, 0.5, 2.0), ContentCategory.SINGLE_FOCUS)
        self.assertEqual(categorize(2.0, 0.5, 2.0), ContentCategory.SINGLE_FOCUS)
        self.assertEqual(categorize(2.5, 0.5, 2.0), ContentCategory.MULTI_SUBJECT)

    @override_settings(EDIT_TRANSFER_MULTI_SUBJECT_MIN=1.0)
    def test_thresholds_from_settings(self):
        self.assertEqual(categorize(1.5), ContentCategory.MULTI_SUBJECT)


class LabelSceneTestCase(SimpleTestCase):
    def test_no_annotations(self):
        label = label_scene([])
        self.assertEqual(label.category, ContentCategory.BACKGROUND)
        self.assertEqual(label.object_counts, {})

    def test_mean_counts(self):
        annotations = [people(0, 1), people(1, 2)]
        label = label_scene(annotations, salient_labels=["person"])
        self.assertEqual(label.category, ContentCategory.SINGLE_FOCUS)
        self.assertEqual(label.object_counts, {"person": 1.5})

    def test_only_salient_labels_count(self):
        cars = ForegroundAnnotation(0, tuple(Box(0, 0, 1, 1, "car") for _ in range(4)))
        label = label_scene([cars], salient_labels=["person"])
        self.assertEqual(label.category, ContentCategory.BACKGROUND)
        self.assertEqual(label.object_counts, {"car": 4.0})

    def test_crowd(self):
        label = label_scene([people(0, 3)], salient_labels=["person"])
        self.assertEqual(label.category, ContentCategory.MULTI_SUBJECT)

    def test_sample_annotations(self):
        sampled = sample_annotations([people(4, 1)], 0, 9, count=3)
        self.assertEqual([a.frame for a in sampled], [0, 4, 8])
        self.assertEqual([len(a.boxes) for a in sampled], [0, 1, 0])


class SpeedMapTestCase(SimpleTestCase):
    def test_string_keys(self):
        self.assertEqual(validate_speed_map({"0": 2, 3: "0.5"}), {0: 2.0, 3: 0.5})
        self.assertEqual(validate_speed_map(None), {})

    def test_invalid_speed(self):
        for speed in (0, -1, "fast", float("inf")):
            with self.subTest(speed=speed):
                with self.assertRaises(InvalidSpeedError):
                    validate_speed_map({"0": speed})

    def test_invalid_key(self):
        with self.assertRaises(InvalidSpeedError):
            validate_speed_map({"first": 1.0})


class ShotStyleTestCase(SimpleTestCase):
    def test_brightness_curve(self):
        frames = [solid_frame(2, 2, (v, v, v)) for v in (10, 20)]
        self.assertEqual(brightness_curve(frames), [10.0, 20.0])

    def test_assemble_default_speed(self):
        shot = Shot(5, 9, Transition.FADE)
        style = assemble_style(
            shot,
            HomographyTrack.static(4),
            ContentLabel(),
            [1, 2, 3, 4],
            {"1": 2.0},
            width=64,
            height=48,
            index=0,
        )
        self.assertEqual(style.speed, 1.0)
        self.assertEqual(style.transition_in, Transition.FADE)
        self.assertEqual(style.brightness, (1.0, 2.0, 3.0, 4.0))
        self.assertAlmostEqual(style.aspect, 4 / 3)

    def test_assemble_mapped_speed(self):
        style = assemble_style(
            Shot(0, 2),
            HomographyTrack.static(2),
            ContentLabel(),
            [0, 0],
            {"1": 2.0},
            width=64,
            height=48,
            index=1,
        )
        self.assertEqual(style.speed, 2.0)

    def test_invalid_entry_anywhere_in_map(self):
        with self.assertRaises(InvalidSpeedError):
            assemble_style(
                Shot(0, 2),
                HomographyTrack.static(2),
                ContentLabel(),
                [0, 0],
                {"0": 1.0, "5": -2},
                width=64,
                height=48,
                index=0,
            )

    def test_brightness_length_must_match(self):
        with self.assertRaises(ValueError):
            ShotStyleFactory(length=4, brightness=(1.0,))

    def test_dict_conversion(self):
        style = ShotStyleFactory(
            index=3,
            speed=0.5,
            label=ContentLabel(ContentCategory.SINGLE_FOCUS, {"person": 1.0}),
        )
        data = style.to_dict()
        self.assertEqual(data["aspect"], 2.0)
        self.assertFalse(data["motion_failed"])
        restored = ShotStyle.from_dict(data)
        self.assertEqual(restored.index, 3)
        self.assertEqual(restored.speed, 0.5)
        self.assertEqual(restored.category, ContentCategory.SINGLE_FOCUS)
        self.assertEqual(restored.shot, style.shot)
        self.assertEqual(len(restored.track), len(style))
