import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings

from edit_transfer.config import (
    apply_overrides,
    build_config,
    load_config,
    parse_override,
)
from edit_transfer.exceptions import ConfigurationError


class ConfigTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        (self.root / "source.y4m").write_bytes(b"")
        (self.root / "repo").mkdir()
        self.data = {
            "source": "source.y4m",
            "repo_dir": "repo",
            "output_dir": "out",
            "params": {"min_shot_len": 4},
        }

    def tearDown(self):
        self.tmp.cleanup()

    def write_config(self, data):
        path = self.root / "project.json"
        path.write_text(json.dumps(data))
        return path

    def test_load(self):
        config = load_config(self.write_config(self.data))
        self.assertEqual(config.source, (self.root / "source.y4m").resolve())
        self.assertEqual(config.output_dir, (self.root / "out").resolve())
        self.assertIsNone(config.annotations_dir)
        self.assertEqual(config.seed, 0)
        self.assertEqual(config.shot_params().min_shot_len, 4)

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config(self.root / "missing.json")

    def test_invalid_json(self):
        path = self.root / "project.json"
        path.write_text("{not json")
        with self.assertRaises(ConfigurationError):
            load_config(path)

    def test_missing_required_key(self):
        del self.data["repo_dir"]
        with self.assertRaisesRegex(ConfigurationError, "repo_dir"):
            load_config(self.write_config(self.data))

    def test_unknown_key(self):
        self.data["colour"] = "blue"
        with self.assertRaises(ConfigurationError):
            load_config(self.write_config(self.data))

    def test_unknown_param(self):
        self.data["params"]["sharpness"] = 3
        with self.assertRaises(ConfigurationError):
            load_config(self.write_config(self.data))

    def test_missing_input_path(self):
        self.data["annotations_dir"] = "annotations"
        with self.assertRaisesRegex(ConfigurationError, "annotations_dir"):
            load_config(self.write_config(self.data))

    def test_invalid_thresholds(self):
        self.data["params"] = {"cut_threshold": 0.2, "fade_threshold": 0.4}
        with self.assertRaises(ConfigurationError):
            load_config(self.write_config(self.data))

    def test_overrides_and_seed(self):
        path = self.write_config(self.data)
        config = load_config(
            path,
            ["params.cut_threshold=0.6", "stride=2", "ransac_inlier_px=2.5"],
            seed=5,
        )
        self.assertEqual(config.shot_params().cut_threshold, 0.6)
        self.assertEqual(config.shot_params().seed, 5)
        motion = config.motion_params(seed_offset=3)
        self.assertEqual(motion.stride, 2)
        self.assertEqual(motion.inlier_px, 2.5)
        self.assertEqual(motion.seed, 8)

    def test_unknown_override(self):
        with self.assertRaises(ConfigurationError):
            apply_overrides(self.data, ["brightness=2"])

    def test_parse_override(self):
        self.assertEqual(parse_override("seed=3"), ("seed", 3))
        self.assertEqual(parse_override("output_dir=out2"), ("output_dir", "out2"))
        self.assertEqual(
            parse_override('salient_labels=["dog"]'), ("salient_labels", ["dog"])
        )
        with self.assertRaises(ConfigurationError):
            parse_override("seed")

    def test_fingerprint(self):
        path = self.write_config(self.data)
        first = load_config(path)
        self.assertEqual(first.fingerprint, load_config(path).fingerprint)
        changed = load_config(path, ["cut_threshold=0.6"])
        self.assertNotEqual(first.fingerprint, changed.fingerprint)

    @override_settings(EDIT_TRANSFER_ASPECT_TOLERANCE=0.05)
    def test_render_params_default_to_settings(self):
        config = build_config(self.data, self.root)
        self.assertEqual(config.aspect_tolerance, 0.05)
        self.data["params"]["aspect_tolerance"] = 0.2
        self.assertEqual(build_config(self.data, self.root).aspect_tolerance, 0.2)
