"""
Project configuration files and their command-line overrides.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from django.conf import settings

from .exceptions import ConfigurationError
from .motion import MotionParams
from .shots import ShotDetectParams

logger = logging.getLogger(__name__)

PATH_FIELDS = ("source", "repo_dir", "annotations_dir", "speed_map", "output_dir")
SHOT_PARAMS = {f.name for f in fields(ShotDetectParams)} - {"seed"}
MOTION_PARAMS = {f.name for f in fields(MotionParams)} - {"seed"}
RENDER_PARAMS = {
    "aspect_tolerance",
    "min_framing_scale",
    "mosaic_max_area",
    "salient_labels",
}
# motion settings shared with shot detection under different names
MOTION_ALIASES = {"ransac_inlier_px": "inlier_px", "ransac_max_iters": "max_iters"}
KNOWN_PARAMS = SHOT_PARAMS | MOTION_PARAMS | RENDER_PARAMS | set(MOTION_ALIASES)


@dataclass(frozen=True)
class ProjectConfig:
    source: Path
    repo_dir: Path
    output_dir: Path
    annotations_dir: Optional[Path] = None
    speed_map: Optional[Path] = None
    seed: int = 0
    params: dict = field(default_factory=dict)

    def to_dict(self):
        data = {
            name: str(getattr(self, name)) if getattr(self, name) else None
            for name in PATH_FIELDS
        }
        data["seed"] = self.seed
        data["params"] = dict(sorted(self.params.items()))
        return data

    @property
    def fingerprint(self):
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def shot_params(self):
        overrides = {k: v for k, v in self.params.items() if k in SHOT_PARAMS}
        return ShotDetectParams.from_settings(seed=self.seed, **overrides)

    def motion_params(self, seed_offset=0):
        overrides = {
            MOTION_ALIASES.get(k, k): v
            for k, v in self.params.items()
            if k in MOTION_PARAMS or k in MOTION_ALIASES
        }
        return MotionParams.from_settings(seed=self.seed + seed_offset, **overrides)

    @property
    def aspect_tolerance(self):
        return self.params.get(
            "aspect_tolerance", settings.EDIT_TRANSFER_ASPECT_TOLERANCE
        )

    @property
    def min_framing_scale(self):
        return self.params.get(
            "min_framing_scale", settings.EDIT_TRANSFER_MIN_FRAMING_SCALE
        )

    @property
    def mosaic_max_area(self):
        return self.params.get(
            "mosaic_max_area", settings.EDIT_TRANSFER_MOSAIC_MAX_AREA
        )

    @property
    def salient_labels(self):
        return self.params.get("salient_labels", settings.EDIT_TRANSFER_SALIENT_LABELS)


def parse_override(item):
    """Split `key=value`; the value is read as JSON when it parses as such."""
    key, separator, raw = item.partition("=")
    key = key.strip()
    if not separator or not key:
        raise ConfigurationError(f"Override '{item}' is not of the form key=value")
    try:
        value = json.loads(raw)
    except ValueError:
        value = raw
    return key, value


def apply_overrides(data, overrides):
    data = dict(data)
    params = dict(data.get("params") or {})
    for item in overrides or []:
        key, value = parse_override(item)
        if key.startswith("params."):
            params[key[len("params.") :]] = value
        elif key in PATH_FIELDS or key == "seed":
            data[key] = value
        elif key in KNOWN_PARAMS:
            params[key] = value
        else:
            raise ConfigurationError(f"Unknown configuration key '{key}'")
    data["params"] = params
    return data


def _resolve(base, value):
    if value in (None, ""):
        return None
    path = Path(value).expanduser()
    return path if path.is_absolute() else (base / path).resolve()


def build_config(data, base_dir, seed=None):
    """Validate a raw config mapping; relative paths resolve against base_dir."""
    base_dir = Path(base_dir)
    for name in ("source", "repo_dir", "output_dir"):
        if not data.get(name):
            raise ConfigurationError(f"Configuration is missing '{name}'")

    unknown = set(data) - set(PATH_FIELDS) - {"seed", "params"}
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")
    params = data.get("params") or {}
    unknown = set(params) - KNOWN_PARAMS
    if unknown:
        raise ConfigurationError(f"Unknown parameters: {sorted(unknown)}")

    paths = {name: _resolve(base_dir, data.get(name)) for name in PATH_FIELDS}
    for name in ("source", "repo_dir", "annotations_dir", "speed_map"):
        path = paths[name]
        if path is not None and not path.exists():
            raise ConfigurationError(f"Configured {name} does not exist: {path}")

    try:
        seed = int(data.get("seed", 0) if seed is None else seed)
    except (TypeError, ValueError):
        raise ConfigurationError(f"Seed must be an integer, got {data.get('seed')!r}")

    config = ProjectConfig(seed=seed, params=dict(params), **paths)
    # surfaces invalid thresholds before any stage runs
    try:
        config.shot_params()
        config.motion_params()
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid parameter value: {e}")
    return config


def load_config(path, overrides=None, seed=None):
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"Configuration file not found: {path}")
    except ValueError as e:
        raise ConfigurationError(f"Configuration file {path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration file {path} must hold an object")
    data = apply_overrides(data, overrides)
    config = build_config(data, path.parent.resolve(), seed)
    logger.debug(f"Loaded configuration {path} ({config.fingerprint[:12]})")
    return config
