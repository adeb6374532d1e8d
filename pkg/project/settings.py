from os import path
from pathlib import Path

import environ

env = environ.Env(
    DEBUG=(bool, False),
    DJANGO_SECRET_KEY=(str, "edit-transfer-local"),
    LOG_LEVEL=(str, "INFO"),
    EDIT_TRANSFER_CUT_THRESHOLD=(float, 0.5),
    EDIT_TRANSFER_FADE_WINDOW=(int, 12),
    EDIT_TRANSFER_FADE_THRESHOLD=(float, 0.4),
    EDIT_TRANSFER_MIN_SHOT_LEN=(int, 8),
    EDIT_TRANSFER_SCENE_MATCH_THRESHOLD=(int, 15),
    EDIT_TRANSFER_FAST_THRESHOLD=(int, 20),
    EDIT_TRANSFER_MAX_KEYPOINTS=(int, 500),
    EDIT_TRANSFER_MATCH_RATIO=(float, 0.8),
    EDIT_TRANSFER_RANSAC_INLIER_PX=(float, 1.5),
    EDIT_TRANSFER_FUNDAMENTAL_INLIER_PX=(float, 2.0),
    EDIT_TRANSFER_RANSAC_MAX_ITERS=(int, 1000),
    EDIT_TRANSFER_RANSAC_CONFIDENCE=(float, 0.99),
    EDIT_TRANSFER_MOTION_STRIDE=(int, 1),
    EDIT_TRANSFER_MOTION_REFINE=(bool, True),
    EDIT_TRANSFER_SALIENT_LABELS=(list, ["person", "face"]),
    EDIT_TRANSFER_SINGLE_FOCUS_MIN=(float, 0.5),
    EDIT_TRANSFER_MULTI_SUBJECT_MIN=(float, 2.0),
    EDIT_TRANSFER_LABEL_SAMPLES=(int, 5),
    EDIT_TRANSFER_MOSAIC_MAX_AREA=(int, 16_000_000),
    EDIT_TRANSFER_MIN_FRAMING_SCALE=(float, 0.05),
    EDIT_TRANSFER_ASPECT_TOLERANCE=(float, 0.01),
)

if path.exists(".env"):
    environ.Env().read_env(".env")

BASE_DIR = Path(__file__).resolve().parent.parent
DEBUG = env("DEBUG")
SECRET_KEY = env("DJANGO_SECRET_KEY")

INSTALLED_APPS = [
    "edit_transfer",
]

# the pipeline persists its state as files, not database rows
DATABASES = {}

LOCALE_PATHS = [path.join(BASE_DIR, "locale")]

LANGUAGE_CODE = "en"

TIME_ZONE = "UTC"

USE_I18N = True

USE_L10N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Shot detection
EDIT_TRANSFER_CUT_THRESHOLD = env("EDIT_TRANSFER_CUT_THRESHOLD")
EDIT_TRANSFER_FADE_WINDOW = env("EDIT_TRANSFER_FADE_WINDOW")
EDIT_TRANSFER_FADE_THRESHOLD = env("EDIT_TRANSFER_FADE_THRESHOLD")
EDIT_TRANSFER_MIN_SHOT_LEN = env("EDIT_TRANSFER_MIN_SHOT_LEN")
EDIT_TRANSFER_SCENE_MATCH_THRESHOLD = env("EDIT_TRANSFER_SCENE_MATCH_THRESHOLD")

# Keypoints, matching and RANSAC
EDIT_TRANSFER_FAST_THRESHOLD = env("EDIT_TRANSFER_FAST_THRESHOLD")
EDIT_TRANSFER_MAX_KEYPOINTS = env("EDIT_TRANSFER_MAX_KEYPOINTS")
EDIT_TRANSFER_MATCH_RATIO = env("EDIT_TRANSFER_MATCH_RATIO")
EDIT_TRANSFER_RANSAC_INLIER_PX = env("EDIT_TRANSFER_RANSAC_INLIER_PX")
EDIT_TRANSFER_FUNDAMENTAL_INLIER_PX = env("EDIT_TRANSFER_FUNDAMENTAL_INLIER_PX")
EDIT_TRANSFER_RANSAC_MAX_ITERS = env("EDIT_TRANSFER_RANSAC_MAX_ITERS")
EDIT_TRANSFER_RANSAC_CONFIDENCE = env("EDIT_TRANSFER_RANSAC_CONFIDENCE")
EDIT_TRANSFER_MOTION_STRIDE = env("EDIT_TRANSFER_MOTION_STRIDE")
EDIT_TRANSFER_MOTION_REFINE = env("EDIT_TRANSFER_MOTION_REFINE")

# Content labels
EDIT_TRANSFER_SALIENT_LABELS = env.list("EDIT_TRANSFER_SALIENT_LABELS")
EDIT_TRANSFER_SINGLE_FOCUS_MIN = env("EDIT_TRANSFER_SINGLE_FOCUS_MIN")
EDIT_TRANSFER_MULTI_SUBJECT_MIN = env("EDIT_TRANSFER_MULTI_SUBJECT_MIN")
EDIT_TRANSFER_LABEL_SAMPLES = env("EDIT_TRANSFER_LABEL_SAMPLES")

# Rendering
EDIT_TRANSFER_MOSAIC_MAX_AREA = env("EDIT_TRANSFER_MOSAIC_MAX_AREA")
EDIT_TRANSFER_MIN_FRAMING_SCALE = env("EDIT_TRANSFER_MIN_FRAMING_SCALE")
EDIT_TRANSFER_ASPECT_TOLERANCE = env("EDIT_TRANSFER_ASPECT_TOLERANCE")

LOG_LEVEL = env("LOG_LEVEL")
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "%(levelname)s %(asctime)s %(module)s %(process)d %(message)s"
        },
        "simple": {"format": "%(levelname)s %(asctime)s %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "loggers": {
        "django": {"handlers": ["console"], "level": "INFO"},
        "edit_transfer": {"handlers": ["console"], "level": LOG_LEVEL},
    },
}
