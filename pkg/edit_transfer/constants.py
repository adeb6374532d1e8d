from django.db import models
from django.utils.translation import gettext_lazy as _


class Transition(models.TextChoices):
    HARD_CUT = "hard_cut", _("Hard cut")
    FADE = "fade", _("Fade")


class ContentCategory(models.TextChoices):
    SINGLE_FOCUS = "single_focus", _("Single focus")
    MULTI_SUBJECT = "multi_subject", _("Multi subject")
    BACKGROUND = "background", _("Background")


HISTOGRAM_BINS_PER_CHANNEL = 8
HISTOGRAM_BINS = HISTOGRAM_BINS_PER_CHANNEL**3

DESCRIPTOR_BITS = 256
DESCRIPTOR_BYTES = DESCRIPTOR_BITS // 8
DESCRIPTOR_BORDER = 16
EXHAUSTIVE_MATCH_LIMIT = 2000

FRAMING_SEARCH_ITERATIONS = 20
FRAMING_SEARCH_TOLERANCE = 1e-4

# a shot's motion is marked failed when more than this share of steps fell back
MOTION_FAILURE_RATIO = 0.5
# a keyframe is replaced once less than this share of a frame overlaps it
KEYFRAME_OVERLAP = 0.6

SHOTS_FILENAME = "shots.json"
STYLES_FILENAME = "styles.json"
INDEX_FILENAME = "index.json"
PLAN_FILENAME = "plan.json"
OUTPUT_FILENAME = "output.y4m"
TIMELINE_FILENAME = "timeline.json"
SIDE_BY_SIDE_FILENAME = "side_by_side.y4m"
REVIEW_PDF_FILENAME = "review.pdf"
LOCK_FILENAME = ".edit_transfer.lock"
