from .alignment import Alignment, align_homography
from .descriptors import DescriptorSet, describe, hamming, hamming_matrix
from .geometry import (
    FundamentalMatrix,
    Homography,
    estimate_fundamental_ransac,
    estimate_homography_ransac,
)
from .keypoints import Keypoint, fast_detect, keypoint_array
from .matching import MatchSet, match
from .warping import inverse_map, warp_pixels

__all__ = [
    "Alignment",
    "DescriptorSet",
    "FundamentalMatrix",
    "Homography",
    "Keypoint",
    "MatchSet",
    "align_homography",
    "describe",
    "estimate_fundamental_ransac",
    "estimate_homography_ransac",
    "fast_detect",
    "hamming",
    "hamming_matrix",
    "inverse_map",
    "keypoint_array",
    "match",
    "warp_pixels",
]
