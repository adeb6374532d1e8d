"""
Projective two-view geometry: homographies, fundamental matrices and their
RANSAC estimators.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import (
    DegenerateConfigurationError,
    InsufficientInliersError,
    InsufficientPointsError,
    NonInvertibleHomographyError,
)

logger = logging.getLogger(__name__)

MIN_DETERMINANT = 1e-12
MIN_TRIANGLE_AREA = 1.0
HOMOGRAPHY_SAMPLE = 4
FUNDAMENTAL_SAMPLE = 8


@dataclass(frozen=True, eq=False)
class Homography:
    """
    A 3x3 projective transform acting on (x, y) pixel coordinates.

    The matrix is scaled so m[2][2] = 1 whenever that entry is nonzero, and
    is always invertible.
    """

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=np.float64).reshape(3, 3)
        if not np.all(np.isfinite(m)):
            raise NonInvertibleHomographyError("Homography has non-finite entries")
        if abs(m[2, 2]) > MIN_DETERMINANT:
            m = m / m[2, 2]
        if abs(np.linalg.det(m)) <= MIN_DETERMINANT:
            raise NonInvertibleHomographyError(
                f"Homography is not invertible (det={np.linalg.det(m):.3g})"
            )
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    @classmethod
    def translation(cls, dx, dy):
        return cls([[1, 0, dx], [0, 1, dy], [0, 0, 1]])

    @classmethod
    def scaling(cls, sx, sy=None, center=(0.0, 0.0)):
        sy = sx if sy is None else sy
        cx, cy = center
        return cls([[sx, 0, cx - sx * cx], [0, sy, cy - sy * cy], [0, 0, 1]])

    @classmethod
    def rotation(cls, degrees, center=(0.0, 0.0)):
        a = math.radians(degrees)
        c, s = math.cos(a), math.sin(a)
        cx, cy = center
        return cls(
            [
                [c, -s, cx - c * cx + s * cy],
                [s, c, cy - s * cx - c * cy],
                [0, 0, 1],
            ]
        )

    def __matmul__(self, other):
        return Homography(self.m @ other.m)

    def inverse(self):
        return Homography(np.linalg.inv(self.m))

    def apply(self, points):
        """Map an (n, 2) array of points; returns an (n, 2) array."""
        return apply_matrix(self.m, points)

    def is_identity(self, tolerance=1e-9):
        return bool(np.max(np.abs(self.m - np.eye(3))) <= tolerance)

    def to_list(self):
        return self.m.tolist()

    @classmethod
    def from_list(cls, values):
        return cls(np.array(values, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class FundamentalMatrix:
    """A rank-2 epipolar constraint x'^T F x = 0 with unit Frobenius norm."""

    m: np.ndarray

    def __post_init__(self):
        m = enforce_rank_two(np.array(self.m, dtype=np.float64).reshape(3, 3))
        norm = np.linalg.norm(m)
        if norm > 0:
            m = m / norm
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    def residuals(self, src, dst):
        return epipolar_residuals(self.m, src, dst)

    def sampson(self, src, dst):
        return sampson_distances(self.m, src, dst)


def to_homogeneous(points):
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    return np.hstack([points, np.ones((len(points), 1))])


def apply_matrix(m, points):
    points = to_homogeneous(points)
    mapped = points @ np.asarray(m).T
    w = mapped[:, 2:3]
    w = np.where(np.abs(w) < 1e-15, 1e-15, w)
    return mapped[:, :2] / w


def normalizing_transform(points):
    """Hartley normalization: centroid to origin, mean distance sqrt(2)."""
    centroid = points.mean(axis=0)
    mean_distance = np.linalg.norm(points - centroid, axis=1).mean()
    if mean_distance < 1e-12:
        raise DegenerateConfigurationError("All points coincide")
    s = math.sqrt(2) / mean_distance
    return np.array(
        [[s, 0, -s * centroid[0]], [0, s, -s * centroid[1]], [0, 0, 1]],
        dtype=np.float64,
    )


def _triangle_area(p, q, r):
    return 0.5 * abs((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def has_collinear_triple(points, min_area=MIN_TRIANGLE_AREA):
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                if _triangle_area(points[i], points[j], points[k]) < min_area:
                    return True
    return False


def solve_homography_dlt(src, dst):
    """Normalized DLT homography from four or more correspondences."""
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    t_src = normalizing_transform(src)
    t_dst = normalizing_transform(dst)
    s = apply_matrix(t_src, src)
    d = apply_matrix(t_dst, dst)

    n = len(s)
    a = np.zeros((2 * n, 9))
    x, y = s[:, 0], s[:, 1]
    u, v = d[:, 0], d[:, 1]
    a[0::2, 0] = -x
    a[0::2, 1] = -y
    a[0::2, 2] = -1
    a[0::2, 6] = u * x
    a[0::2, 7] = u * y
    a[0::2, 8] = u
    a[1::2, 3] = -x
    a[1::2, 4] = -y
    a[1::2, 5] = -1
    a[1::2, 6] = v * x
    a[1::2, 7] = v * y
    a[1::2, 8] = v

    _, singular, vt = np.linalg.svd(a)
    if singular[min(len(singular), 8) - 1] < 1e-10:
        raise DegenerateConfigurationError("DLT system is rank deficient")
    h = vt[-1].reshape(3, 3)
    m = np.linalg.inv(t_dst) @ h @ t_src
    return Homography(m)


def symmetric_transfer_errors(homography, src, dst):
    forward = np.linalg.norm(homography.apply(src) - dst, axis=1)
    backward = np.linalg.norm(homography.inverse().apply(dst) - src, axis=1)
    return np.sqrt(forward**2 + backward**2)


def _adaptive_iterations(inlier_ratio, sample_size, confidence, max_iters):
    if inlier_ratio <= 0:
        return max_iters
    if inlier_ratio >= 1:
        return 0
    denominator = math.log(1.0 - inlier_ratio**sample_size)
    if denominator >= 0:
        return max_iters
    return min(max_iters, int(math.ceil(math.log(1.0 - confidence) / denominator)))


def estimate_homography_ransac(
    src, dst, inlier_px=1.5, max_iters=1000, seed=0, confidence=0.99
):
    """
    Robust homography from point correspondences.

    Four-point DLT hypotheses are scored by inlier count under the
    symmetric transfer error; the winner is refined by normalized DLT over
    all of its inliers. Returns the homography and a boolean inlier mask.
    """
    src = np.asarray(src, dtype=np.float64).reshape(-1, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(-1, 2)
    n = len(src)
    if n < HOMOGRAPHY_SAMPLE or len(dst) != n:
        raise InsufficientPointsError(
            f"Homography needs at least {HOMOGRAPHY_SAMPLE} correspondences, got {n}"
        )

    rng = np.random.default_rng(seed)
    best, best_mask, best_count = None, None, 0
    iterations, limit = 0, max_iters
    while iterations < limit:
        iterations += 1
        sample = rng.choice(n, HOMOGRAPHY_SAMPLE, replace=False)
        if has_collinear_triple(src[sample]) or has_collinear_triple(dst[sample]):
            continue
        try:
            hypothesis = solve_homography_dlt(src[sample], dst[sample])
            errors = symmetric_transfer_errors(hypothesis, src, dst)
        except (DegenerateConfigurationError, NonInvertibleHomographyError):
            continue
        mask = errors < inlier_px
        count = int(mask.sum())
        if count > best_count:
            best, best_mask, best_count = hypothesis, mask, count
            limit = max(
                iterations,
                _adaptive_iterations(
                    count / n, HOMOGRAPHY_SAMPLE, confidence, max_iters
                ),
            )

    if best_mask is None:
        raise DegenerateConfigurationError(
            f"All {iterations} sampled minimal sets were degenerate"
        )
    if best_count < HOMOGRAPHY_SAMPLE:
        raise InsufficientInliersError(
            f"Best homography has {best_count} inliers, need {HOMOGRAPHY_SAMPLE}"
        )

    try:
        refined = solve_homography_dlt(src[best_mask], dst[best_mask])
        refined_mask = symmetric_transfer_errors(refined, src, dst) < inlier_px
    except (DegenerateConfigurationError, NonInvertibleHomographyError):
        refined, refined_mask = None, None
    if refined is None or refined_mask.sum() < best_count:
        refined = best
        refined_mask = best_mask
    if refined_mask.sum() < HOMOGRAPHY_SAMPLE:
        raise InsufficientInliersError("Refined homography lost its inliers")
    logger.debug(f"Homography: {int(refined_mask.sum())}/{n} inliers")
    return refined, refined_mask


def enforce_rank_two(m):
    u, s, vt = np.linalg.svd(m)
    s[2] = 0.0
    return u @ np.diag(s) @ vt


def solve_fundamental_eight_point(src, dst):
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    t_src = normalizing_transform(src)
    t_dst = normalizing_transform(dst)
    s = apply_matrix(t_src, src)
    d = apply_matrix(t_dst, dst)
    x, y = s[:, 0], s[:, 1]
    u, v = d[:, 0], d[:, 1]
    a = np.stack(
        [u * x, u * y, u, v * x, v * y, v, x, y, np.ones_like(x)], axis=1
    )
    _, _, vt = np.linalg.svd(a)
    f = enforce_rank_two(vt[-1].reshape(3, 3))
    return FundamentalMatrix(t_dst.T @ f @ t_src)


def epipolar_residuals(f, src, dst):
    x = to_homogeneous(src)
    x_prime = to_homogeneous(dst)
    return np.einsum("ij,jk,ik->i", x_prime, f, x)


def sampson_distances(f, src, dst):
    """First-order geometric error of each correspondence, in pixels."""
    x = to_homogeneous(src)
    x_prime = to_homogeneous(dst)
    fx = x @ f.T
    ftx = x_prime @ f
    numerator = np.einsum("ij,ij->i", x_prime, fx) ** 2
    denominator = fx[:, 0] ** 2 + fx[:, 1] ** 2 + ftx[:, 0] ** 2 + ftx[:, 1] ** 2
    denominator = np.maximum(denominator, 1e-18)
    return np.sqrt(numerator / denominator)


def estimate_fundamental_ransac(
    src, dst, inlier_px=2.0, max_iters=1000, seed=0, confidence=0.99
):
    """
    Robust fundamental matrix from point correspondences.

    Normalized eight-point hypotheses are scored by Sampson distance; the
    winner is re-estimated from all its inliers when that keeps at least as
    many inliers.
    """
    src = np.asarray(src, dtype=np.float64).reshape(-1, 2)
    dst = np.asarray(dst, dtype=np.float64).reshape(-1, 2)
    n = len(src)
    if n < FUNDAMENTAL_SAMPLE or len(dst) != n:
        raise InsufficientPointsError(
            f"Fundamental matrix needs at least {FUNDAMENTAL_SAMPLE} "
            f"correspondences, got {n}"
        )

    rng = np.random.default_rng(seed)
    best, best_mask, best_count = None, None, 0
    iterations, limit = 0, max_iters
    while iterations < limit:
        iterations += 1
        sample = rng.choice(n, FUNDAMENTAL_SAMPLE, replace=False)
        try:
            hypothesis = solve_fundamental_eight_point(src[sample], dst[sample])
        except DegenerateConfigurationError:
            continue
        mask = hypothesis.sampson(src, dst) < inlier_px
        count = int(mask.sum())
        if count > best_count:
            best, best_mask, best_count = hypothesis, mask, count
            limit = max(
                iterations,
                _adaptive_iterations(
                    count / n, FUNDAMENTAL_SAMPLE, confidence, max_iters
                ),
            )

    if best is None or best_count < FUNDAMENTAL_SAMPLE:
        raise InsufficientInliersError(
            f"Best fundamental matrix has {best_count} inliers, "
            f"need {FUNDAMENTAL_SAMPLE}"
        )

    try:
        refined = solve_fundamental_eight_point(src[best_mask], dst[best_mask])
        refined_mask = refined.sampson(src, dst) < inlier_px
        if refined_mask.sum() >= best_count:
            best, best_mask = refined, refined_mask
    except DegenerateConfigurationError:
        pass
    return best, best_mask
