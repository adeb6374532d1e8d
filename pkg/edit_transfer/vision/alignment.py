"""
Direct image alignment: Gauss-Newton refinement of a homography on pixel
intensities.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..exceptions import AlignmentError, NonInvertibleHomographyError
from .geometry import Homography, apply_matrix
from .warping import inverse_map

logger = logging.getLogger(__name__)

PRESMOOTH_SIGMA = 1.0
# pixels this close to an image edge are shaped by the smoothing padding
BORDER = 4
MAX_ITERATIONS = 20
CONVERGED_SHIFT = 1e-3
MAX_SAMPLES = 65_536
MIN_SAMPLES = 200
HUBER_K = 1.345
MASK_EPSILON = 1e-6


@dataclass(frozen=True, eq=False)
class Alignment:
    """
    `homography` maps image pixel coordinates into the reference; `overlap`
    is the share of usable image pixels that landed inside the reference.
    """

    homography: Homography
    rms: float
    overlap: float
    iterations: int


def _normalizer(width, height):
    scale = max(width, height) / 2
    cx, cy = (width - 1) / 2, (height - 1) / 2
    m = np.array([[1 / scale, 0, -cx / scale], [0, 1 / scale, -cy / scale], [0, 0, 1]])
    return m, scale


def _interior(height, width):
    mask = np.zeros((height, width), dtype=bool)
    mask[BORDER : height - BORDER, BORDER : width - BORDER] = True
    return mask


def _huber_weights(residuals):
    spread = 1.4826 * np.median(np.abs(residuals - np.median(residuals)))
    if spread < 1e-9:
        return np.ones_like(residuals)
    u = np.abs(residuals) / (HUBER_K * spread)
    return np.where(u <= 1, 1.0, 1.0 / np.maximum(u, 1e-12))


def corner_shift(m, width, height):
    """Largest displacement of a width x height frame's corners under `m`."""
    corners = np.array(
        [[0, 0], [width, 0], [width, height], [0, height]], dtype=np.float64
    )
    return float(np.abs(apply_matrix(m, corners) - corners).max())


def align_homography(
    reference,
    image,
    initial,
    reference_mask=None,
    image_mask=None,
    max_iterations=MAX_ITERATIONS,
):
    """
    Refine `initial`, which maps `image` pixel coordinates into `reference`,
    by minimizing reference(H p) - (gain * image(p) + bias) over the image
    pixels that land inside the reference.

    Both images are 2-D intensity arrays and both are smoothed before
    alignment. Pixels set in either mask are left out. Residuals are Huber
    weighted, and the photometric gain and bias are solved together with
    the eight homography parameters.
    """
    ref = ndimage.gaussian_filter(
        np.asarray(reference, dtype=np.float64), PRESMOOTH_SIGMA
    )
    img = ndimage.gaussian_filter(np.asarray(image, dtype=np.float64), PRESMOOTH_SIGMA)
    height, width = img.shape

    keep = _interior(height, width)
    if image_mask is not None:
        keep &= ~np.asarray(image_mask, dtype=bool)
    step = max(1, math.ceil(math.sqrt(height * width / MAX_SAMPLES)))
    grid = np.zeros_like(keep)
    grid[::step, ::step] = True
    ys, xs = np.nonzero(keep & grid)
    total = len(xs)
    if total < MIN_SAMPLES:
        raise AlignmentError(f"Only {total} pixels are available for alignment")

    channels = [ref, _interior(*ref.shape).astype(np.float64)]
    if reference_mask is not None:
        channels.append(np.asarray(reference_mask, dtype=np.float64))
    stack = np.dstack(channels)

    normalize, scale = _normalizer(width, height)
    denormalize = np.linalg.inv(normalize)
    xn = (xs - (width - 1) / 2) / scale
    yn = (ys - (height - 1) / 2) / scale
    intensities = img[ys, xs]

    homography = initial
    gain, bias = 1.0, 0.0
    rms, count, iteration = math.inf, 0, 0
    for iteration in range(1, max_iterations + 1):
        warped, inside = inverse_map(stack, homography.m, (width, height))
        usable = inside & (warped[..., 1] > 1 - MASK_EPSILON)
        if reference_mask is not None:
            usable &= warped[..., 2] <= MASK_EPSILON
        usable = ndimage.binary_erosion(usable)[ys, xs]
        count = int(usable.sum())
        if count < MIN_SAMPLES:
            raise AlignmentError(f"Only {count} pixels overlap the reference")

        grad_y, grad_x = np.gradient(warped[..., 0])
        gx = grad_x[ys, xs][usable]
        gy = grad_y[ys, xs][usable]
        x, y = xn[usable], yn[usable]
        values = intensities[usable]
        residuals = warped[..., 0][ys, xs][usable] - gain * values - bias
        rms = float(np.sqrt(np.mean(residuals**2)))

        radial = gx * x + gy * y
        jacobian = np.stack(
            [
                scale * gx * x,
                scale * gx * y,
                scale * gx,
                scale * gy * x,
                scale * gy * y,
                scale * gy,
                -scale * x * radial,
                -scale * y * radial,
                -values,
                -np.ones_like(values),
            ],
            axis=1,
        )
        weights = np.sqrt(_huber_weights(residuals))
        update, *_ = np.linalg.lstsq(
            jacobian * weights[:, None], -residuals * weights, rcond=None
        )
        if not np.all(np.isfinite(update)):
            raise AlignmentError("Alignment diverged")

        a = update[:8]
        delta = np.array(
            [[1 + a[0], a[1], a[2]], [a[3], 1 + a[4], a[5]], [a[6], a[7], 1.0]]
        )
        change = denormalize @ delta @ normalize
        try:
            homography = homography @ Homography(change)
        except NonInvertibleHomographyError as e:
            raise AlignmentError(f"Alignment diverged: {e}")
        gain += update[8]
        bias += update[9]
        if corner_shift(change, width, height) < CONVERGED_SHIFT:
            break

    logger.debug(
        f"Aligned in {iteration} iterations, rms {rms:.3f} over {count} pixels"
    )
    return Alignment(homography, rms, count / total, iteration)
