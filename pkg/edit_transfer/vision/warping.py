import numpy as np

from .geometry import apply_matrix

# sample positions this close outside the image still count as inside
EDGE_TOLERANCE = 1e-6


def inverse_map(pixels, m, out_size):
    """
    Resample `pixels` onto an `out_size` (width, height) grid.

    Every output pixel (x, y) is mapped through the 3x3 matrix `m` to a
    source location and sampled bilinearly. Returns the float samples and a
    mask of output pixels whose source location lies inside the image; the
    rest are zero.
    """
    pixels = np.asarray(pixels)
    src_h, src_w = pixels.shape[:2]
    out_w, out_h = out_size
    ys, xs = np.mgrid[0:out_h, 0:out_w]
    grid = np.stack([xs.ravel(), ys.ravel()], axis=1).astype(np.float64)
    mapped = apply_matrix(m, grid)
    sx = mapped[:, 0].reshape(out_h, out_w)
    sy = mapped[:, 1].reshape(out_h, out_w)

    valid = (
        (sx >= -EDGE_TOLERANCE)
        & (sx <= src_w - 1 + EDGE_TOLERANCE)
        & (sy >= -EDGE_TOLERANCE)
        & (sy <= src_h - 1 + EDGE_TOLERANCE)
    )
    sx = np.clip(np.where(valid, sx, 0.0), 0, src_w - 1)
    sy = np.clip(np.where(valid, sy, 0.0), 0, src_h - 1)
    x0 = np.minimum(np.floor(sx).astype(np.int64), max(src_w - 2, 0))
    y0 = np.minimum(np.floor(sy).astype(np.int64), max(src_h - 2, 0))
    x1 = np.minimum(x0 + 1, src_w - 1)
    y1 = np.minimum(y0 + 1, src_h - 1)
    fx = (sx - x0)[..., None]
    fy = (sy - y0)[..., None]

    source = pixels.astype(np.float64)
    if source.ndim == 2:
        source = source[..., None]
    top = source[y0, x0] * (1 - fx) + source[y0, x1] * fx
    bottom = source[y1, x0] * (1 - fx) + source[y1, x1] * fx
    samples = top * (1 - fy) + bottom * fy
    samples[~valid] = 0.0
    if pixels.ndim == 2:
        samples = samples[..., 0]
    return samples, valid


def warp_pixels(pixels, m, out_size):
    """Inverse-mapped bilinear warp to uint8 with a black fill."""
    samples, valid = inverse_map(pixels, m, out_size)
    return np.clip(np.rint(samples), 0, 255).astype(np.uint8), valid
