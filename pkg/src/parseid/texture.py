"""Rotation-invariant local binary pattern descriptors per parsing class.

Every interior pixel of the grayscale image gets an 8-bit code comparing
it with its ring of eight neighbors; the code is canonicalized to the
minimum over all circular shifts, which absorbs image rotation. Each class
contributes two normalized 256-bin histograms, one over its contour pixels
and one over its inner area, compared by histogram intersection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_CODES = 256

# Neighbor ring, clockwise from the top-left pixel: bit k of the raw code
# is set when neighbor k is strictly brighter than the center.
_NEIGHBOR_OFFSETS = (
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
)


def _rotation_min_table() -> np.ndarray:
    table = np.empty(N_CODES, dtype=np.uint8)
    for code in range(N_CODES):
        best = code
        c = code
        for _ in range(7):
            c = ((c >> 1) | ((c & 1) << 7)) & 0xFF
            if c < best:
                best = c
        table[code] = best
    return table


ROTATION_MIN = _rotation_min_table()

# The 36 canonical (shift-minimal) 8-bit codes; only these bins can be hit.
MIN_CODES = np.unique(ROTATION_MIN)
MIN_CODE_RANK = {int(c): i for i, c in enumerate(MIN_CODES)}


@dataclass
class LbpHistogram:
    """Normalized LBP code distribution over a class region.

    bins sum to 1 when any code contributed, and are all zero otherwise.
    Indexing keeps the full 256 slots so bin index == code value; only the
    36 shift-minimal codes can be populated.
    """

    region: str  # "contour" or "inner"
    bins: np.ndarray  # float64[256]
    n_codes: int


def grayscale(rgb: np.ndarray) -> np.ndarray:
    """8-bit luma: round(0.299 R + 0.587 G + 0.114 B)."""
    rgb = np.asarray(rgb, dtype=np.float64)
    gray = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.rint(gray).astype(np.uint8)


def lbp_code(gray: np.ndarray, row: int, col: int) -> int:
    """Rotation-minimal LBP code of one interior pixel.

    The pixel must have all eight neighbors inside the raster.
    """
    h, w = gray.shape
    if not (1 <= row <= h - 2 and 1 <= col <= w - 2):
        raise ValueError(f"pixel ({row}, {col}) has neighbors outside the raster")
    center = gray[row, col]
    code = 0
    for k, (dr, dc) in enumerate(_NEIGHBOR_OFFSETS):
        if gray[row + dr, col + dc] > center:
            code |= 1 << k
    return int(ROTATION_MIN[code])


def lbp_code_map(gray: np.ndarray) -> np.ndarray:
    """Rotation-minimal codes for every interior pixel, 0 on the border ring.

    Border pixels have no valid neighborhood; callers must exclude them by
    position, not by code value (interior flat pixels legitimately code 0).
    """
    gray = np.asarray(gray)
    h, w = gray.shape
    codes = np.zeros((h, w), dtype=np.uint8)
    if h < 3 or w < 3:
        return codes
    center = gray[1:-1, 1:-1]
    raw = np.zeros((h - 2, w - 2), dtype=np.uint8)
    for k, (dr, dc) in enumerate(_NEIGHBOR_OFFSETS):
        neighbor = gray[1 + dr : h - 1 + dr, 1 + dc : w - 1 + dc]
        raw |= (neighbor > center).astype(np.uint8) << k
    codes[1:-1, 1:-1] = ROTATION_MIN[raw]
    return codes


def split_contour_inner(region: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partition a boolean region mask into contour and inner masks.

    A region pixel is contour when any of its 4-neighbors is outside the
    region (pixels beyond the raster count as outside, so raster-border
    region pixels are always contour). The two masks partition the region.
    """
    region = np.asarray(region, dtype=bool)
    padded = np.pad(region, 1, constant_values=False)
    surrounded = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    inner = region & surrounded
    contour = region & ~inner
    return contour, inner


def _region_histogram(code_map: np.ndarray, region: np.ndarray, kind: str) -> LbpHistogram:
    h, w = code_map.shape
    valid = region.copy()
    valid[0, :] = False
    valid[-1, :] = False
    valid[:, 0] = False
    valid[:, -1] = False
    codes = code_map[valid]
    n = int(codes.size)
    bins = np.zeros(N_CODES, dtype=np.float64)
    if n:
        counts = np.bincount(codes, minlength=N_CODES)
        bins = counts / n
    return LbpHistogram(region=kind, bins=bins, n_codes=n)


def lbp_histograms(
    gray: np.ndarray | None, region: np.ndarray, code_map: np.ndarray | None = None
) -> tuple[LbpHistogram, LbpHistogram]:
    """Contour and inner LBP histograms of one class region.

    Codes are taken from the full-image map, so neighborhoods may cross the
    class boundary: the contour's texture is exactly that transition.
    Region pixels on the raster border contribute no code; a region made
    only of border pixels yields all-zero histograms. Callers extracting
    many classes from one image pass a precomputed code_map; gray may then
    be None.
    """
    if code_map is None:
        if gray is None:
            raise ValueError("either gray or code_map must be given")
        code_map = lbp_code_map(gray)
    contour, inner = split_contour_inner(region)
    return (
        _region_histogram(code_map, contour, "contour"),
        _region_histogram(code_map, inner, "inner"),
    )


def texture_similarity(h1: LbpHistogram, h2: LbpHistogram) -> float | None:
    """Histogram intersection of two normalized LBP histograms, in [0, 1].

    Returns None (channel absent) when either side collected no codes.
    """
    if h1.n_codes == 0 or h2.n_codes == 0:
        return None
    # the sum of minima of two unit-mass histograms is <= 1 exactly; cap the
    # couple of ulps the float summation can add on near-identical inputs
    return min(1.0, float(np.minimum(h1.bins, h2.bins).sum()))


def lbp_bins_to_dense36(bins: np.ndarray) -> np.ndarray:
    """Project the 256-slot histogram onto the 36 canonical-code slots."""
    return np.asarray(bins, dtype=np.float64)[MIN_CODES]


def dense36_to_lbp_bins(dense: np.ndarray) -> np.ndarray:
    bins = np.zeros(N_CODES, dtype=np.float64)
    bins[MIN_CODES] = np.asarray(dense, dtype=np.float64)
    return bins
