"""CIELAB color descriptors: histograms, lightness stretching, binarization.

Pixels are converted from sRGB to an 8-bit encoded Lab (L scaled to
[0, 255], a/b offset by +128) so every channel feeds a 256-bin histogram.
Channel histograms are reduced to 64 bins, the L histogram is "stretched"
to absorb illumination drift, and each histogram is binarized against
1.5x its mean bin count. A class whose raw L histogram piles more than 1%
of its pixels into the last bin is flagged over-highlighted and takes no
part in similarity estimation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_BINS_RAW = 256
N_BINS = 64
BIN_FOLD = N_BINS_RAW // N_BINS  # 4 raw bins sum into one reduced bin

# Threshold multiplier over the mean bin count for binarization.
K_INC = 1.5

# Over-highlight rule: raw L bin 255 holding more than this fraction of
# the class pixels makes the lightness histogram unreliable.
OVER_HIGHLIGHT_FRACTION = 0.01

# sRGB (D65) -> XYZ matrix, IEC 61966-2-1.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_WHITE_D65 = np.array([0.95047, 1.0, 1.08883])
_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0


@dataclass
class ChannelHistogram:
    """64-bin reduced histogram of one encoded Lab channel."""

    channel: str  # "L", "a" or "b"
    bins: np.ndarray  # float64[64], non-negative counts
    n_pixels: int


@dataclass
class BinarizedHistogram:
    """Thresholded 64-bin histogram: bit j set iff bin j >= threshold."""

    channel: str
    bits: np.ndarray  # bool[64]
    threshold_used: float


@dataclass
class LabMean:
    """Per-channel mean of encoded intensities, each in [0, 255]."""

    l: float
    a: float
    b: float

    def as_array(self) -> np.ndarray:
        return np.array([self.l, self.a, self.b], dtype=np.float64)


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Convert 8-bit sRGB pixels to 8-bit encoded Lab.

    Accepts any (..., 3) uint8 array and returns the same shape, with
    L mapped from [0, 100] to [0, 255], a and b offset by +128, each
    rounded to the nearest integer and clamped to [0, 255].
    """
    rgb = np.asarray(rgb)
    srgb = rgb.astype(np.float64) / 255.0
    linear = np.where(srgb <= 0.04045, srgb / 12.92, ((srgb + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE_D65
    f = np.where(t > _LAB_EPS, np.cbrt(t), (_LAB_KAPPA * t + 16.0) / 116.0)
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return encode_lab(lab)


def encode_lab(lab: np.ndarray) -> np.ndarray:
    """Pack native Lab floats into the 8-bit encoding used everywhere here."""
    enc = np.empty_like(lab)
    enc[..., 0] = lab[..., 0] * 255.0 / 100.0
    enc[..., 1] = lab[..., 1] + 128.0
    enc[..., 2] = lab[..., 2] + 128.0
    return np.clip(np.rint(enc), 0, 255).astype(np.uint8)


def decode_lab(enc: np.ndarray) -> np.ndarray:
    """Inverse of the 8-bit packing: back to native Lab units (floats)."""
    enc = np.asarray(enc, dtype=np.float64)
    out = np.empty_like(enc)
    out[..., 0] = enc[..., 0] / 2.55
    out[..., 1] = enc[..., 1] - 128.0
    out[..., 2] = enc[..., 2] - 128.0
    return out


def lab_to_rgb(lab: np.ndarray) -> np.ndarray:
    """Native Lab floats back to 8-bit sRGB (gamut-clipped).

    Not part of the descriptor pipeline; used to render synthetic data and
    inspection figures from Lab-space colors.
    """
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0

    def _finv(f: np.ndarray) -> np.ndarray:
        f3 = f**3
        return np.where(f3 > _LAB_EPS, f3, (116.0 * f - 16.0) / _LAB_KAPPA)

    xyz = np.stack([_finv(fx), _finv(fy), _finv(fz)], axis=-1) * _WHITE_D65
    linear = np.clip(xyz @ _XYZ_TO_RGB.T, 0.0, 1.0)
    srgb = np.where(
        linear <= 0.0031308, 12.92 * linear, 1.055 * linear ** (1.0 / 2.4) - 0.055
    )
    return np.clip(np.rint(srgb * 255.0), 0, 255).astype(np.uint8)


def raw_histogram(values: np.ndarray) -> np.ndarray:
    """256-bin count histogram of 8-bit intensities."""
    return np.bincount(np.asarray(values).ravel(), minlength=N_BINS_RAW).astype(
        np.float64
    )


def build_histogram(values: np.ndarray, channel: str) -> ChannelHistogram:
    """Histogram 8-bit intensities and fold 256 bins into 64 by summation.

    Summing groups of four conserves pixel counts; the constant factor
    against a per-bin mean cancels in every downstream threshold and ratio.
    """
    values = np.asarray(values)
    if values.size == 0:
        raise ValueError("cannot build a histogram from an empty pixel list")
    raw = raw_histogram(values)
    return ChannelHistogram(
        channel=channel,
        bins=reduce_bins(raw),
        n_pixels=int(values.size),
    )


def reduce_bins(raw: np.ndarray) -> np.ndarray:
    """Fold a 256-bin histogram into 64 bins by summing groups of four."""
    return np.asarray(raw, dtype=np.float64).reshape(N_BINS, BIN_FOLD).sum(axis=1)


def check_over_highlight(raw_l_hist: np.ndarray, n_pixels: int) -> bool:
    """True iff the raw (pre-reduction) L bin 255 exceeds 1% of all pixels.

    Strictly "exceeds": a bin holding exactly 1% does not trip the flag.
    """
    return float(raw_l_hist[N_BINS_RAW - 1]) > OVER_HIGHLIGHT_FRACTION * n_pixels


def stretch_l(hist: ChannelHistogram) -> ChannelHistogram:
    """Stretch a 64-bin L histogram so illumination drift widens peaks.

    Steps: zero every bin below the histogram average, recompute the
    average, then from the peak bin walk outward in both directions; each
    visited bin holding more than the new average sheds half its excess,
    a quarter of it into each of the next four bins along the walk
    (deposits past either edge pile onto the edge bin so mass is
    conserved). Finally the first and last non-zero bins are zeroed.
    The walk updates in place, so shed mass cascades outward.
    """
    h = hist.bins.astype(np.float64).copy()
    h_av = h.sum() / N_BINS
    h[h < h_av] = 0.0
    new_av = h.sum() / N_BINS

    m = int(np.argmax(h))
    for i in range(m, N_BINS):  # upward, peak included
        if h[i] > new_av:
            excess = 0.5 * (h[i] - new_av)
            h[i] -= excess
            quarter = 0.25 * excess
            for step in range(1, 5):
                h[min(i + step, N_BINS - 1)] += quarter
    for i in range(m, -1, -1):  # mirrored pass toward lower bins
        if h[i] > new_av:
            excess = 0.5 * (h[i] - new_av)
            h[i] -= excess
            quarter = 0.25 * excess
            for step in range(1, 5):
                h[max(i - step, 0)] += quarter

    nonzero = np.flatnonzero(h)
    if nonzero.size:
        h[nonzero[0]] = 0.0
        h[nonzero[-1]] = 0.0
    return ChannelHistogram(channel=hist.channel, bins=h, n_pixels=hist.n_pixels)


def remove_shadow_peak(hist: ChannelHistogram) -> ChannelHistogram:
    """Experimental: zero a distinct low-lightness peak preceding the main one.

    Local shadows often show up as a separate peak below the dominant color's
    peak. This heuristic finds the valley between the two and clears
    everything below it. Known to hurt on dark or low-resolution inputs;
    disabled by default and excluded from acceptance checks.
    """
    h = hist.bins.astype(np.float64).copy()
    main = int(np.argmax(h))
    if main == 0 or h[main] <= 0:
        return ChannelHistogram(hist.channel, h, hist.n_pixels)
    below = h[:main]
    pre_peak = int(np.argmax(below))
    if below[pre_peak] <= 0 or below[pre_peak] >= h[main]:
        return ChannelHistogram(hist.channel, h, hist.n_pixels)
    valley = pre_peak + int(np.argmin(h[pre_peak : main + 1]))
    if h[valley] < below[pre_peak]:  # a genuine dip separates the peaks
        h[: valley + 1] = 0.0
    return ChannelHistogram(hist.channel, h, hist.n_pixels)


def binarize(hist: ChannelHistogram, k_inc: float = K_INC) -> BinarizedHistogram:
    """Mark bins holding at least k_inc times the mean bin count.

    The threshold scales with the histogram mass, so the resulting bits are
    invariant to uniform rescaling of the counts. An all-zero histogram
    binarizes to all-zero bits.
    """
    total = float(hist.bins.sum())
    if total <= 0.0:
        return BinarizedHistogram(
            channel=hist.channel,
            bits=np.zeros(N_BINS, dtype=bool),
            threshold_used=0.0,
        )
    threshold = k_inc * total / N_BINS
    return BinarizedHistogram(
        channel=hist.channel,
        bits=hist.bins >= threshold,
        threshold_used=threshold,
    )


def lab_mean(encoded_pixels: np.ndarray) -> LabMean:
    """Arithmetic mean of encoded Lab triplets (pixel-count weighted).

    Equivalent to the intensity-weighted average over the unreduced
    histogram, since each pixel contributes its own bin index.
    """
    px = np.asarray(encoded_pixels, dtype=np.float64)
    if px.size == 0:
        raise ValueError("cannot average an empty pixel list")
    mean = px.reshape(-1, 3).mean(axis=0)
    return LabMean(l=float(mean[0]), a=float(mean[1]), b=float(mean[2]))


def bits_to_hex(bits: np.ndarray) -> str:
    """Pack 64 bits into 16 hex digits, bin 0 as the most significant bit."""
    value = 0
    for bit in np.asarray(bits, dtype=bool):
        value = (value << 1) | int(bit)
    return f"{value:016x}"


def hex_to_bits(hexmask: str) -> np.ndarray:
    """Inverse of bits_to_hex."""
    value = int(hexmask, 16)
    return np.array([(value >> (63 - j)) & 1 for j in range(N_BINS)], dtype=bool)


def bits_to_u64(bits: np.ndarray) -> np.uint64:
    """Same packing as bits_to_hex, as a numpy uint64 for vectorized scoring."""
    return np.uint64(int(bits_to_hex(bits), 16))
