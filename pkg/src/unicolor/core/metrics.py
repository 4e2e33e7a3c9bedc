"""Reference image metrics: colorfulness, PSNR and SSIM.

Colorfulness is the Hasler-Susstrunk opponent-channel statistic computed on
the 0-255 channel scale, so scores are directly comparable with the values
commonly reported for colorization models.  PSNR and SSIM follow their
standard definitions on [0, 1] images; SSIM uses the 11x11 Gaussian window
(sigma 1.5, K1=0.01, K2=0.03) evaluated on the fully-covered interior and
averaged over channels.
"""

from __future__ import annotations

import math

import numpy as np

from .images import ColorImage


def colorfulness(image: ColorImage) -> float:
    """Opponent-channel colorfulness score, >= 0; exactly 0 for grayscale."""
    rgb = image.rgb * 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    rg = r - g
    yb = 0.5 * (r + g) - b
    sigma = math.hypot(float(rg.std()), float(yb.std()))
    mu = math.hypot(float(rg.mean()), float(yb.mean()))
    return sigma + 0.3 * mu


def _check_same_shape(a: ColorImage, b: ColorImage) -> None:
    if a.rgb.shape != b.rgb.shape:
        raise ValueError(f"shape mismatch: {a.rgb.shape} vs {b.rgb.shape}")


def psnr(a: ColorImage, b: ColorImage) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical images."""
    _check_same_shape(a, b)
    mse = float(np.mean((a.rgb - b.rgb) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _gaussian_kernel(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    offsets = np.arange(size) - (size - 1) / 2.0
    k = np.exp(-(offsets**2) / (2.0 * sigma**2))
    return k / k.sum()


def _filter2_valid(img: np.ndarray, kernel1d: np.ndarray) -> np.ndarray:
    """Separable 2-D correlation, valid region only."""
    size = kernel1d.shape[0]
    h, w = img.shape
    # rows
    tmp = np.zeros((h, w - size + 1))
    for i, kv in enumerate(kernel1d):
        tmp += kv * img[:, i : i + w - size + 1]
    out = np.zeros((h - size + 1, w - size + 1))
    for i, kv in enumerate(kernel1d):
        out += kv * tmp[i : i + h - size + 1, :]
    return out


def _ssim_channel(x: np.ndarray, y: np.ndarray) -> float:
    kernel = _gaussian_kernel()
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2
    mu_x = _filter2_valid(x, kernel)
    mu_y = _filter2_valid(y, kernel)
    mu_xx = _filter2_valid(x * x, kernel)
    mu_yy = _filter2_valid(y * y, kernel)
    mu_xy = _filter2_valid(x * y, kernel)
    var_x = mu_xx - mu_x**2
    var_y = mu_yy - mu_y**2
    cov = mu_xy - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def ssim(a: ColorImage, b: ColorImage) -> float:
    """Mean structural similarity over channels, in [-1, 1]."""
    _check_same_shape(a, b)
    if a.height < SSIM_WINDOW or a.width < SSIM_WINDOW:
        raise ValueError(f"images must be at least {SSIM_WINDOW}px on each side")
    return float(
        np.mean([_ssim_channel(a.rgb[..., c], b.rgb[..., c]) for c in range(3)])
    )
