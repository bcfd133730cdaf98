"""Training losses over (B, C, H, W) spectra, each returning (value, grad).

Cell-aware losses take boolean (B, H, W) masks marking ground-truth peak and
noise cells. For two-channel (real/imag) data the per-cell power and complex
value combine both channels; the plain MSE treats all channels jointly.
"""

from __future__ import annotations

import numpy as np


def _check_pair(pred: np.ndarray, target: np.ndarray) -> None:
    if pred.shape != target.shape:
        raise ValueError(f"pred shape {pred.shape} != target shape {target.shape}")


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error over every element of every channel."""
    _check_pair(pred, target)
    diff = pred - target
    loss = float(np.mean(diff * diff))
    return loss, (2.0 / diff.size) * diff


def sinr_loss(
    pred: np.ndarray, peak_mask: np.ndarray, noise_mask: np.ndarray
) -> tuple[float, np.ndarray]:
    """Negative linear-scale ratio of mean peak power to mean noise power.

    Power per cell sums the squared channels. Scale-invariant: doubling pred
    leaves the loss unchanged. Batch samples are averaged.
    """
    if pred.ndim != 4:
        raise ValueError("pred must be (B, C, H, W)")
    b = pred.shape[0]
    if peak_mask.shape != (b,) + pred.shape[2:] or noise_mask.shape != peak_mask.shape:
        raise ValueError("masks must be (B, H, W) matching pred")
    grad = np.zeros_like(pred)
    total = 0.0
    for i in range(b):
        pm = peak_mask[i]
        nm = noise_mask[i]
        n_peak = int(pm.sum())
        n_noise = int(nm.sum())
        if n_peak == 0 or n_noise == 0:
            raise ValueError("peak and noise masks must each select at least one cell")
        power = (pred[i] ** 2).sum(axis=0)  # (H, W)
        p = float(power[pm].mean())
        q = float(power[nm].mean())
        if q == 0.0:
            raise ValueError("noise power is zero; SINR loss undefined")
        total += -p / q
        # d(-P/Q)/dx = -(dP)/Q + P*(dQ)/Q^2 with dP, dQ the mask-local power grads
        gp = 2.0 * pred[i] * pm[None, :, :] / n_peak
        gq = 2.0 * pred[i] * nm[None, :, :] / n_noise
        grad[i] = (-gp / q + (p / q**2) * gq) / b
    return total / b, grad


def weighted_mse_loss(
    pred: np.ndarray,
    target: np.ndarray,
    peak_mask: np.ndarray,
    weights: tuple[float, float, float] = (0.5, 0.25, 0.25),
) -> tuple[float, np.ndarray]:
    """Convex combination of full-spectrum MSE with peak magnitude and
    (wrapped) peak phase MSE. Two-channel (real/imag) data only."""
    _check_pair(pred, target)
    if pred.ndim != 4 or pred.shape[1] != 2:
        raise ValueError("weighted MSE needs (B, 2, H, W) real/imag data")
    w1, w2, w3 = weights
    if min(weights) < 0 or abs(w1 + w2 + w3 - 1.0) > 1e-12:
        raise ValueError("weights must be nonnegative and sum to 1")
    b = pred.shape[0]
    if peak_mask.shape != (b,) + pred.shape[2:]:
        raise ValueError("peak mask must be (B, H, W) matching pred")

    loss_full, grad = mse_loss(pred, target)
    loss = w1 * loss_full
    grad = w1 * grad

    mag_total = 0.0
    ph_total = 0.0
    for i in range(b):
        pm = peak_mask[i]
        n_peak = int(pm.sum())
        if n_peak == 0:
            raise ValueError("peak mask must select at least one cell")
        re_p, im_p = pred[i, 0][pm], pred[i, 1][pm]
        re_t, im_t = target[i, 0][pm], target[i, 1][pm]
        mp = np.hypot(re_p, im_p)
        mt = np.hypot(re_t, im_t)
        dmag = mp - mt
        mag_total += float(np.mean(dmag**2))
        # wrapped phase difference in (-pi, pi]; wrap derivative is 1 a.e.
        dphi = np.angle((re_p + 1j * im_p) * (re_t - 1j * im_t))
        ph_total += float(np.mean(dphi**2))

        safe_m = np.where(mp > 0, mp, 1.0)
        safe_m2 = safe_m * safe_m
        gmag_r = np.where(mp > 0, 2.0 * dmag * re_p / safe_m, 0.0) / n_peak
        gmag_i = np.where(mp > 0, 2.0 * dmag * im_p / safe_m, 0.0) / n_peak
        gph_r = np.where(mp > 0, 2.0 * dphi * (-im_p) / safe_m2, 0.0) / n_peak
        gph_i = np.where(mp > 0, 2.0 * dphi * re_p / safe_m2, 0.0) / n_peak
        grad[i, 0][pm] += (w2 * gmag_r + w3 * gph_r) / b
        grad[i, 1][pm] += (w2 * gmag_i + w3 * gph_i) / b

    loss += w2 * mag_total / b + w3 * ph_total / b
    return loss, grad
