"""Applying trained denoisers inside the processing chain.

Spectra are standardized exactly as in training: each map (RDD) or each
ramp's profile (RPD) by its own statistics, inverted with the same state
after the forward pass. Log-magnitude models recombine the denoised
magnitude with the input's phase so downstream complex processing stays
possible (detection-grade only: the phase is the interfered one).
"""

from __future__ import annotations

import numpy as np

from ..chain import RANGE_PROFILE, SpectrumMatrix, doppler_dft
from ..nn import apply_scaler, fit_scaler, invert_scaler
from .data import channels_to_complex, complex_to_channels, log_magnitude
from .model import RDD, RIS, RPD, DenoiserModel


def _require_kind(model: DenoiserModel) -> str:
    if model.scaler_kind is None:
        raise ValueError("model has no scaler kind; train it or load a checkpoint")
    return model.scaler_kind


def _denoise_complex_map(model: DenoiserModel, values: np.ndarray) -> np.ndarray:
    """Denoise one complex matrix through scale -> forward -> invert."""
    kind = _require_kind(model)
    if model.spec.input_repr == RIS:
        state = fit_scaler(kind, values)
        scaled = apply_scaler(state, values)
        x = complex_to_channels(scaled)[None]
        y = model.forward(x, training=False)[0]
        return invert_scaler(state, channels_to_complex(y))
    logmag = log_magnitude(values)
    state = fit_scaler(kind, logmag)
    y = model.forward(apply_scaler(state, logmag)[None, None], training=False)[0, 0]
    mag = 10.0 ** (invert_scaler(state, y) / 20.0)
    return mag * np.exp(1j * np.angle(values))


def denoise_rdd(model: DenoiserModel, rd: SpectrumMatrix) -> SpectrumMatrix:
    """Denoise a range-Doppler map; shape and axis metadata are preserved."""
    if model.spec.variant != RDD:
        raise ValueError(f"model variant {model.spec.variant!r} is not an RD denoiser")
    return rd.with_values(_denoise_complex_map(model, rd.values))


def denoise_rpd(model: DenoiserModel, rp: SpectrumMatrix) -> SpectrumMatrix:
    """Denoise every ramp's range profile independently.

    Each ramp is standardized by its own statistics (matching training,
    where one record is one ramp) and the ramps are batched through the
    network in eval mode, so there is no cross-ramp coupling.
    """
    kind = _require_kind(model)
    if model.spec.variant != RPD:
        raise ValueError(f"model variant {model.spec.variant!r} is not an RP denoiser")
    if rp.stage != RANGE_PROFILE:
        raise ValueError(f"expected stage {RANGE_PROFILE!r}, got {rp.stage!r}")
    n, m = rp.values.shape
    out = np.empty_like(rp.values)
    if model.spec.input_repr == RIS:
        states = [fit_scaler(kind, rp.values[:, j]) for j in range(m)]
        scaled = np.stack([apply_scaler(states[j], rp.values[:, j]) for j in range(m)])
        x = np.stack([scaled.real[:, None, :], scaled.imag[:, None, :]], axis=1)
        y = model.forward(x, training=False)
        for j in range(m):
            out[:, j] = invert_scaler(states[j], y[j, 0, 0, :] + 1j * y[j, 1, 0, :])
        return rp.with_values(out)
    logmag = log_magnitude(rp.values)
    states = [fit_scaler(kind, logmag[:, j]) for j in range(m)]
    scaled = np.stack([apply_scaler(states[j], logmag[:, j]) for j in range(m)])
    y = model.forward(scaled[:, None, None, :], training=False)
    for j in range(m):
        mag = 10.0 ** (invert_scaler(states[j], y[j, 0, 0, :]) / 20.0)
        out[:, j] = mag * np.exp(1j * np.angle(rp.values[:, j]))
    return rp.with_values(out)


def denoise_chain(model: DenoiserModel, rp: SpectrumMatrix) -> SpectrumMatrix:
    """Range profiles -> denoised RD map, routing by model variant."""
    if model.spec.variant == RPD:
        return doppler_dft(denoise_rpd(model, rp))
    return denoise_rdd(model, doppler_dft(rp))
