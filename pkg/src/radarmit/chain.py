"""Classical range-Doppler processing: windowed DFTs over fast time, slow
time and the antenna axis.

Both spectral stages use the periodic (DFT-even) Hann window. The range DFT
is one-sided (complex baseband, no shift); the Doppler DFT is centered so
bin M/2 is zero velocity. All transforms are linear and pure, safe to call
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .sim import IfFrame

RANGE_PROFILE = "range_profile"
RANGE_DOPPLER = "range_doppler"


@dataclass
class SpectrumMatrix:
    """One antenna's complex spectrum with axis metadata.

    values is (n_fast, m_slow): range bins along axis 0; ramp index (stage
    range_profile) or centered Doppler bins (stage range_doppler) along
    axis 1. range_bin_m / velocity_bin_mps are the bin widths.
    """

    values: np.ndarray
    stage: str
    antenna: int
    range_bin_m: float
    velocity_bin_mps: float

    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def m_bins(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray, stage: str | None = None) -> "SpectrumMatrix":
        return replace(self, values=values, stage=self.stage if stage is None else stage)


@dataclass
class AngularSpectrum:
    values: np.ndarray                 # complex, length n_as (zero-padded, centered)
    source_peak: tuple[int, int]       # (range bin, Doppler bin) the values came from


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann coefficients w[k] = 0.5*(1 - cos(2*pi*k/length))."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    k = np.arange(length)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * k / length))


def rp_matrix(samples_2d: np.ndarray) -> np.ndarray:
    """Fast-time Hann DFT of one antenna's (N, M) samples, no shift."""
    w = hann_window(samples_2d.shape[0])
    return np.fft.fft(samples_2d * w[:, None], axis=0)


def rd_matrix(rp_2d: np.ndarray) -> np.ndarray:
    """Slow-time Hann DFT of an (N, M) range-profile matrix, centered."""
    w = hann_window(rp_2d.shape[1])
    return np.fft.fftshift(np.fft.fft(rp_2d * w[None, :], axis=1), axes=1)


def range_dft(frame: IfFrame) -> list[SpectrumMatrix]:
    """Range profiles S_R per antenna: Hann-windowed fast-time DFT per ramp."""
    cfg = frame.cfg
    w = hann_window(cfg.n_fast)
    spec = np.fft.fft(frame.samples * w[:, None, None], axis=0)
    return [
        SpectrumMatrix(spec[:, :, a], RANGE_PROFILE, a, cfg.range_bin_m, cfg.velocity_bin_mps)
        for a in range(cfg.n_ant)
    ]


def doppler_dft(rp: SpectrumMatrix) -> SpectrumMatrix:
    """Range-Doppler map: Hann-windowed slow-time DFT, zero velocity at bin M/2."""
    if rp.stage != RANGE_PROFILE:
        raise ValueError(f"expected stage {RANGE_PROFILE!r}, got {rp.stage!r}")
    return rp.with_values(rd_matrix(rp.values), stage=RANGE_DOPPLER)


def rd_maps(frame: IfFrame) -> list[SpectrumMatrix]:
    """Full chain per antenna: range DFT then Doppler DFT."""
    return [doppler_dft(rp) for rp in range_dft(frame)]


def angular_spectrum(
    rd_per_antenna: list[SpectrumMatrix],
    peak: tuple[int, int],
    n_as: int = 64,
) -> AngularSpectrum:
    """Angular spectrum at one RD cell: Hann-windowed, zero-padded DFT over
    the antenna axis, centered so zero angle maps to bin n_as/2."""
    n_ant = len(rd_per_antenna)
    if n_as < n_ant:
        raise ValueError(f"n_as {n_as} must be >= number of antennas {n_ant}")
    n, m = peak
    first = rd_per_antenna[0].values
    if not (0 <= n < first.shape[0] and 0 <= m < first.shape[1]):
        raise ValueError(f"peak {peak} outside map bounds {first.shape}")
    vals = np.array([sm.values[n, m] for sm in rd_per_antenna])
    w = hann_window(n_ant)
    spec = np.fft.fftshift(np.fft.fft(vals * w, n=n_as))
    return AngularSpectrum(spec, (n, m))
