"""Scenario sampling and IF-signal synthesis for the chirp-sequence victim radar.

A frame is the complex baseband sample cube of one measurement: N fast-time
samples per ramp, M ramps, A antennas. The received signal is the sum of
object reflections, interferer sweeps gated by the IF anti-aliasing filter,
and complex AWGN. Everything is a pure function of (seed, parameters).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT, ScenarioRanges, VictimRadarConfig

# Sub-stream tag so receiver noise is decorrelated from parameter sampling
# while staying reproducible from the scenario seed alone.
_NOISE_STREAM = 0x6E6F6973


@dataclass(frozen=True)
class ObjectParams:
    distance_m: float
    velocity_mps: float
    azimuth_rad: float
    amplitude: float = 1.0


@dataclass(frozen=True)
class InterfererParams:
    f0_hz: float          # sweep start frequency
    bw_hz: float          # sweep bandwidth
    t_sweep_s: float      # sweep duration (its own ramp period)
    phase_rad: float = 0.0
    time_offset_s: float = 0.0
    azimuth_rad: float = 0.0  # direction of arrival, sets per-antenna phase


@dataclass(frozen=True)
class Scenario:
    objects: tuple[ObjectParams, ...]
    interferers: tuple[InterfererParams, ...]
    sir_db: float
    snr_db: float
    seed: int


@dataclass
class IfFrame:
    """One simulated frame with ground truth.

    samples          : objects + scaled interference + noise, (N, M, A)
    interference_mask: True exactly where the interference component is
                       nonzero, (N, M), shared across antennas
    clean_with_noise : objects + noise (same noise realization), (N, M, A)
    object_only      : object components alone, (N, M, A)
    """

    samples: np.ndarray
    interference_mask: np.ndarray
    clean_with_noise: np.ndarray
    object_only: np.ndarray
    scenario: Scenario
    cfg: VictimRadarConfig

    def replace(self, **kw) -> "IfFrame":
        return dataclasses.replace(self, **kw)


def sample_scenario(rng_seed: int, ranges: ScenarioRanges | None = None) -> Scenario:
    """Draw one random scenario; every field is independently uniform.

    Reproducible: the same (seed, ranges) pair always yields the same
    scenario. Degenerate ranges (min == max) return the constant.
    """
    if ranges is None:
        ranges = ScenarioRanges()
    rng = np.random.default_rng(rng_seed)

    n_obj = int(rng.integers(ranges.n_objects[0], ranges.n_objects[1] + 1))
    dist = rng.uniform(*ranges.distance_m, size=n_obj)
    vel = rng.uniform(*ranges.velocity_mps, size=n_obj)
    azi = rng.uniform(*ranges.azimuth_rad, size=n_obj)
    amp = rng.uniform(*ranges.amplitude, size=n_obj)
    objects = tuple(
        ObjectParams(float(d), float(v), float(a), float(s))
        for d, v, a, s in zip(dist, vel, azi, amp)
    )

    n_intf = int(rng.integers(ranges.n_interferers[0], ranges.n_interferers[1] + 1))
    f0 = rng.uniform(*ranges.f0_i_hz, size=n_intf)
    bw = rng.uniform(*ranges.bw_i_hz, size=n_intf)
    tsw = rng.uniform(*ranges.t_i_s, size=n_intf)
    ph = rng.uniform(*ranges.intf_phase_rad, size=n_intf)
    toff = rng.uniform(*ranges.intf_time_offset_s, size=n_intf)
    iazi = rng.uniform(*ranges.intf_azimuth_rad, size=n_intf)
    interferers = tuple(
        InterfererParams(float(a), float(b), float(c), float(d), float(e), float(f))
        for a, b, c, d, e, f in zip(f0, bw, tsw, ph, toff, iazi)
    )

    sir_db = float(rng.uniform(*ranges.sir_db))
    snr_db = float(rng.uniform(*ranges.snr_db))
    return Scenario(objects, interferers, sir_db, snr_db, int(rng_seed))


def _antenna_phases(azimuth_rad: float, n_ant: int) -> np.ndarray:
    # Uniform linear array, lambda/2 element spacing: pi*sin(theta) per element.
    return np.exp(1j * math.pi * math.sin(azimuth_rad) * np.arange(n_ant))


def synth_object_component(obj: ObjectParams, cfg: VictimRadarConfig) -> np.ndarray:
    """IF component of one point reflection, (N, M, A) complex cube.

    Fast time carries the beat frequency 2*B*d/(c*T), slow time the Doppler
    phase ramp of 2*v/lambda per second, and the antenna axis the array
    steering phase. A constant carrier phase 2*pi*f0*2d/c is included so
    object phases vary with distance as they do in a dechirped receiver.
    """
    if not (0.0 <= obj.distance_m < cfg.max_range_m):
        raise ValueError(
            f"distance {obj.distance_m} m outside unambiguous range [0, {cfg.max_range_m:.2f})"
        )
    f_beat = 2.0 * cfg.bw_v * obj.distance_m / (SPEED_OF_LIGHT * cfg.t_v)
    f_doppler = 2.0 * obj.velocity_mps / cfg.wavelength
    t_fast = np.arange(cfg.n_fast) / cfg.fs
    carrier = 2.0 * math.pi * cfg.f0_v * 2.0 * obj.distance_m / SPEED_OF_LIGHT

    fast = np.exp(1j * (2.0 * math.pi * f_beat * t_fast + carrier))
    slow = np.exp(1j * 2.0 * math.pi * f_doppler * cfg.t_v * np.arange(cfg.m_slow))
    ant = _antenna_phases(obj.azimuth_rad, cfg.n_ant)
    return obj.amplitude * fast[:, None, None] * slow[None, :, None] * ant[None, None, :]


def synth_interference_component(
    intf: InterfererParams, cfg: VictimRadarConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled IF component of one interferer plus its burst mask.

    The victim mixer output for a foreign sweep is a chirp at the
    instantaneous frequency difference between the two sweeps; the ideal
    anti-aliasing filter passes it only while |f_intf - f_victim| < b_if,
    producing the characteristic time-limited bursts. The interferer runs
    its own ramp period, so bursts drift across the victim's ramps.

    Returns (cube (N, M, A), mask (N, M)); the cube is exactly zero where
    the mask is False.
    """
    if intf.bw_hz <= 0 or intf.t_sweep_s <= 0:
        raise ValueError("interferer bandwidth and sweep duration must be positive")

    k_v = cfg.chirp_rate
    k_i = intf.bw_hz / intf.t_sweep_s
    tau = (np.arange(cfg.n_fast) / cfg.fs)[:, None]              # victim ramp-local time
    t_abs = tau + (np.arange(cfg.m_slow) * cfg.t_v)[None, :]     # absolute time, ramps contiguous

    # Interferer ramp-local time; both generators restart phase each sweep.
    # The sweep index is snapped (1e-9 sweeps, far below one sample) so grid
    # points landing exactly on a sweep boundary wrap to u = 0, not u = t_i.
    q = (t_abs - intf.time_offset_s) / intf.t_sweep_s
    u = (t_abs - intf.time_offset_s) - np.floor(q + 1e-9) * intf.t_sweep_s

    phase_v = 2.0 * math.pi * (cfg.f0_v * tau + 0.5 * k_v * tau * tau)
    phase_i = 2.0 * math.pi * (intf.f0_hz * u + 0.5 * k_i * u * u) + intf.phase_rad
    delta_f = (intf.f0_hz + k_i * u) - (cfg.f0_v + k_v * tau)

    mask = np.abs(delta_f) < cfg.b_if
    burst = np.where(mask, np.exp(1j * (phase_i - phase_v)), 0.0 + 0.0j)
    ant = _antenna_phases(intf.azimuth_rad, cfg.n_ant)
    return burst[:, :, None] * ant[None, None, :], mask


def assemble_frame(scenario: Scenario, cfg: VictimRadarConfig) -> IfFrame:
    """Assemble the full IF frame with SIR/SNR power scaling.

    Noise is scaled so 10*log10(P_obj / P_noise) == snr_db with both powers
    measured as the mean squared magnitude over the whole (N, M, A) cube.
    Interference is scaled so 10*log10(P_obj / P_intf) == sir_db with its
    power measured over the burst support only (the mean over all samples
    would make the effective interference strength depend on the burst duty
    cycle, which the sweep geometry varies freely). snr_db = +inf disables
    noise; an empty interferer list (or sir_db = +inf) disables interference.
    """
    if not scenario.objects:
        raise ValueError("scenario has no objects; object power would be zero")

    obj = np.zeros((cfg.n_fast, cfg.m_slow, cfg.n_ant), dtype=np.complex128)
    for o in scenario.objects:
        obj += synth_object_component(o, cfg)
    p_obj = float(np.mean(np.abs(obj) ** 2))
    if p_obj == 0.0:
        raise ValueError("total object power is zero")

    intf = np.zeros_like(obj)
    mask = np.zeros((cfg.n_fast, cfg.m_slow), dtype=bool)
    for i in scenario.interferers:
        comp, m = synth_interference_component(i, cfg)
        intf += comp
        mask |= m
    if scenario.interferers and math.isfinite(scenario.sir_db) and mask.any():
        p_intf = float(np.mean(np.abs(intf[mask, :]) ** 2))
        if p_intf > 0.0:
            target = p_obj * 10.0 ** (-scenario.sir_db / 10.0)
            intf *= math.sqrt(target / p_intf)
    else:
        intf[:] = 0.0
        mask[:] = False

    if math.isfinite(scenario.snr_db):
        p_noise = p_obj * 10.0 ** (-scenario.snr_db / 10.0)
        rng = np.random.default_rng([scenario.seed, _NOISE_STREAM])
        noise = rng.standard_normal(obj.shape) + 1j * rng.standard_normal(obj.shape)
        # Normalize the realized power so the SNR contract holds exactly at
        # any frame size, not just in expectation.
        noise *= math.sqrt(p_noise / float(np.mean(np.abs(noise) ** 2)))
    else:
        noise = np.zeros_like(obj)

    clean = obj + noise
    return IfFrame(
        samples=clean + intf,
        interference_mask=mask,
        clean_with_noise=clean,
        object_only=obj,
        scenario=scenario,
        cfg=cfg,
    )


def make_frame(seed: int, cfg: VictimRadarConfig, ranges: ScenarioRanges | None = None) -> IfFrame:
    """Convenience: sample a scenario and assemble its frame."""
    return assemble_frame(sample_scenario(seed, ranges), cfg)
