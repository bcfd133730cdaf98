"""Radar, scenario-range and tool configuration with JSON round-trip."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

SPEED_OF_LIGHT = 299792458.0  # m/s


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class VictimRadarConfig:
    """Constant victim radar and processing parameters.

    Defaults are the full-scale simulation setup: 76 GHz start frequency,
    1 GHz sweep over 48 us, 20 MHz IF bandwidth, 1024 fast-time samples,
    128 ramps, 8 antennas, Hann windowing.
    """

    f0_v: float = 76e9      # sweep start frequency [Hz]
    bw_v: float = 1e9       # sweep bandwidth [Hz]
    t_v: float = 48e-6      # sweep duration [s]
    b_if: float = 20e6      # IF (anti-aliasing) bandwidth [Hz]
    n_fast: int = 1024      # fast-time samples per ramp
    m_slow: int = 128       # ramps per frame
    n_ant: int = 8          # receive antennas
    window: str = "hann"

    def __post_init__(self):
        for name in ("f0_v", "bw_v", "t_v", "b_if"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("n_fast", "m_slow", "n_ant"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not _is_pow2(self.n_fast) or not _is_pow2(self.m_slow):
            raise ValueError("n_fast and m_slow must be powers of two")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f0_v

    @property
    def fs(self) -> float:
        """Complex baseband sampling rate: samples uniformly span the ramp."""
        return self.n_fast / self.t_v

    @property
    def chirp_rate(self) -> float:
        return self.bw_v / self.t_v

    @property
    def range_bin_m(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.bw_v)

    @property
    def velocity_bin_mps(self) -> float:
        return self.wavelength / (2.0 * self.m_slow * self.t_v)

    @property
    def max_range_m(self) -> float:
        """Unambiguous range extent (upper edge of the range axis)."""
        return self.n_fast * self.range_bin_m

    @property
    def velocity_extent_mps(self) -> tuple[float, float]:
        """Velocity axis limits after centering: [-M/2, M/2-1] bins."""
        half = self.m_slow // 2
        return (-half * self.velocity_bin_mps, (half - 1) * self.velocity_bin_mps)


@dataclass(frozen=True)
class ScenarioRanges:
    """Uniform sampling ranges (lo, hi) for random scenario parameters."""

    n_objects: tuple[int, int] = (1, 20)
    distance_m: tuple[float, float] = (0.0, 153.0)
    velocity_mps: tuple[float, float] = (-20.0, 20.0)
    azimuth_rad: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    amplitude: tuple[float, float] = (1.0, 1.0)
    n_interferers: tuple[int, int] = (1, 3)
    f0_i_hz: tuple[float, float] = (75.8e9, 76.2e9)
    bw_i_hz: tuple[float, float] = (0.6e9, 1.4e9)
    t_i_s: tuple[float, float] = (40e-6, 46e-6)
    intf_phase_rad: tuple[float, float] = (0.0, 2 * math.pi)
    intf_time_offset_s: tuple[float, float] = (0.0, 46e-6)
    intf_azimuth_rad: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    sir_db: tuple[float, float] = (-60.0, -20.0)
    snr_db: tuple[float, float] = (-10.0, 10.0)

    def __post_init__(self):
        for f in dataclasses.fields(self):
            lo, hi = getattr(self, f.name)
            if lo > hi:
                raise ValueError(f"range {f.name}: min {lo} > max {hi}")

    def replace(self, **kw) -> "ScenarioRanges":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class ImatParams:
    """Iterative thresholding reconstruction parameters."""

    max_iter: int = 30
    threshold_decay: float = 0.8
    stop_tol: float = 1e-6

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not (0.0 < self.threshold_decay < 1.0):
            raise ValueError("threshold_decay must lie in (0, 1)")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be >= 0")


@dataclass(frozen=True)
class MetricParams:
    guard_range: int = 4    # guard radius around peaks, range bins
    guard_doppler: int = 4  # guard radius around peaks, Doppler bins
    as_bins: int = 64       # zero-padded angular spectrum length
    as_guard: int = 2       # guard radius around the AS peak bin

    def __post_init__(self):
        if self.guard_range < 1 or self.guard_doppler < 1:
            raise ValueError("guard radii must be >= 1")
        if self.as_bins < 1 or self.as_guard < 0:
            raise ValueError("invalid angular-spectrum parameters")

    @property
    def guard(self) -> tuple[int, int]:
        return (self.guard_range, self.guard_doppler)


@dataclass(frozen=True)
class TrainParams:
    learning_rate: float = 5e-5
    batch_size: int = 2
    max_epochs: int = 100
    patience: int = 10
    wmse_weights: tuple[float, float, float] = (0.5, 0.25, 0.25)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 0:
            raise ValueError("invalid training schedule")
        w = self.wmse_weights
        if len(w) != 3 or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
            raise ValueError("wmse_weights must be nonnegative and sum to 1")


@dataclass(frozen=True)
class ToolConfig:
    """Bundle of every configurable knob, serializable to/from JSON."""

    victim: VictimRadarConfig = field(default_factory=VictimRadarConfig)
    ranges: ScenarioRanges = field(default_factory=ScenarioRanges)
    imat: ImatParams = field(default_factory=ImatParams)
    metrics: MetricParams = field(default_factory=MetricParams)
    train: TrainParams = field(default_factory=TrainParams)
    splits: tuple[int, int, int] = (2000, 250, 250)  # train/val/test scenarios

    def to_dict(self) -> dict:
        def enc(obj):
            if dataclasses.is_dataclass(obj):
                return {f.name: enc(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
            if isinstance(obj, tuple):
                return list(obj)
            return obj

        return enc(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ToolConfig":
        def tup(v):
            return tuple(v) if isinstance(v, list) else v

        kw = {}
        sections = {
            "victim": VictimRadarConfig,
            "ranges": ScenarioRanges,
            "imat": ImatParams,
            "metrics": MetricParams,
            "train": TrainParams,
        }
        for key, typ in sections.items():
            if key in d:
                names = {f.name for f in dataclasses.fields(typ)}
                unknown = set(d[key]) - names
                if unknown:
                    raise ValueError(f"unknown keys in config section '{key}': {sorted(unknown)}")
                kw[key] = typ(**{k: tup(v) for k, v in d[key].items()})
        unknown = set(d) - set(sections) - {"splits"}
        if unknown:
            raise ValueError(f"unknown config sections: {sorted(unknown)}")
        if "splits" in d:
            kw["splits"] = tuple(int(x) for x in d["splits"])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "ToolConfig":
        return cls.from_dict(json.loads(text))


def default_config(scale: str = "paper") -> ToolConfig:
    """Preset configurations.

    "paper" is the full-scale setup (N=1024, M=128, 2000/250/250 scenarios).
    "desk" shrinks to N=256, M=64, 200/25/25 with the IF bandwidth reduced
    to 1.25 MHz (bursts stay a small fraction of each ramp at the lower
    sampling rate) and the object distance range shrunk to the reduced
    unambiguous extent.
    """
    if scale == "paper":
        return ToolConfig()
    if scale == "desk":
        victim = VictimRadarConfig(n_fast=256, m_slow=64, b_if=1.25e6)
        ranges = ScenarioRanges(distance_m=(0.0, 38.0))
        return ToolConfig(victim=victim, ranges=ranges, splits=(200, 25, 25))
    raise ValueError(f"unknown scale {scale!r} (expected 'paper' or 'desk')")


def load_config(path, scale: str = "paper") -> ToolConfig:
    """Load a JSON config file; missing sections fall back to the scale preset."""
    base = default_config(scale)
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    loaded = ToolConfig.from_dict(d)
    merged = {}
    for f in dataclasses.fields(ToolConfig):
        merged[f.name] = getattr(loaded, f.name) if f.name in d else getattr(base, f.name)
    return ToolConfig(**merged)
