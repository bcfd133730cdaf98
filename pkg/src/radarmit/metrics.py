"""SINR/EVM metrics over RD maps and angular spectra, plus CDF aggregation.

Peak and noise cell sets come from scenario ground truth: one peak cell per
object at its nearest RD bin, noise cells everywhere outside a guard box
around every peak. SINR is the dB ratio of mean peak power to mean noise
power; EVM is the mean normalized complex error at the peaks.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .chain import RANGE_DOPPLER, AngularSpectrum, SpectrumMatrix
from .config import VictimRadarConfig
from .sim import Scenario
from ._io import atomic_write

# Mean-summary row order used by reports (references first, then the
# classical methods, then any CNN variants appended as encountered).
METHOD_ORDER = ("noisy", "interfered", "zeroing", "rfmin", "imat")


@dataclass
class CellSets:
    """Ground-truth peak cells and the complementary noise-cell mask."""

    peak_cells: list[tuple[int, int]]
    noise_mask: np.ndarray            # bool (N, M), True = noise cell
    guard: tuple[int, int]

    @property
    def n_peaks(self) -> int:
        return len(self.peak_cells)

    @property
    def n_noise(self) -> int:
        return int(self.noise_mask.sum())

    def noise_cells(self) -> np.ndarray:
        """(K, 2) array of noise cell indices; mostly for verification."""
        return np.argwhere(self.noise_mask)


def cell_sets(
    scenario: Scenario, cfg: VictimRadarConfig, guard: tuple[int, int] = (4, 4)
) -> CellSets:
    """Build peak/noise cell sets for a scenario on the (N, M) RD grid.

    Objects closer than one bin merge into a single peak cell. Noise cells
    are all cells outside every peak's (2*g+1)-wide guard box.
    """
    if guard[0] < 1 or guard[1] < 1:
        raise ValueError("guard radii must be >= 1")
    n, m = cfg.n_fast, cfg.m_slow
    peaks: list[tuple[int, int]] = []
    for obj in scenario.objects:
        rb = int(round(obj.distance_m / cfg.range_bin_m))
        # the Doppler axis is periodic; velocities at the extent edge alias
        db = (m // 2 + int(round(obj.velocity_mps / cfg.velocity_bin_mps))) % m
        if not (0 <= rb < n):
            raise ValueError(f"object range bin {rb} outside the ({n}, {m}) map")
        if (rb, db) not in peaks:
            peaks.append((rb, db))

    noise = np.ones((n, m), dtype=bool)
    gr, gd = guard
    for rb, db in peaks:
        noise[max(0, rb - gr) : rb + gr + 1, max(0, db - gd) : db + gd + 1] = False
    return CellSets(peaks, noise, (gr, gd))


def sinr_rd(rd: SpectrumMatrix, cells: CellSets) -> float:
    """10*log10(mean peak power / mean noise power) on an RD map.

    Zero noise power yields +inf (reported, not raised).
    """
    if rd.stage != RANGE_DOPPLER:
        raise ValueError(f"expected stage {RANGE_DOPPLER!r}, got {rd.stage!r}")
    if cells.noise_mask.shape != rd.values.shape:
        raise ValueError("cell sets do not match map dimensions")
    power = np.abs(rd.values) ** 2
    p_peak = float(np.mean([power[c] for c in cells.peak_cells]))
    p_noise = float(power[cells.noise_mask].mean())
    if p_noise == 0.0:
        return math.inf if p_peak > 0.0 else math.nan
    if p_peak == 0.0:
        return -math.inf
    return 10.0 * math.log10(p_peak / p_noise)


def evm_rd(clean: SpectrumMatrix, denoised: SpectrumMatrix, cells: CellSets) -> float:
    """Mean |S_clean - S_denoised| / |S_clean| over the peak cells."""
    if clean.values.shape != denoised.values.shape:
        raise ValueError("clean/denoised dimensions differ")
    total = 0.0
    for c in cells.peak_cells:
        ref = clean.values[c]
        if ref == 0:
            raise ValueError(f"clean peak magnitude is zero at cell {c}")
        total += abs(ref - denoised.values[c]) / abs(ref)
    return total / cells.n_peaks


def sinr_as(spectrum: AngularSpectrum, peak_bin: int, guard: int = 2) -> float:
    """1-D SINR analogue on an angular spectrum with a guard interval."""
    vals = spectrum.values
    if not (0 <= peak_bin < vals.shape[0]):
        raise ValueError(f"peak bin {peak_bin} outside spectrum of length {vals.shape[0]}")
    power = np.abs(vals) ** 2
    idx = np.arange(vals.shape[0])
    noise = power[np.abs(idx - peak_bin) > guard]
    if noise.size == 0:
        raise ValueError("guard interval leaves no noise bins")
    p_noise = float(noise.mean())
    p_peak = float(power[peak_bin])
    if p_noise == 0.0:
        return math.inf if p_peak > 0.0 else math.nan
    if p_peak == 0.0:
        return -math.inf
    return 10.0 * math.log10(p_peak / p_noise)


def aggregate_cdf(values) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF: sorted values vs k/n, k = 1..n."""
    vals = np.sort(np.asarray(values, dtype=float))
    if vals.size == 0:
        raise ValueError("cannot aggregate an empty value list")
    return vals, np.arange(1, vals.size + 1) / vals.size


@dataclass
class ScenarioMetrics:
    method: str
    scenario_seed: int
    sinr_rd_db: float
    evm_rd: float
    sinr_as_db: float


@dataclass
class MetricsReport:
    """Per-scenario metric records plus aggregation and serialization."""

    records: list[ScenarioMetrics] = field(default_factory=list)

    def methods(self) -> list[str]:
        seen: list[str] = []
        for r in self.records:
            if r.method not in seen:
                seen.append(r.method)
        known = [m for m in METHOD_ORDER if m in seen]
        return known + [m for m in seen if m not in METHOD_ORDER]

    def values(self, method: str, metric: str) -> np.ndarray:
        return np.array([getattr(r, metric) for r in self.records if r.method == method])

    def mean(self, method: str, metric: str) -> float:
        vals = self.values(method, metric)
        if vals.size == 0:
            raise ValueError(f"no records for method {method!r}")
        return float(vals.mean())

    def summary_rows(self) -> list[dict]:
        rows = []
        for method in self.methods():
            rows.append(
                {
                    "method": method,
                    "sinr_rd_db": self.mean(method, "sinr_rd_db"),
                    "evm_rd": self.mean(method, "evm_rd"),
                    "sinr_as_db": self.mean(method, "sinr_as_db"),
                }
            )
        return rows

    def write_csv(self, path) -> None:
        with atomic_write(path) as fh:
            w = csv.writer(fh)
            w.writerow(["method", "scenario_seed", "sinr_rd_db", "evm_rd", "sinr_as_db"])
            for r in sorted(self.records, key=lambda r: (r.method, r.scenario_seed)):
                w.writerow(
                    [r.method, r.scenario_seed, repr(r.sinr_rd_db), repr(r.evm_rd), repr(r.sinr_as_db)]
                )

    def write_cdf_csv(self, path, metric: str) -> None:
        with atomic_write(path) as fh:
            w = csv.writer(fh)
            w.writerow(["method", "value", "cdf"])
            for method in self.methods():
                vals, cdf = aggregate_cdf(self.values(method, metric))
                for v, p in zip(vals, cdf):
                    w.writerow([method, repr(float(v)), repr(float(p))])

    def write_summary_json(self, path) -> None:
        with atomic_write(path) as fh:
            json.dump({"mean_metrics": self.summary_rows()}, fh, indent=2)
            fh.write("\n")
