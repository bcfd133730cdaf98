"""Monte-Carlo evaluation: run mitigation methods over scenario seeds and
collect SINR/EVM/AS-SINR records.

Each scenario is an independent pure function of its seed, so evaluation
parallelizes across processes; records are ordered by (method, seed)
regardless of worker count, keeping outputs byte-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .chain import (
    SpectrumMatrix,
    angular_spectrum,
    doppler_dft,
    range_dft,
    rd_matrix,
    rp_matrix,
)
from .classical import imat, rfmin, zeroing
from .config import ToolConfig
from .denoise import LMS, DenoiserModel, denoise_chain, load_checkpoint
from .metrics import MetricsReport, ScenarioMetrics, cell_sets, evm_rd, sinr_as, sinr_rd
from .sim import IfFrame, assemble_frame, sample_scenario

CLASSICAL_METHODS = ("interfered", "noisy", "zeroing", "imat", "rfmin")


def is_cnn_method(name: str) -> bool:
    return name.startswith("cnn:")


def parse_methods(methods) -> list[str]:
    out = []
    for m in methods:
        if m not in CLASSICAL_METHODS and not is_cnn_method(m):
            raise ValueError(
                f"unknown method {m!r}; expected one of {CLASSICAL_METHODS} or 'cnn:<checkpoint>'"
            )
        out.append(m)
    return out


def _antenna_maps(cube: np.ndarray, cfg) -> list[SpectrumMatrix]:
    return [
        SpectrumMatrix(rd_matrix(rp_matrix(cube[:, :, a])), "range_doppler", a,
                       cfg.range_bin_m, cfg.velocity_bin_mps)
        for a in range(cube.shape[2])
    ]


def method_rd_maps(
    frame: IfFrame,
    method: str,
    models: dict[str, DenoiserModel],
    config: ToolConfig,
) -> tuple[list[SpectrumMatrix], list[SpectrumMatrix]]:
    """(detection maps, angle maps) per antenna for one method.

    The angle maps feed the angular spectrum. Log-magnitude denoisers keep
    the original (non-denoised) values there, as magnitude-only denoising
    destroys the cross-antenna phase; every other method uses its own maps.
    """
    if method == "interfered":
        maps = [doppler_dft(rp) for rp in range_dft(frame)]
        return maps, maps
    if method == "noisy":
        maps = _antenna_maps(frame.clean_with_noise, frame.cfg)
        return maps, maps
    if method == "zeroing":
        maps = [doppler_dft(rp) for rp in range_dft(zeroing(frame))]
        return maps, maps
    if method == "imat":
        maps = [doppler_dft(rp) for rp in range_dft(imat(frame, config.imat))]
        return maps, maps
    if method == "rfmin":
        maps = [doppler_dft(rfmin(rp)) for rp in range_dft(frame)]
        return maps, maps
    if is_cnn_method(method):
        model = models[method]
        profiles = range_dft(frame)
        maps = [denoise_chain(model, rp) for rp in profiles]
        if model.spec.input_repr == LMS:
            return maps, [doppler_dft(rp) for rp in profiles]
        return maps, maps
    raise ValueError(f"unknown method {method!r}")


def _as_peak_bin(azimuth_rad: float, n_as: int) -> int:
    # Half-wavelength array: normalized spatial frequency sin(theta)/2.
    return (n_as // 2 + int(round(n_as * math.sin(azimuth_rad) / 2.0))) % n_as


def scenario_as_sinr(
    angle_maps: list[SpectrumMatrix],
    scenario,
    cfg,
    n_as: int,
    guard: int,
) -> float:
    """Mean per-object angular-spectrum SINR for one scenario."""
    values = []
    for obj in scenario.objects:
        rb = int(round(obj.distance_m / cfg.range_bin_m))
        db = (cfg.m_slow // 2
              + int(round(obj.velocity_mps / cfg.velocity_bin_mps))) % cfg.m_slow
        spec = angular_spectrum(angle_maps, (rb, db), n_as)
        values.append(sinr_as(spec, _as_peak_bin(obj.azimuth_rad, n_as), guard))
    finite = [v for v in values if math.isfinite(v)]
    if finite:
        return float(np.mean(finite))
    # every object peak was annihilated (or the map is all-zero)
    return -math.inf if -math.inf in values else math.inf


def evaluate_scenario(
    seed: int,
    config: ToolConfig,
    methods: list[str],
    models: dict[str, DenoiserModel],
) -> list[ScenarioMetrics]:
    cfg = config.victim
    scenario = sample_scenario(seed, config.ranges)
    frame = assemble_frame(scenario, cfg)
    cells = cell_sets(scenario, cfg, config.metrics.guard)
    clean_rd = SpectrumMatrix(
        rd_matrix(rp_matrix(frame.clean_with_noise[:, :, 0])),
        "range_doppler", 0, cfg.range_bin_m, cfg.velocity_bin_mps,
    )
    records = []
    for method in methods:
        det_maps, angle_maps = method_rd_maps(frame, method, models, config)
        records.append(
            ScenarioMetrics(
                method=method,
                scenario_seed=seed,
                sinr_rd_db=sinr_rd(det_maps[0], cells),
                evm_rd=evm_rd(clean_rd, det_maps[0], cells),
                sinr_as_db=scenario_as_sinr(
                    angle_maps, scenario, cfg, config.metrics.as_bins, config.metrics.as_guard
                ),
            )
        )
    return records


# Worker-process state for parallel evaluation; initialized once per process
# so checkpoints are loaded a single time.
_WORKER: dict = {}


def _init_worker(config: ToolConfig, methods: list[str], ckpt_paths: dict[str, str]) -> None:
    _WORKER["config"] = config
    _WORKER["methods"] = methods
    _WORKER["models"] = {name: load_checkpoint(p) for name, p in ckpt_paths.items()}


def _eval_seed(seed: int) -> list[ScenarioMetrics]:
    return evaluate_scenario(seed, _WORKER["config"], _WORKER["methods"], _WORKER["models"])


def run_eval(
    seeds,
    methods,
    config: ToolConfig,
    checkpoint_paths: dict[str, str] | None = None,
    jobs: int = 1,
) -> MetricsReport:
    """Evaluate all methods over the scenario seeds, optionally in parallel.

    The output is independent of the job count: every scenario is a pure
    function of its seed and records are collected in seed order.
    """
    methods = parse_methods(methods)
    checkpoint_paths = checkpoint_paths or {}
    missing = [m for m in methods if is_cnn_method(m) and m not in checkpoint_paths]
    if missing:
        raise ValueError(f"no checkpoint path supplied for {missing}")
    seeds = [int(s) for s in seeds]

    per_seed: list[list[ScenarioMetrics]]
    if jobs <= 1:
        _init_worker(config, methods, checkpoint_paths)
        try:
            per_seed = [_eval_seed(s) for s in seeds]
        finally:
            _WORKER.clear()
    else:
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker,
            initargs=(config, methods, checkpoint_paths),
        ) as pool:
            per_seed = list(pool.map(_eval_seed, seeds, chunksize=1))

    report = MetricsReport()
    for method in methods:
        for recs in per_seed:
            report.records.extend(r for r in recs if r.method == method)
    return report


def range_velocity_cuts(
    frame: IfFrame,
    methods: list[str],
    models: dict[str, DenoiserModel],
    config: ToolConfig,
    range_bin: int,
    doppler_bin: int,
) -> dict[str, dict[str, np.ndarray]]:
    """Magnitude-normalized dB cuts through one RD cell, first antenna.

    Returns {method: {"range_cut": (N,), "velocity_cut": (M,)}} in dB
    relative to each method's map maximum.
    """
    out = {}
    for method in methods:
        det_maps, _ = method_rd_maps(frame, method, models, config)
        mag = np.abs(det_maps[0].values)
        peak = mag.max()
        if peak == 0:
            peak = 1.0
        db = 20.0 * np.log10(np.maximum(mag, 1e-300) / peak)
        out[method] = {
            "range_cut": db[:, doppler_bin].copy(),
            "velocity_cut": db[range_bin, :].copy(),
        }
    return out
