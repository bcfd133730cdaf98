"""Training dataset container and builder.

File layout ("RDIM" format): magic, version, a JSON header (variant,
representation, dimensions, simulation config, scenario seeds, guard radii,
target kind), then fixed-order records. Each record carries the scenario
seed, the ramp index (-1 for whole-map samples), the ground-truth peak
cells, and the input/target spectra as little-endian float64 buffers
(interleaved re/im for complex data).

RDD samples are whole (N, M) maps of the first antenna, one per scenario;
RPD samples are single-ramp range profiles, M per scenario. Inputs are
interfered spectra, targets the clean reference in the same representation.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .._io import atomic_write
from ..chain import rd_matrix, rp_matrix
from ..config import ScenarioRanges, ToolConfig, VictimRadarConfig
from ..metrics import cell_sets
from ..sim import assemble_frame, sample_scenario
from .model import LMS, RDD, RIS, RPD

_DS_MAGIC = b"RDIM"
_DS_VERSION = 1

LOG_MAG_FLOOR = 1e-12  # added before the log so empty cells stay finite

TARGET_WITH_NOISE = "objects+noise"
TARGET_OBJECTS = "objects"


def log_magnitude(z: np.ndarray) -> np.ndarray:
    return 20.0 * np.log10(np.abs(z) + LOG_MAG_FLOOR)


def complex_to_channels(z: np.ndarray) -> np.ndarray:
    """Complex (H, W) -> real (2, H, W) channel stack."""
    return np.stack([z.real, z.imag])


def channels_to_complex(x: np.ndarray) -> np.ndarray:
    return x[0] + 1j * x[1]


@dataclass
class SampleRecord:
    seed: int
    ramp: int                      # -1 for RDD whole-map samples
    peaks: list[tuple[int, int]]   # ground-truth (range bin, Doppler bin)
    input_arr: np.ndarray          # complex (RIS) or real dB (LMS)
    target_arr: np.ndarray


@dataclass
class Dataset:
    variant: str
    input_repr: str
    n_fast: int
    m_slow: int
    guard: tuple[int, int]
    target_kind: str
    config: dict                   # ToolConfig dict used at generation time
    seeds: list[int]
    records: list[SampleRecord] = field(default_factory=list)

    @property
    def n_samples(self) -> int:
        return len(self.records)

    def sample_shape(self) -> tuple[int, int, int]:
        """(channels, H, W) of the network view of one sample."""
        ch = 2 if self.input_repr == RIS else 1
        if self.variant == RDD:
            return (ch, self.n_fast, self.m_slow)
        return (ch, 1, self.n_fast)

    def network_arrays(self, rec: SampleRecord) -> tuple[np.ndarray, np.ndarray]:
        """Record arrays as (C, H, W) float channel stacks (unscaled)."""
        def view(a):
            x = complex_to_channels(a) if self.input_repr == RIS else a[None, ...]
            if self.variant == RPD:
                x = x.reshape(x.shape[0], 1, -1)
            return np.ascontiguousarray(x, dtype=np.float64)

        return view(rec.input_arr), view(rec.target_arr)

    def peak_mask(self, rec: SampleRecord) -> np.ndarray:
        """(H, W) boolean peak-cell mask in the sample's spatial layout."""
        _, h, w = self.sample_shape()
        mask = np.zeros((h, w), dtype=bool)
        if self.variant == RDD:
            for rb, db in rec.peaks:
                mask[rb, db] = True
        else:
            for rb, _ in rec.peaks:
                mask[0, rb] = True
        return mask

    def noise_mask(self, rec: SampleRecord) -> np.ndarray:
        """(H, W) noise mask: outside the guard box around every peak."""
        _, h, w = self.sample_shape()
        gr, gd = self.guard
        mask = np.ones((h, w), dtype=bool)
        if self.variant == RDD:
            for rb, db in rec.peaks:
                mask[max(0, rb - gr) : rb + gr + 1, max(0, db - gd) : db + gd + 1] = False
        else:
            for rb, _ in rec.peaks:
                mask[0, max(0, rb - gr) : rb + gr + 1] = False
        return mask


def _spectrum(cube_2d: np.ndarray, variant: str) -> np.ndarray:
    rp = rp_matrix(cube_2d)
    return rp if variant == RPD else rd_matrix(rp)


def _represent(spec: np.ndarray, input_repr: str) -> np.ndarray:
    return spec if input_repr == RIS else log_magnitude(spec)


def build_split(
    seeds,
    variant: str,
    input_repr: str,
    cfg: VictimRadarConfig,
    ranges: ScenarioRanges,
    guard: tuple[int, int] = (4, 4),
    target_kind: str = TARGET_WITH_NOISE,
    config_dict: dict | None = None,
) -> Dataset:
    """Simulate the listed scenario seeds into one dataset split."""
    if variant not in (RDD, RPD):
        raise ValueError(f"unknown variant {variant!r}")
    if input_repr not in (RIS, LMS):
        raise ValueError(f"unknown representation {input_repr!r}")
    if target_kind not in (TARGET_WITH_NOISE, TARGET_OBJECTS):
        raise ValueError(f"unknown target kind {target_kind!r}")
    seeds = [int(s) for s in seeds]
    ds = Dataset(
        variant=variant,
        input_repr=input_repr,
        n_fast=cfg.n_fast,
        m_slow=cfg.m_slow,
        guard=guard,
        target_kind=target_kind,
        config=config_dict or {},
        seeds=seeds,
    )
    for seed in seeds:
        scenario = sample_scenario(seed, ranges)
        frame = assemble_frame(scenario, cfg)
        peaks = cell_sets(scenario, cfg, guard).peak_cells
        clean_cube = (
            frame.clean_with_noise if target_kind == TARGET_WITH_NOISE else frame.object_only
        )
        spec_in = _spectrum(frame.samples[:, :, 0], variant)
        spec_tg = _spectrum(clean_cube[:, :, 0], variant)
        if variant == RDD:
            ds.records.append(
                SampleRecord(seed, -1, peaks,
                             _represent(spec_in, input_repr),
                             _represent(spec_tg, input_repr))
            )
        else:
            for m in range(cfg.m_slow):
                ds.records.append(
                    SampleRecord(seed, m, peaks,
                                 _represent(spec_in[:, m], input_repr),
                                 _represent(spec_tg[:, m], input_repr))
                )
    return ds


def make_dataset(
    out_dir,
    config: ToolConfig,
    variant: str,
    input_repr: str,
    seed_base: int = 0,
    target_kind: str = TARGET_WITH_NOISE,
    train_max_interferers: int | None = None,
) -> dict:
    """Write train/val/test splits under out_dir; returns the file paths.

    Split seeds are consecutive disjoint ranges starting at seed_base. With
    train_max_interferers set, the train and validation splits draw from a
    restricted interferer-count range while the test split keeps the full
    range (generalization experiment).
    """
    from pathlib import Path

    n_train, n_val, n_test = config.splits
    seeds = {
        "train": list(range(seed_base, seed_base + n_train)),
        "val": list(range(seed_base + n_train, seed_base + n_train + n_val)),
        "test": list(range(seed_base + n_train + n_val, seed_base + n_train + n_val + n_test)),
    }
    _check_disjoint(seeds)

    ranges = config.ranges
    train_ranges = ranges
    if train_max_interferers is not None:
        lo = min(ranges.n_interferers[0], train_max_interferers)
        train_ranges = ranges.replace(n_interferers=(lo, train_max_interferers))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for split, split_seeds in seeds.items():
        rng_set = train_ranges if split in ("train", "val") else ranges
        ds = build_split(
            split_seeds, variant, input_repr, config.victim, rng_set,
            guard=config.metrics.guard, target_kind=target_kind,
            config_dict=config.to_dict(),
        )
        path = out_dir / f"{split}.rdim"
        save_dataset(ds, path)
        paths[split] = path
    return paths


def _check_disjoint(seed_sets: dict) -> None:
    names = list(seed_sets)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            overlap = set(seed_sets[a]) & set(seed_sets[b])
            if overlap:
                raise ValueError(
                    f"scenario seeds shared between splits {a!r} and {b!r}: "
                    f"{sorted(overlap)[:5]}..."
                )


def save_dataset(ds: Dataset, path) -> None:
    header = {
        "variant": ds.variant,
        "input_repr": ds.input_repr,
        "n_fast": ds.n_fast,
        "m_slow": ds.m_slow,
        "guard": list(ds.guard),
        "target_kind": ds.target_kind,
        "config": ds.config,
        "seeds": ds.seeds,
        "n_samples": ds.n_samples,
    }
    hbytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with atomic_write(path, "wb") as fh:
        fh.write(_DS_MAGIC)
        fh.write(struct.pack("<II", _DS_VERSION, len(hbytes)))
        fh.write(hbytes)
        for rec in ds.records:
            fh.write(struct.pack("<qiI", rec.seed, rec.ramp, len(rec.peaks)))
            for rb, db in rec.peaks:
                fh.write(struct.pack("<ii", rb, db))
            for arr in (rec.input_arr, rec.target_arr):
                if ds.input_repr == RIS:
                    buf = np.ascontiguousarray(arr, dtype="<c16").tobytes()
                else:
                    buf = np.ascontiguousarray(arr, dtype="<f8").tobytes()
                fh.write(struct.pack("<Q", len(buf)))
                fh.write(buf)


def load_dataset(path) -> Dataset:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _DS_MAGIC:
        raise ValueError(f"{path}: not a dataset file (bad magic)")
    version, hlen = struct.unpack_from("<II", data, 4)
    if version != _DS_VERSION:
        raise ValueError(f"{path}: unsupported dataset version {version}")
    header = json.loads(data[12 : 12 + hlen].decode("utf-8"))
    ds = Dataset(
        variant=header["variant"],
        input_repr=header["input_repr"],
        n_fast=header["n_fast"],
        m_slow=header["m_slow"],
        guard=tuple(header["guard"]),
        target_kind=header["target_kind"],
        config=header["config"],
        seeds=list(header["seeds"]),
    )
    if ds.variant == RDD:
        shape: tuple[int, ...] = (ds.n_fast, ds.m_slow)
    else:
        shape = (ds.n_fast,)
    dtype = "<c16" if ds.input_repr == RIS else "<f8"

    pos = 12 + hlen
    for _ in range(header["n_samples"]):
        seed, ramp, n_peaks = struct.unpack_from("<qiI", data, pos)
        pos += 16
        peaks = []
        for _ in range(n_peaks):
            rb, db = struct.unpack_from("<ii", data, pos)
            peaks.append((rb, db))
            pos += 8
        arrays = []
        for _ in range(2):
            (nbytes,) = struct.unpack_from("<Q", data, pos)
            pos += 8
            arr = np.frombuffer(data, dtype=dtype, count=int(np.prod(shape)), offset=pos)
            if arr.nbytes != nbytes:
                raise ValueError(f"{path}: record size mismatch")
            arrays.append(arr.reshape(shape).copy())
            pos += nbytes
        ds.records.append(SampleRecord(seed, ramp, peaks, arrays[0], arrays[1]))
    if pos != len(data):
        raise ValueError(f"{path}: {len(data) - pos} trailing bytes")
    return ds
