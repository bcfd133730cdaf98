"""Architecture grid search: train every spec, benchmark on the test split."""

from __future__ import annotations

import csv
import itertools
from pathlib import Path

from .._io import atomic_write
from ..config import ToolConfig, TrainParams
from .data import Dataset
from .model import ModelSpec, param_count, save_checkpoint
from .train import train_model


def grid_specs(variant: str, input_repr: str, layer_counts, kernel_counts, kernel_sizes):
    """Cartesian product of the swept architecture dimensions."""
    specs = []
    for n_layers, n_kernels, size in itertools.product(layer_counts, kernel_counts, kernel_sizes):
        specs.append(ModelSpec(variant, input_repr, n_layers, n_kernels, tuple(size)))
    return specs


def run_sweep(
    specs: list[ModelSpec],
    train_ds: Dataset,
    val_ds: Dataset,
    test_ds: Dataset,
    out_dir,
    loss_kind: str = "mse",
    scaler_kind: str = "css",
    params: TrainParams | None = None,
    seed: int = 0,
    max_epochs: int | None = None,
    jobs: int = 1,
) -> list[dict]:
    """Train each spec and report mean test metrics vs parameter count.

    Checkpoints land in out_dir; rows are sorted by parameter count and
    written to sweep.csv there.
    """
    from ..pipeline import run_eval  # late import; pipeline depends on this package

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = ToolConfig.from_dict(test_ds.config)
    rows = []
    for i, spec in enumerate(specs):
        result = train_model(
            spec, train_ds, val_ds, loss_kind=loss_kind, scaler_kind=scaler_kind,
            params=params, seed=seed, max_epochs=max_epochs,
        )
        tag = f"L{spec.n_layers}_K{spec.n_kernels}_{spec.kernel_size[0]}x{spec.kernel_size[1]}"
        ckpt = out_dir / f"sweep_{i:02d}_{tag}.ckpt"
        save_checkpoint(result.model, ckpt)
        method = f"cnn:{ckpt}"
        report = run_eval(test_ds.seeds, [method], config, {method: str(ckpt)}, jobs=jobs)
        rows.append(
            {
                "layers": spec.n_layers,
                "kernels": spec.n_kernels,
                "kernel_size": f"{spec.kernel_size[0]}x{spec.kernel_size[1]}",
                "params": param_count(spec),
                "sinr_rd_db": report.mean(method, "sinr_rd_db"),
                "evm_rd": report.mean(method, "evm_rd"),
                "sinr_as_db": report.mean(method, "sinr_as_db"),
                "best_val_loss": result.best_val_loss,
                "checkpoint": ckpt.name,
            }
        )
    rows.sort(key=lambda r: r["params"])
    with atomic_write(out_dir / "sweep.csv") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        w.writeheader()
        for row in rows:
            w.writerow(row)
    return rows
