"""Training loop: Adam on standardized spectra, best-validation
checkpointing.

Every sample is standardized by its own input statistics (targets with the
same per-sample state, so the clean/interfered relation is preserved);
scenario powers span tens of dB and a single dataset-wide scale starves
the loss of the quiet samples. Validation runs in eval mode (batchnorm
running statistics). Training aborts with a diagnostic on a non-finite
loss.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .._io import atomic_write
from ..config import TrainParams
from ..nn import CSS, ZMUVS, Adam, apply_scaler, fit_scaler, mse_loss, sinr_loss, weighted_mse_loss
from .data import Dataset
from .model import DenoiserModel, ModelSpec, build_model, checkpoint_bytes, checkpoint_from_bytes

MSE = "mse"
SINR = "sinr"
WMSE = "wmse"
LOSSES = (MSE, SINR, WMSE)


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class EpochLog:
    epoch: int
    train_loss: float
    val_loss: float


@dataclass
class TrainResult:
    model: DenoiserModel
    log: list[EpochLog] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = math.inf

    def write_log_csv(self, path) -> None:
        with atomic_write(path) as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "train_loss", "val_loss"])
            for row in self.log:
                w.writerow([row.epoch, repr(row.train_loss), repr(row.val_loss)])


def _prepare(ds: Dataset, scaler_kind: str) -> tuple[list, list, list, list]:
    """Standardize each record by its own input statistics and precompute
    network views and cell masks."""
    xs, ys, peaks, noises = [], [], [], []
    for rec in ds.records:
        state = fit_scaler(scaler_kind, rec.input_arr)
        scaled_in = apply_scaler(state, rec.input_arr)
        scaled_tg = apply_scaler(state, rec.target_arr)
        rec_scaled = type(rec)(rec.seed, rec.ramp, rec.peaks, scaled_in, scaled_tg)
        x, y = ds.network_arrays(rec_scaled)
        xs.append(x)
        ys.append(y)
        peaks.append(ds.peak_mask(rec))
        noises.append(ds.noise_mask(rec))
    return xs, ys, peaks, noises


def _batch_loss(loss_kind, pred, target, peak_mask, noise_mask, weights):
    if loss_kind == MSE:
        return mse_loss(pred, target)
    if loss_kind == SINR:
        return sinr_loss(pred, peak_mask, noise_mask)
    if loss_kind == WMSE:
        return weighted_mse_loss(pred, target, peak_mask, weights)
    raise ValueError(f"unknown loss {loss_kind!r}")


def train_model(
    spec_or_model,
    train_ds: Dataset,
    val_ds: Dataset,
    loss_kind: str = MSE,
    scaler_kind: str = "css",
    params: TrainParams | None = None,
    seed: int = 0,
    max_epochs: int | None = None,
) -> TrainResult:
    """Train a denoiser; returns the best-validation model and the log."""
    if params is None:
        params = TrainParams()
    if max_epochs is None:
        max_epochs = params.max_epochs
    if loss_kind not in LOSSES:
        raise ValueError(f"unknown loss {loss_kind!r} (expected one of {LOSSES})")
    if scaler_kind not in (CSS, ZMUVS):
        raise ValueError(f"unknown scaler {scaler_kind!r}")
    if train_ds.variant != val_ds.variant or train_ds.input_repr != val_ds.input_repr:
        raise ValueError("train/val datasets disagree on variant or representation")
    overlap = set(train_ds.seeds) & set(val_ds.seeds)
    if overlap:
        raise ValueError(f"train/val scenario seeds overlap: {sorted(overlap)[:5]}")

    if isinstance(spec_or_model, ModelSpec):
        model = build_model(spec_or_model, rng_seed=seed)
    else:
        model = spec_or_model
    model.scaler_kind = scaler_kind

    xs, ys, pks, nms = _prepare(train_ds, scaler_kind)
    vxs, vys, vpks, vnms = _prepare(val_ds, scaler_kind)
    n = len(xs)
    optim = Adam(model.params(), lr=params.learning_rate)
    rng = np.random.default_rng(seed)

    result = TrainResult(model=model)
    best_bytes = None
    since_best = 0
    for epoch in range(1, max_epochs + 1):
        order = rng.permutation(n)
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, n, params.batch_size):
            idx = order[start : start + params.batch_size]
            x = np.stack([xs[i] for i in idx])
            y = np.stack([ys[i] for i in idx])
            pm = np.stack([pks[i] for i in idx])
            nm = np.stack([nms[i] for i in idx])
            optim.zero_grad()
            pred = model.forward(x, training=True)
            loss, grad = _batch_loss(loss_kind, pred, y, pm, nm, params.wmse_weights)
            if not math.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite {loss_kind} loss at epoch {epoch}, batch {n_batches} "
                    f"(seeds {[train_ds.records[i].seed for i in idx]})"
                )
            model.backward(grad)
            optim.step()
            epoch_loss += loss
            n_batches += 1

        val_loss = evaluate_loss(model, vxs, vys, vpks, vnms, loss_kind, params.wmse_weights)
        result.log.append(EpochLog(epoch, epoch_loss / n_batches, val_loss))
        if val_loss < result.best_val_loss:
            result.best_val_loss = val_loss
            result.best_epoch = epoch
            best_bytes = checkpoint_bytes(model)
            since_best = 0
        else:
            since_best += 1
            if since_best >= params.patience:
                break

    if best_bytes is not None:
        result.model = checkpoint_from_bytes(best_bytes)
    return result


def evaluate_loss(model, xs, ys, pks, nms, loss_kind, weights) -> float:
    """Mean per-sample loss in eval mode."""
    total = 0.0
    for x, y, pm, nm in zip(xs, ys, pks, nms):
        pred = model.forward(x[None], training=False)
        loss, _ = _batch_loss(loss_kind, pred, y[None], pm[None], nm[None], weights)
        total += loss
    return total / len(xs)
