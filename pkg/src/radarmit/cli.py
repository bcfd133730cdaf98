"""Command-line front end: dataset generation, training, Monte-Carlo
evaluation, architecture sweeps and RD-map cut export.

All commands are deterministic under a fixed --seed, write outputs
atomically, and exit nonzero without leaving partial files on error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from ._io import atomic_write
from .config import ToolConfig, default_config, load_config
from .denoise import (
    LOSSES, PRESETS, TARGET_OBJECTS, TARGET_WITH_NOISE,
    ModelSpec, load_dataset, make_dataset, param_count, save_checkpoint, train_model,
)
from .denoise.sweep import grid_specs, run_sweep
from .pipeline import is_cnn_method, parse_methods, run_eval
from .sim import assemble_frame, sample_scenario

ENV_JOBS = "RADAR_MITIG_THREADS"


def _jobs_default() -> int:
    env = os.environ.get(ENV_JOBS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SystemExit(f"invalid {ENV_JOBS} value {env!r}")
    return 1


def _add_common(p: argparse.ArgumentParser, jobs: bool = False) -> None:
    p.add_argument("--config", type=Path, default=None,
                   help="JSON config file (see --print-default-config for the schema)")
    p.add_argument("--scale", choices=("paper", "desk"), default="paper",
                   help="preset scale used for defaults the config does not override")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    if jobs:
        p.add_argument("--jobs", type=int, default=None,
                       help=f"worker processes (default: ${ENV_JOBS} or 1)")


def _load_cfg(args) -> ToolConfig:
    if args.config is not None:
        return load_config(args.config, scale=args.scale)
    return default_config(args.scale)


def _resolve_jobs(args) -> int:
    if getattr(args, "jobs", None) is not None:
        return max(1, args.jobs)
    return _jobs_default()


def _parse_kernel_size(text: str) -> tuple[int, int]:
    try:
        s1, s2 = text.lower().split("x")
        return (int(s1), int(s2))
    except ValueError:
        raise SystemExit(f"invalid kernel size {text!r}; expected e.g. 3x3 or 1x41")


def _model_spec(args, variant: str, input_repr: str) -> ModelSpec:
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise SystemExit(
                f"unknown preset {args.preset!r}; valid presets: {', '.join(sorted(PRESETS))}"
            )
        return PRESETS[args.preset]
    if args.layers is None or args.kernels is None or args.kernel_size is None:
        raise SystemExit("either --preset or all of --layers/--kernels/--kernel-size required")
    return ModelSpec(variant, input_repr, args.layers, args.kernels,
                     _parse_kernel_size(args.kernel_size))


def _method_checkpoints(methods: list[str]) -> dict[str, str]:
    paths = {}
    for m in methods:
        if is_cnn_method(m):
            path = m.split(":", 1)[1]
            if not Path(path).is_file():
                raise SystemExit(f"checkpoint not found: {path}")
            paths[m] = path
    return paths


def cmd_gen(args) -> int:
    config = _load_cfg(args)
    paths = make_dataset(
        args.out, config, args.variant, args.repr,
        seed_base=args.seed, target_kind=args.target,
        train_max_interferers=args.train_max_interferers,
    )
    for split, path in paths.items():
        print(f"wrote {split}: {path}")
    return 0


def cmd_train(args) -> int:
    train_ds = load_dataset(Path(args.data) / "train.rdim")
    val_ds = load_dataset(Path(args.data) / "val.rdim")
    spec = _model_spec(args, train_ds.variant, train_ds.input_repr)
    if spec.variant != train_ds.variant or spec.input_repr != train_ds.input_repr:
        raise SystemExit(
            f"model spec ({spec.variant}/{spec.input_repr}) does not match "
            f"dataset ({train_ds.variant}/{train_ds.input_repr})"
        )
    config = _load_cfg(args)
    result = train_model(
        spec, train_ds, val_ds, loss_kind=args.loss, scaler_kind=args.scaler,
        params=config.train, seed=args.seed, max_epochs=args.epochs,
    )
    out = Path(args.out)
    save_checkpoint(result.model, out)
    result.write_log_csv(out.with_suffix(out.suffix + ".log.csv"))
    print(f"trained {spec.variant}/{spec.input_repr} ({param_count(spec)} params), "
          f"best val loss {result.best_val_loss:.6g} at epoch {result.best_epoch}")
    print(f"wrote {out}")
    return 0


def cmd_eval(args) -> int:
    test_ds = load_dataset(args.data if str(args.data).endswith(".rdim")
                           else Path(args.data) / "test.rdim")
    methods = parse_methods([m.strip() for m in args.methods.split(",") if m.strip()])
    ckpts = _method_checkpoints(methods)
    if args.config is not None:
        config = load_config(args.config, scale=args.scale)
    elif test_ds.config:
        config = ToolConfig.from_dict(test_ds.config)
    else:
        config = default_config(args.scale)
    report = run_eval(test_ds.seeds, methods, config, ckpts, jobs=_resolve_jobs(args))

    out = Path(args.out)
    report.write_csv(out / "metrics.csv")
    for metric in ("sinr_rd_db", "evm_rd", "sinr_as_db"):
        report.write_cdf_csv(out / f"cdf_{metric.removesuffix('_db')}.csv", metric)
    report.write_summary_json(out / "summary.json")
    for row in report.summary_rows():
        print(f"{row['method']:<28} SINR(RD) {row['sinr_rd_db']:8.2f} dB   "
              f"EVM(RD) {row['evm_rd']:.4f}   SINR(AS) {row['sinr_as_db']:6.2f} dB")
    print(f"wrote {out}/metrics.csv, cdf_*.csv, summary.json")
    return 0


def cmd_sweep(args) -> int:
    data_dir = Path(args.data)
    train_ds = load_dataset(data_dir / "train.rdim")
    val_ds = load_dataset(data_dir / "val.rdim")
    test_ds = load_dataset(data_dir / "test.rdim")
    layers = [int(x) for x in args.layers.split(",")]
    kernels = [int(x) for x in args.kernels.split(",")]
    sizes = [_parse_kernel_size(x) for x in args.kernel_sizes.split(",")]
    specs = grid_specs(train_ds.variant, train_ds.input_repr, layers, kernels, sizes)
    config = _load_cfg(args)
    rows = run_sweep(
        specs, train_ds, val_ds, test_ds, args.out,
        loss_kind=args.loss, scaler_kind=args.scaler, params=config.train,
        seed=args.seed, max_epochs=args.epochs, jobs=_resolve_jobs(args),
    )
    for row in rows:
        print(f"L={row['layers']} K={row['kernels']} {row['kernel_size']:>5} "
              f"params={row['params']:>6}  SINR(RD) {row['sinr_rd_db']:8.2f} dB  "
              f"EVM {row['evm_rd']:.4f}  SINR(AS) {row['sinr_as_db']:6.2f} dB")
    print(f"wrote {Path(args.out) / 'sweep.csv'}")
    return 0


def cmd_cuts(args) -> int:
    config = _load_cfg(args)
    cfg = config.victim
    rb = int(round(args.distance / cfg.range_bin_m))
    db = cfg.m_slow // 2 + int(round(args.velocity / cfg.velocity_bin_mps))
    if not (0 <= rb < cfg.n_fast):
        raise SystemExit(
            f"distance {args.distance} m outside the [0, {cfg.max_range_m:.2f}) m axis"
        )
    if not (0 <= db < cfg.m_slow):
        lo, hi = cfg.velocity_extent_mps
        raise SystemExit(f"velocity {args.velocity} m/s outside the [{lo:.2f}, {hi:.2f}] m/s axis")

    methods = parse_methods([m.strip() for m in args.methods.split(",") if m.strip()])
    ckpts = _method_checkpoints(methods)
    from .denoise import load_checkpoint
    models = {name: load_checkpoint(p) for name, p in ckpts.items()}

    # Move the first sampled object onto the requested cut location so the
    # cuts pass through a real peak.
    import dataclasses
    scenario = sample_scenario(args.scenario_seed, config.ranges)
    first = dataclasses.replace(scenario.objects[0], distance_m=args.distance,
                                velocity_mps=args.velocity)
    scenario = dataclasses.replace(scenario, objects=(first,) + scenario.objects[1:])
    frame = assemble_frame(scenario, cfg)

    from .pipeline import range_velocity_cuts
    cuts = range_velocity_cuts(frame, methods, models, config, rb, db)

    out = Path(args.out)
    dist_axis = np.arange(cfg.n_fast) * cfg.range_bin_m
    vel_axis = (np.arange(cfg.m_slow) - cfg.m_slow // 2) * cfg.velocity_bin_mps
    with atomic_write(out / "range_cut.csv") as fh:
        w = csv.writer(fh)
        w.writerow(["distance_m"] + methods)
        for i, d in enumerate(dist_axis):
            w.writerow([repr(float(d))] + [repr(float(cuts[m]["range_cut"][i])) for m in methods])
    with atomic_write(out / "velocity_cut.csv") as fh:
        w = csv.writer(fh)
        w.writerow(["velocity_mps"] + methods)
        for i, v in enumerate(vel_axis):
            w.writerow([repr(float(v))] + [repr(float(cuts[m]["velocity_cut"][i])) for m in methods])
    print(f"wrote {out}/range_cut.csv and velocity_cut.csv "
          f"(cut cell: range bin {rb}, Doppler bin {db})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="radarmit",
        description="FMCW/CS radar interference simulation, CNN denoising and benchmarking",
    )
    p.add_argument("--print-default-config", action="store_true",
                   help="print the default JSON config (honors --scale) and exit")
    p.add_argument("--scale", choices=("paper", "desk"), default="paper",
                   help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command")

    g = sub.add_parser("gen", help="generate train/val/test datasets")
    _add_common(g)
    g.add_argument("--out", type=Path, required=True, help="output directory")
    g.add_argument("--variant", choices=("rdd", "rpd"), default="rdd")
    g.add_argument("--repr", choices=("ris", "lms"), default="ris")
    g.add_argument("--target", choices=(TARGET_WITH_NOISE, TARGET_OBJECTS),
                   default=TARGET_WITH_NOISE, help="CNN target reference")
    g.add_argument("--train-max-interferers", type=int, default=None,
                   help="cap interferer count in train/val splits (generalization experiment)")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("train", help="train a denoiser on a generated dataset")
    _add_common(t)
    t.add_argument("--data", type=Path, required=True, help="dataset directory from gen")
    t.add_argument("--out", type=Path, required=True, help="checkpoint output path")
    t.add_argument("--preset", default=None,
                   help=f"named architecture ({', '.join(sorted(PRESETS))})")
    t.add_argument("--layers", type=int, default=None)
    t.add_argument("--kernels", type=int, default=None)
    t.add_argument("--kernel-size", default=None, help="e.g. 3x3 or 1x41")
    t.add_argument("--loss", choices=LOSSES, default="mse")
    t.add_argument("--scaler", choices=("css", "zmuvs"), default="css")
    t.add_argument("--epochs", type=int, default=None, help="override max epochs")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="Monte-Carlo evaluation of mitigation methods")
    _add_common(e, jobs=True)
    e.add_argument("--data", type=Path, required=True,
                   help="dataset directory (uses test.rdim) or a .rdim file")
    e.add_argument("--methods", required=True,
                   help="comma list: interfered,noisy,zeroing,imat,rfmin,cnn:<ckpt>")
    e.add_argument("--out", type=Path, required=True, help="output directory")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="architecture grid search")
    _add_common(s, jobs=True)
    s.add_argument("--data", type=Path, required=True, help="dataset directory from gen")
    s.add_argument("--out", type=Path, required=True, help="output directory")
    s.add_argument("--layers", default="4,6,8")
    s.add_argument("--kernels", default="2,8,16,32")
    s.add_argument("--kernel-sizes", default="1x1,3x3,5x5,7x7")
    s.add_argument("--loss", choices=LOSSES, default="mse")
    s.add_argument("--scaler", choices=("css", "zmuvs"), default="zmuvs")
    s.add_argument("--epochs", type=int, default=None)
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("cuts", help="export range/velocity cuts through a peak")
    _add_common(c)
    c.add_argument("--scenario-seed", type=int, default=0,
                   help="scenario seed; its first object is moved to the cut location")
    c.add_argument("--methods", required=True)
    c.add_argument("--distance", type=float, required=True, help="cut distance [m]")
    c.add_argument("--velocity", type=float, required=True, help="cut velocity [m/s]")
    c.add_argument("--out", type=Path, required=True, help="output directory")
    c.set_defaults(func=cmd_cuts)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_default_config:
        sys.stdout.write(default_config(args.scale).to_json())
        return 0
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
