"""Command-line entry point.

Subcommands: synth, train, sweep, eval, ablate, report, bench.
Exit codes: 0 success, 1 usage error, 2 validation failure, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None, help="output directory/file")
    p.add_argument("--deterministic", action="store_true",
                   help="single-threaded strict deterministic mode")
    p.add_argument("--config", type=str, default=None,
                   help="JSON config file; command-line flags override its keys")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="velocast",
                                 description="synthetic cyclist-forecasting workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--n-vrus", type=int, default=20)
    p.add_argument("--scenarios-per-vru", type=int, default=1)
    p.add_argument("--image-size", type=int, default=48)
    p.add_argument("--window-stride", type=int, default=50)
    p.add_argument("--occlusion-rate", type=float, nargs=2, default=(0.0, 0.0),
                   metavar=("CAM1", "CAM2"))
    p.add_argument("--cue-lead-time", type=float, default=0.8)
    p.add_argument("--noise-std", type=float, default=0.001)
    p.add_argument("--no-video", action="store_true")
    _add_common(p)

    p = sub.add_parser("train", help="train one variant on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--variant", default="GRU")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("sweep", help="hyperparameter grid search for the baseline")
    p.add_argument("--dataset", required=True)
    p.add_argument("--grid", choices=("full", "smoke"), default="full")
    p.add_argument("--epochs", type=int, default=20)
    _add_common(p)

    p = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--variant", required=True)
    _add_common(p)

    p = sub.add_parser("ablate", help="run the input-configuration ablation")
    p.add_argument("--dataset", default=None)
    p.add_argument("--manifest", default=None,
                   help="experiment manifest JSON (otherwise built from --dataset)")
    p.add_argument("--variants", default=None,
                   help="comma-separated variant subset, e.g. GRU,MS_OF")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--verbose", action="store_true")
    _add_common(p)

    p = sub.add_parser("report", help="render summary.md from a results directory")
    p.add_argument("--results", required=True)
    _add_common(p)

    p = sub.add_parser("bench", help="measure single-sample inference latency")
    p.add_argument("--variant", default="GRU")
    p.add_argument("--image-size", type=int, default=48)
    p.add_argument("--n-iter", type=int, default=50)
    p.add_argument("--n-warmup", type=int, default=5)
    _add_common(p)
    return ap


def _merge_config(args: argparse.Namespace, argv: list[str]) -> argparse.Namespace:
    """File values apply only where the flag was not given on the command line."""
    if not getattr(args, "config", None):
        return args
    overrides = json.loads(Path(args.config).read_text())
    given = {a.split("=")[0].lstrip("-").replace("-", "_")
             for a in argv if a.startswith("--")}
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ValueError(f"config key {key!r} is not a flag of this command")
        if attr not in given:
            setattr(args, attr, value)
    return args


def cmd_synth(args) -> int:
    from ..synthgen.builder import build_dataset
    from ..synthgen.distributions import ScenarioDistribution

    out = Path(args.out or "dataset")
    dist = ScenarioDistribution(cue_lead_time=args.cue_lead_time,
                                noise_std=args.noise_std,
                                occlusion_rate=tuple(args.occlusion_rate))
    manifest, stats = build_dataset(
        out, n_vrus=args.n_vrus, scenarios_per_vru=args.scenarios_per_vru,
        dist=dist, seed=args.seed, image_hw=(args.image_size, args.image_size),
        window_stride=args.window_stride, include_video=not args.no_video)
    print(f"wrote {stats.n_samples} samples from {stats.n_scenarios} scenarios to {out}"
          f" (excluded out-of-view: {stats.n_excluded_out_of_view})")
    return EXIT_OK


def cmd_train(args) -> int:
    from ..core.dataset_io import load_dataset, read_meta
    from ..models.checkpoint import save_checkpoint
    from ..training.determinism import seed_torch
    from ..training.loop import train
    from ..training.splits import split_by_vru
    from .ablation import build_model, train_config
    from .manifest import default_manifest

    overrides = _train_overrides(args)
    manifest = default_manifest(args.dataset, seed=args.seed,
                                variant_names=[args.variant],
                                deterministic=args.deterministic,
                                train_overrides=overrides)
    _apply_train_overrides(manifest, overrides)
    meta = read_meta(args.dataset)
    cfg = manifest.variants[args.variant]
    samples = load_dataset(args.dataset, load_clips=cfg["kind"] == "msnet")
    splits = split_by_vru(samples, tuple(manifest.train["split_fractions"]), args.seed)
    seed_torch(args.seed)
    model = build_model(args.variant, cfg, meta)
    out = Path(args.out or f"train_{args.variant.replace(';', '-')}")
    out.mkdir(parents=True, exist_ok=True)
    result = train(model, splits["train"], splits["val"],
                   train_config(manifest, args.variant),
                   log_path=out / "train_log.csv", quiet=False)
    save_checkpoint(model, out / "checkpoint",
                    config=cfg, seed=args.seed, step=result.steps)
    print(f"best val {result.best_val:.6f} at epoch {result.best_epoch}")
    return EXIT_OK


def _train_overrides(args) -> dict:
    overrides = {}
    if getattr(args, "epochs", None) is not None:
        overrides["max_epochs"] = args.epochs
    if getattr(args, "batch_size", None) is not None:
        overrides["batch_size"] = args.batch_size
    if getattr(args, "learning_rate", None) is not None:
        overrides["learning_rate"] = args.learning_rate
    return overrides


def _apply_train_overrides(manifest, overrides: dict) -> None:
    """Explicit command-line values beat per-variant training overrides."""
    for cfg in manifest.variants.values():
        for key in overrides:
            cfg.get("train_overrides", {}).pop(key, None)


def cmd_sweep(args) -> int:
    from ..core.dataset_io import load_dataset, read_meta
    from ..training.loop import TrainConfig
    from ..training.splits import split_by_vru
    from ..training.sweep import SweepPoint, default_grid, run_sweep

    meta = read_meta(args.dataset)
    samples = load_dataset(args.dataset, load_clips=False)
    splits = split_by_vru(samples, seed=args.seed)
    grid = default_grid() if args.grid == "full" else [
        SweepPoint((50,), (100, 100), 256, 1e-3),
        SweepPoint((50, 50), (100, 100), 256, 1e-3),
    ]
    out = Path(args.out or "sweep.tsv")
    rows = run_sweep(splits["train"], splits["val"], grid,
                     TrainConfig(max_epochs=args.epochs, seed=args.seed),
                     out_path=out, past_len=meta.past_len,
                     horizon_count=meta.horizons.count)
    best = next(r for r in rows if r.best)
    print(f"best: {best.point.key} val {best.val_loss:.6f} -> {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    from ..core.dataset_io import load_dataset, read_meta
    from ..evaluation.metrics import build_report
    from ..models.checkpoint import load_checkpoint
    from ..training.loop import required_keys
    from ..training.splits import split_by_vru
    from .ablation import build_model, predict_all
    from .manifest import variant_config

    meta = read_meta(args.dataset)
    cfg = variant_config(args.variant)
    samples = load_dataset(args.dataset, load_clips=cfg["kind"] == "msnet")
    splits = split_by_vru(samples, seed=args.seed)
    model = build_model(args.variant, cfg, meta)
    load_checkpoint(model, args.checkpoint)
    forecasts = predict_all(model, splits["test"], required_keys(model))
    report = build_report(splits["test"], forecasts.astype(np.float64))
    payload = {"variant": args.variant, "asaee": report.asaee,
               "per_state": report.per_state, "n_samples": report.n_samples}
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "eval.json").write_text(json.dumps(payload, indent=1))
    print(json.dumps(payload, indent=1))
    return EXIT_OK


def cmd_ablate(args) -> int:
    from .ablation import run_ablation
    from .manifest import ExperimentManifest, default_manifest

    if args.manifest:
        manifest = ExperimentManifest.load(args.manifest)
    elif args.dataset:
        names = args.variants.split(",") if args.variants else None
        overrides = _train_overrides(args)
        manifest = default_manifest(args.dataset, seed=args.seed,
                                    variant_names=names,
                                    deterministic=args.deterministic,
                                    train_overrides=overrides)
        _apply_train_overrides(manifest, overrides)
    else:
        print("ablate needs --manifest or --dataset", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out or "results")
    run_ablation(manifest, out, quiet=not args.verbose)
    print(f"results in {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import generate_report

    path = generate_report(args.results)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_bench(args) -> int:
    import torch

    from ..evaluation.bench import runtime_bench
    from ..models.gru import GruConfig, GruForecaster
    from ..models.msnet import MotionSequenceNet, MsNetConfig, VARIANT_MASKS
    from ..training.determinism import seed_torch

    seed_torch(args.seed)
    hw = args.image_size
    if args.variant == "GRU":
        model = GruForecaster(GruConfig())
        batch = {"T": torch.randn(1, 50, 2)}
    else:
        cfg = MsNetConfig(input_mask=VARIANT_MASKS[args.variant],
                          image_hw=(hw, hw))
        model = MotionSequenceNet(cfg)
        batch = {"T": torch.randn(1, 50, 2)}
        for key in cfg.image_keys:
            batch[key] = torch.rand(1, 1, cfg.clip_len, hw, hw)
        for key in cfg.flow_keys:
            batch[key] = torch.randn(1, 2, cfg.clip_len - 1, hw, hw)
    res = runtime_bench(model, batch, n_warmup=args.n_warmup, n_iter=args.n_iter)
    print(json.dumps({"variant": args.variant, "median_ms": res.median_ms,
                      "p95_ms": res.p95_ms, "hardware": res.hardware}, indent=1))
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth, "train": cmd_train, "sweep": cmd_sweep, "eval": cmd_eval,
    "ablate": cmd_ablate, "report": cmd_report, "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _merge_config(args, argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "deterministic", False):
        from ..training.determinism import enable_deterministic_mode
        enable_deterministic_mode()
    try:
        return COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
