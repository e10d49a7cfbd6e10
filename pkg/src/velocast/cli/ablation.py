"""Ablation runs: train the configured variants, evaluate on the held-out
VRUs, persist raw per-sample errors, and emit tables, statistics, and plots.
Every number in the emitted tables is re-derivable from the persisted arrays.
"""
from __future__ import annotations

import json
import os
import time
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from ..core.dataset_io import dataset_checksum, load_dataset, read_meta
from ..core.rng import substream_seed
from ..evaluation.bench import runtime_bench
from ..evaluation.metrics import BUCKET_ORDER, build_report, euclidean_errors, split_by_motion
from ..evaluation.plots import plot_aee_grid, plot_cd_diagram, plot_forecast_examples
from ..evaluation.ranking import per_vru_ranktable
from ..evaluation.stats import friedman, nemenyi
from ..models.gru import GruConfig, GruForecaster
from ..models.msnet import HEADLINE_VARIANTS, MotionSequenceNet, MsNetConfig
from ..models.checkpoint import save_checkpoint
from ..training.determinism import enable_deterministic_mode, seed_torch
from ..training.loop import TrainConfig, collate, forward_model, required_keys, train
from ..training.splits import split_by_vru
from .manifest import ExperimentManifest, ManifestError

STREAM_ORDER = ("I1", "I2", "OF1", "OF2", "T")


class ResultsLockedError(RuntimeError):
    """Another run holds the results directory."""


def safe_name(variant: str) -> str:
    return variant.replace(";", "-")


def build_model(name: str, cfg: dict, meta) -> torch.nn.Module:
    if cfg["kind"] == "gru":
        return GruForecaster(GruConfig(
            gru_hidden=tuple(cfg["gru_hidden"]), mlp_hidden=tuple(cfg["mlp_hidden"]),
            past_len=meta.past_len, horizon_count=meta.horizons.count))
    return MotionSequenceNet(MsNetConfig(
        input_mask=frozenset(cfg["input_mask"]),
        width_multiplier=cfg.get("width_multiplier", 0.2),
        traj_mlp=tuple(cfg.get("traj_mlp", (100, 100, 100))),
        head_mlp=tuple(cfg.get("head_mlp", (100, 100, 100))),
        clip_len=meta.clip_len, image_hw=meta.image_hw,
        past_len=meta.past_len, horizon_count=meta.horizons.count))


def train_config(manifest: ExperimentManifest, name: str) -> TrainConfig:
    merged = dict(manifest.train)
    merged.update(manifest.variants[name].get("train_overrides", {}))
    return TrainConfig(
        batch_size=int(merged["batch_size"]),
        learning_rate=float(merged["learning_rate"]),
        betas=tuple(merged.get("betas", (0.9, 0.999))),
        eps=float(merged.get("eps", 1e-8)),
        max_epochs=int(merged["max_epochs"]),
        patience=int(merged.get("patience", 10)),
        split_fractions=tuple(merged.get("split_fractions", (0.7, 0.15, 0.15))),
        seed=substream_seed(manifest.seed, f"train/{name}"),
        val_metric=merged.get("val_metric", "loss"))


def predict_all(model, samples, keys, chunk: int = 128) -> np.ndarray:
    model.eval()
    out = []
    with torch.no_grad():
        for i in range(0, len(samples), chunk):
            batch = collate(samples[i:i + chunk], keys)
            out.append(forward_model(model, batch).numpy())
    return np.concatenate(out, axis=0)


def _acquire_lock(results: Path):
    lock = results / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ResultsLockedError(
            f"results directory {results} is locked by another run "
            f"(remove {lock} if that run is dead)")
    os.write(fd, str(os.getpid()).encode())
    os.close(fd)
    return lock


def run_ablation(manifest: ExperimentManifest, results_dir: str | Path,
                 quiet: bool = True) -> Path:
    """Train and evaluate every variant in the manifest; resumable per variant.
    Refuses to run when the dataset checksum disagrees with the manifest."""
    manifest.validate()
    actual = dataset_checksum(manifest.dataset_path)
    if actual != manifest.dataset_checksum:
        raise ManifestError(
            f"dataset checksum mismatch: manifest {manifest.dataset_checksum[:12]}..., "
            f"directory {actual[:12]}...")

    results = Path(results_dir)
    results.mkdir(parents=True, exist_ok=True)
    lock = _acquire_lock(results)
    try:
        return _run_locked(manifest, results, quiet)
    finally:
        lock.unlink(missing_ok=True)


def _run_locked(manifest: ExperimentManifest, results: Path, quiet: bool) -> Path:
    if manifest.deterministic:
        enable_deterministic_mode()
    meta = read_meta(manifest.dataset_path)
    need_clips = any(cfg["kind"] == "msnet" for cfg in manifest.variants.values())
    samples = load_dataset(manifest.dataset_path, load_clips=need_clips)
    splits = split_by_vru(samples, tuple(manifest.train["split_fractions"]),
                          seed=manifest.seed)
    test = splits["test"]

    (results / "test_samples.json").write_text(json.dumps([
        {"vru_id": s.vru_id, "t0": s.t0, "motion_state": s.motion_state.value,
         "occluded": list(s.occluded)} for s in test], indent=0))

    resolved_shapes: dict[str, dict] = {}
    for name, cfg in manifest.variants.items():
        vdir = results / "variants" / safe_name(name)
        if (vdir / "report.json").exists():
            if not quiet:
                print(f"[{name}] complete, skipping (resume)")
            continue
        vdir.mkdir(parents=True, exist_ok=True)
        seed_torch(substream_seed(manifest.seed, f"init/{name}"))
        model = build_model(name, cfg, meta)
        resolved_shapes[name] = {k: list(v.shape) for k, v in model.state_dict().items()}
        tcfg = train_config(manifest, name)
        t0 = time.perf_counter()
        result = train(model, splits["train"], splits["val"], tcfg,
                       log_path=vdir / "train_log.csv", quiet=quiet)
        wall_s = time.perf_counter() - t0

        keys = required_keys(model)
        forecasts = predict_all(model, test, keys)
        errors = euclidean_errors(test, forecasts.astype(np.float64))
        np.save(vdir / "forecasts.npy", forecasts.astype(np.float32))
        np.save(vdir / "errors.npy", errors)
        report = build_report(test, forecasts.astype(np.float64))
        bench = runtime_bench(model, collate(test[:1], keys), n_warmup=3, n_iter=30)
        (vdir / "report.json").write_text(json.dumps({
            "variant": name,
            "asaee": report.asaee,
            "per_state": report.per_state,
            "n_samples": report.n_samples,
            "aee_curve": [float(x) for x in report.aee_curve],
            "best_val": result.best_val,
            "best_epoch": result.best_epoch,
            "epochs_run": len(result.history),
            "train_wall_s": wall_s,
            "bench_median_ms": bench.median_ms,
            "bench_p95_ms": bench.p95_ms,
            "bench_hardware": bench.hardware,
        }, indent=1, sort_keys=True))
        save_checkpoint(model, vdir / "checkpoint", config=cfg,
                        seed=manifest.seed, step=result.steps)
        if not quiet:
            print(f"[{name}] ASAEE {report.asaee:.4f} "
                  f"(val {result.best_val:.5f}, {wall_s:.0f}s)")

    manifest.save(results / "manifest.json", resolved_shapes=resolved_shapes or None)
    emit_outputs(manifest, results, test)
    return results


def _load_variant_reports(manifest, results: Path) -> dict[str, dict]:
    reports = {}
    for name in manifest.variants:
        path = results / "variants" / safe_name(name) / "report.json"
        if path.exists():
            reports[name] = json.loads(path.read_text())
    return reports


def emit_outputs(manifest: ExperimentManifest, results: Path,
                 test: Sequence | None = None) -> None:
    """Write tables, rank statistics, and figures from persisted artifacts."""
    if test is None:
        need_clips = False
        samples = load_dataset(manifest.dataset_path, load_clips=need_clips)
        test = split_by_vru(samples, tuple(manifest.train["split_fractions"]),
                            seed=manifest.seed)["test"]
    reports = _load_variant_reports(manifest, results)
    if not reports:
        return

    # Overall table: one row per variant, input flags as in the ablation grid.
    lines = ["model\tI1\tI2\tOF1\tOF2\tT\tASAEE_m_per_s"]
    for name, rep in reports.items():
        mask = set(manifest.variants[name]["input_mask"])
        flags = "\t".join("x" if k in mask else "" for k in STREAM_ORDER)
        lines.append(f"{name}\t{flags}\t{rep['asaee']:.6f}")
    (results / "overall_asaee.tsv").write_text("\n".join(lines) + "\n")

    lines = ["model\t" + "\t".join(BUCKET_ORDER)]
    for name, rep in reports.items():
        cells = "\t".join(f"{rep['per_state'][b]:.6f}" for b in BUCKET_ORDER)
        lines.append(f"{name}\t{cells}")
    (results / "per_state_asaee.tsv").write_text("\n".join(lines) + "\n")

    lines = ["model\tmedian_ms\tp95_ms\thardware"]
    for name, rep in reports.items():
        lines.append(f"{name}\t{rep['bench_median_ms']:.3f}\t"
                     f"{rep['bench_p95_ms']:.3f}\t{rep['bench_hardware']}")
    (results / "runtime.tsv").write_text("\n".join(lines) + "\n")

    _emit_rank_stats(manifest, results, test, reports)
    _emit_figures(manifest, results, test, reports)


def _bucket_tables(test, forecasts_by_model):
    buckets = split_by_motion(test)
    tables = {}
    for bucket in BUCKET_ORDER:
        idx = buckets[bucket]
        if idx.size == 0:
            continue
        sub = [test[i] for i in idx]
        fc = {m: arr[idx] for m, arr in forecasts_by_model.items()}
        vrus_present = {s.vru_id for s in sub}
        if len(vrus_present) < 2:
            continue
        tables[bucket] = per_vru_ranktable(sub, fc)
    return tables


def _emit_rank_stats(manifest, results: Path, test, reports) -> None:
    headline = [n for n in HEADLINE_VARIANTS if n in reports]
    if len(headline) < 2 or not test:
        return
    forecasts = {n: np.load(results / "variants" / safe_name(n) / "forecasts.npy")
                 .astype(np.float64) for n in headline}
    stats: dict[str, dict] = {}
    for bucket, table in _bucket_tables(test, forecasts).items():
        fr = friedman(table)
        nem = nemenyi(table)
        stats[bucket] = {
            "models": table.model_names,
            "n_vrus": table.n_subjects,
            "mean_ranks": {m: float(r) for m, r in
                           zip(table.model_names, table.mean_ranks)},
            "friedman_statistic": fr.statistic,
            "friedman_corrected": fr.corrected_statistic,
            "friedman_p": fr.p_value,
            "critical_difference": nem.critical_difference,
            "significant_pairs": sorted(
                f"{a}|{b}" for i, a in enumerate(table.model_names)
                for j, b in enumerate(table.model_names)
                if i < j and nem.significant[i, j]),
            "groups": [list(g) for g in nem.groups],
        }
        plot_cd_diagram(nem, results / "figures" / f"cd_{bucket}.png", title=bucket)
    (results / "rank_stats.json").write_text(json.dumps(stats, indent=1, sort_keys=True))


def _emit_figures(manifest, results: Path, test, reports) -> None:
    meta = read_meta(manifest.dataset_path)
    headline = [n for n in HEADLINE_VARIANTS if n in reports] or list(reports)
    buckets = split_by_motion(test)
    errors = {}
    for name in headline:
        errors[name] = np.load(results / "variants" / safe_name(name) / "errors.npy")
    curves_by_bucket = {}
    for bucket in BUCKET_ORDER:
        idx = buckets[bucket]
        if idx.size == 0:
            continue
        curves_by_bucket[bucket] = {name: err[idx].mean(axis=0)
                                    for name, err in errors.items()}
    plot_aee_grid(meta.horizons, curves_by_bucket, results / "figures" / "aee_curves.png")

    wanted = ("left", "straight", "right")
    indices = [int(buckets[b][0]) for b in wanted if buckets[b].size > 0]
    if indices:
        overlay_models = [n for n in ("MS_OF", "GRU") if n in reports] or headline[:2]
        forecasts = {n: np.load(results / "variants" / safe_name(n) / "forecasts.npy")
                     for n in overlay_models}
        plot_forecast_examples(test, forecasts, indices,
                               results / "figures" / "example_forecasts.png")
