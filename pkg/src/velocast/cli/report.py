"""Human-readable summary generation from a results directory."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..core.dataset_io import read_meta
from ..core.horizons import HorizonSet
from ..evaluation.metrics import BUCKET_ORDER, asaee_from_curve
from .manifest import ExperimentManifest
from .ablation import emit_outputs, safe_name


class MissingArtifactsError(FileNotFoundError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("missing result artifacts: " + ", ".join(self.missing))


def generate_report(results_dir: str | Path, strict: bool = False) -> Path:
    """Re-derive tables from persisted per-sample errors and render summary.md.

    Missing artifacts are listed; unless ``strict``, a partial report is still
    produced from whatever exists."""
    results = Path(results_dir)
    manifest_path = results / "manifest.json"
    expected = ["manifest.json", "test_samples.json", "overall_asaee.tsv"]
    missing = [e for e in expected if not (results / e).exists()]
    if "manifest.json" in missing:
        raise MissingArtifactsError(missing)
    manifest = ExperimentManifest.load(manifest_path)

    variant_reports = {}
    for name in manifest.variants:
        vdir = results / "variants" / safe_name(name)
        if not (vdir / "report.json").exists():
            missing.append(f"variants/{safe_name(name)}/report.json")
            continue
        variant_reports[name] = json.loads((vdir / "report.json").read_text())
    if strict and missing:
        raise MissingArtifactsError(missing)
    if not variant_reports:
        raise MissingArtifactsError(missing or ["variants/*"])

    # Regenerate derived tables/figures from the raw arrays.
    try:
        test = None
        emit_outputs(manifest, results, test)
    except FileNotFoundError as exc:
        missing.append(str(exc))

    meta = read_meta(manifest.dataset_path) if Path(manifest.dataset_path).exists() else None
    lines = ["# Ablation results", ""]
    if missing:
        lines += ["**Missing artifacts:** " + ", ".join(missing), ""]
    lines += [f"- dataset: `{manifest.dataset_path}` "
              f"(checksum `{manifest.dataset_checksum[:12]}...`)",
              f"- manifest hash: `{manifest.content_hash()[:12]}...`",
              f"- seed: {manifest.seed}", ""]

    lines += ["## Overall ASAEE", "", "| model | ASAEE (m/s) | consistency |",
              "|---|---|---|"]
    for name, rep in variant_reports.items():
        vdir = results / "variants" / safe_name(name)
        check = ""
        if (vdir / "errors.npy").exists() and meta is not None:
            errors = np.load(vdir / "errors.npy")
            recomputed = asaee_from_curve(errors.mean(axis=0), meta.horizons)
            check = "ok" if abs(recomputed - rep["asaee"]) < 1e-9 else "MISMATCH"
        lines.append(f"| {name} | {rep['asaee']:.6f} | {check} |")

    lines += ["", "## Per-motion-state ASAEE (m/s)", "",
              "| model | " + " | ".join(BUCKET_ORDER) + " |",
              "|" + "---|" * (len(BUCKET_ORDER) + 1)]
    for name, rep in variant_reports.items():
        cells = " | ".join(f"{rep['per_state'][b]:.4f}" for b in BUCKET_ORDER)
        lines.append(f"| {name} | {cells} |")

    lines += ["", "## Runtime", "", "| model | median (ms) | p95 (ms) |", "|---|---|---|"]
    for name, rep in variant_reports.items():
        lines.append(f"| {name} | {rep['bench_median_ms']:.3f} | {rep['bench_p95_ms']:.3f} |")
    if variant_reports:
        hw = next(iter(variant_reports.values()))["bench_hardware"]
        lines += ["", f"Measured on: {hw}"]

    rank_path = results / "rank_stats.json"
    if rank_path.exists():
        stats = json.loads(rank_path.read_text())
        lines += ["", "## Rank statistics (per-VRU ASAEE)", ""]
        for bucket, st in stats.items():
            groups = "; ".join("{" + ", ".join(g) + "}" for g in st["groups"])
            lines += [f"- **{bucket}** (N={st['n_vrus']}): Friedman p = "
                      f"{st['friedman_p']:.4g}, CD = {st['critical_difference']:.3f}, "
                      f"groups: {groups}"]

    figures = sorted((results / "figures").glob("*.png")) if (results / "figures").exists() else []
    if figures:
        lines += ["", "## Figures", ""]
        lines += [f"![{f.stem}](figures/{f.name})" for f in figures]

    out = results / "summary.md"
    out.write_text("\n".join(lines) + "\n")
    return out
