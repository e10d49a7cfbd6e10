"""Per-VRU score tables and within-row ranks (average ranks on ties)."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..core.sample import Sample
from ..core.trajectory import ForecastResult
from .metrics import asaee


def rank_row(scores: np.ndarray) -> np.ndarray:
    """Ranks 1..k, lowest score best; tied scores share the average rank."""
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@dataclass
class RankTable:
    vru_ids: list[str]
    model_names: list[str]
    scores: np.ndarray  # (N, k) per-VRU ASAEE
    ranks: np.ndarray   # (N, k) within-row ranks, 1 = best

    @property
    def n_subjects(self) -> int:
        return len(self.vru_ids)

    @property
    def n_models(self) -> int:
        return len(self.model_names)

    @property
    def mean_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)


def table_from_scores(scores: np.ndarray, model_names: Sequence[str],
                      vru_ids: Sequence[str] | None = None) -> RankTable:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] != len(model_names):
        raise ValueError("scores must be (N, k) with one column per model")
    if scores.shape[1] < 2:
        raise ValueError("ranking needs at least 2 models")
    if scores.shape[0] < 1:
        raise ValueError("ranking needs at least 1 row")
    vru_ids = list(vru_ids) if vru_ids is not None else [str(i) for i in range(len(scores))]
    ranks = np.stack([rank_row(row) for row in scores])
    return RankTable(vru_ids=vru_ids, model_names=list(model_names),
                     scores=scores, ranks=ranks)


def per_vru_ranktable(samples: Sequence[Sample],
                      forecasts_by_model: Mapping[str, Sequence[ForecastResult] | np.ndarray],
                      ) -> RankTable:
    """Per-VRU ASAEE per model, ranked within each VRU row."""
    if len(forecasts_by_model) < 2:
        raise ValueError("need forecasts from at least 2 models")
    for name, fc in forecasts_by_model.items():
        if len(fc) != len(samples):
            raise ValueError(f"model {name!r} is missing forecasts "
                             f"({len(fc)} for {len(samples)} samples)")
    by_vru: dict[str, list[int]] = defaultdict(list)
    for i, s in enumerate(samples):
        by_vru[s.vru_id].append(i)
    vru_ids = sorted(by_vru)
    names = list(forecasts_by_model)
    scores = np.zeros((len(vru_ids), len(names)))
    for r, vid in enumerate(vru_ids):
        idx = by_vru[vid]
        subset = [samples[i] for i in idx]
        for c, name in enumerate(names):
            fc = forecasts_by_model[name]
            arr = fc[idx] if isinstance(fc, np.ndarray) else [fc[i] for i in idx]
            scores[r, c] = asaee(subset, arr)
    return table_from_scores(scores, names, vru_ids)
