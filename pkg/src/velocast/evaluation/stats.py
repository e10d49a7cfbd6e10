"""Friedman test and Nemenyi post-hoc analysis over rank tables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .ranking import RankTable

# Two-tailed Nemenyi critical values at alpha = 0.05 (studentized range at
# infinite dof divided by sqrt(2)), for k = 2..10 compared models.
Q_ALPHA_05 = {
    2: 1.959964, 3: 2.343701, 4: 2.569032, 5: 2.727774, 6: 2.849705,
    7: 2.948320, 8: 3.030879, 9: 3.101730, 10: 3.163684,
}


@dataclass
class FriedmanResult:
    statistic: float            # uncorrected chi-square statistic
    p_value: float              # from the tie-corrected statistic
    corrected_statistic: float  # tie-corrected variant
    dof: int


@dataclass
class NemenyiResult:
    model_names: list[str]
    mean_ranks: np.ndarray
    critical_difference: float
    significant: np.ndarray     # (k, k) bool; |mean-rank gap| > CD
    groups: list[tuple[str, ...]]  # maximal sets not mutually distinguished


def friedman(table: RankTable) -> FriedmanResult:
    """Chi-square Friedman statistic over the table's within-row ranks, with
    the standard tie correction; fully tied tables get p = 1 by convention."""
    n, k = table.ranks.shape
    if n < 2 or k < 2:
        raise ValueError("Friedman test needs at least 2 rows and 2 models")
    mean_ranks = table.mean_ranks
    stat = 12.0 * n / (k * (k + 1)) * float(np.sum((mean_ranks - (k + 1) / 2.0) ** 2))

    ties = 0.0
    for row in table.ranks:
        _, counts = np.unique(row, return_counts=True)
        ties += float(np.sum(counts ** 3 - counts))
    correction = 1.0 - ties / (n * k * (k * k - 1.0))
    if correction <= 0.0:
        # Every row fully tied: no evidence of any difference.
        return FriedmanResult(statistic=0.0, p_value=1.0,
                              corrected_statistic=0.0, dof=k - 1)
    corrected = stat / correction
    p = float(chi2.sf(corrected, k - 1))
    return FriedmanResult(statistic=stat, p_value=p,
                          corrected_statistic=corrected, dof=k - 1)


def critical_difference(k: int, n: int, alpha: float = 0.05) -> float:
    if alpha != 0.05:
        raise ValueError(f"only alpha = 0.05 is tabulated, got {alpha}")
    if k not in Q_ALPHA_05:
        raise ValueError(f"unsupported number of models k={k}; tabulated range "
                         f"is [2, 10]")
    return Q_ALPHA_05[k] * float(np.sqrt(k * (k + 1) / (6.0 * n)))


def nemenyi(table: RankTable, alpha: float = 0.05) -> NemenyiResult:
    """Pairwise mean-rank comparison: a pair differs significantly exactly
    when its mean-rank gap exceeds the critical difference."""
    n, k = table.ranks.shape
    cd = critical_difference(k, n, alpha)
    mean_ranks = table.mean_ranks
    gaps = np.abs(mean_ranks[:, None] - mean_ranks[None, :])
    significant = gaps > cd
    np.fill_diagonal(significant, False)

    order = np.argsort(mean_ranks, kind="stable")
    groups: list[tuple[str, ...]] = []
    for i in range(k):
        j = i
        while j + 1 < k and mean_ranks[order[j + 1]] - mean_ranks[order[i]] <= cd:
            j += 1
        member_names = tuple(table.model_names[m] for m in order[i:j + 1])
        if not any(set(member_names) <= set(g) for g in groups):
            groups.append(member_names)
    return NemenyiResult(model_names=list(table.model_names), mean_ranks=mean_ranks,
                         critical_difference=cd, significant=significant,
                         groups=groups)


def separated(result: NemenyiResult, model_a: str, model_b: str) -> bool:
    ia = result.model_names.index(model_a)
    ib = result.model_names.index(model_b)
    return bool(result.significant[ia, ib])
