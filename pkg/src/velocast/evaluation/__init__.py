from .bench import BenchResult, runtime_bench
from .metrics import (
    BUCKET_ORDER,
    EvalReport,
    aee,
    asaee,
    asaee_from_curve,
    build_report,
    euclidean_errors,
    split_by_motion,
)
from .motion_states import label_motion_states
from .ranking import RankTable, per_vru_ranktable, rank_row, table_from_scores
from .stats import (
    Q_ALPHA_05,
    FriedmanResult,
    NemenyiResult,
    critical_difference,
    friedman,
    nemenyi,
    separated,
)

__all__ = [
    "BenchResult", "runtime_bench", "BUCKET_ORDER", "EvalReport", "aee",
    "asaee", "asaee_from_curve", "build_report", "euclidean_errors",
    "split_by_motion", "label_motion_states", "RankTable", "per_vru_ranktable",
    "rank_row", "table_from_scores", "Q_ALPHA_05", "FriedmanResult",
    "NemenyiResult", "critical_difference", "friedman", "nemenyi", "separated",
]
