"""Benchmark harness: FITB accuracy, Recall@K, aesthetic-test scores, ablation."""

from stylefuse.evaluation.harness import eval_a100, eval_cir, eval_fitb, run_ablation
from stylefuse.evaluation.report import EvalReport, merge_reports, verify_report

__all__ = [
    "EvalReport",
    "eval_a100",
    "eval_cir",
    "eval_fitb",
    "merge_reports",
    "run_ablation",
    "verify_report",
]
