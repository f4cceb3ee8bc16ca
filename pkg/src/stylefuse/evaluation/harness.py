"""Benchmark runners over question sets, with optional thread parallelism.

Questions are independent; a thread pool may evaluate them concurrently,
but records are assembled sorted by question id so the report is
deterministic at any parallelism.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from stylefuse.datastore.manifest import A100Question, CirQuery, FitbQuestion
from stylefuse.errors import (
    MissingAttributeTag,
    MissingItem,
    MissingVoteShares,
    UnknownItem,
)
from stylefuse.evaluation.report import (
    EvalReport,
    aggregate_a100,
    aggregate_fitb,
    aggregate_recall,
)
from stylefuse.pipeline import EngineRuntime, PipelineConfig, run_fitb, run_recommend

DEFAULT_RECALL_KS = (10, 30, 50)

# chooser(question, runtime, config) -> (scores, chosen_index, diagnostics_obj)
Chooser = Callable[[object, EngineRuntime, PipelineConfig], tuple[list[float], int, dict]]


def _map_questions(items: Sequence, worker, parallelism: int) -> list:
    if parallelism <= 1:
        return [worker(item) for item in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(worker, items))


def _pipeline_chooser(
    question, runtime: EngineRuntime, config: PipelineConfig
) -> tuple[list[float], int, dict]:
    scores, chosen, outcome = run_fitb(
        runtime, question.outfit_item_ids, question.candidate_item_ids, config
    )
    return scores, chosen, outcome.query.diagnostics.to_obj()


def eval_fitb(
    questions: Iterable[FitbQuestion],
    runtime: EngineRuntime,
    config: PipelineConfig,
    parallelism: int = 1,
    chooser: Chooser | None = None,
) -> EvalReport:
    """Answer each candidate-set question; accuracy = correct / total."""
    questions = list(questions)
    choose = chooser if chooser is not None else _pipeline_chooser

    def worker(question: FitbQuestion) -> dict:
        try:
            scores, chosen, diagnostics = choose(question, runtime, config)
        except UnknownItem as exc:
            raise MissingItem(f"question {question.question_id}: {exc}") from exc
        return {
            "kind": "fitb",
            "question_id": question.question_id,
            "chosen_index": chosen,
            "chosen_item_id": question.candidate_item_ids[chosen],
            "answer_index": question.answer_index,
            "correct": chosen == question.answer_index,
            "scores": scores,
            "diagnostics": diagnostics,
        }

    records = _map_questions(questions, worker, parallelism)
    records.sort(key=lambda r: r["question_id"])
    report = EvalReport(config=config.to_obj(), questions=records)
    if records:
        report.fitb_accuracy = aggregate_fitb(records)
    return report


def eval_cir(
    queries: Iterable[CirQuery],
    runtime: EngineRuntime,
    config: PipelineConfig,
    ks: Sequence[int] = DEFAULT_RECALL_KS,
    parallelism: int = 1,
) -> EvalReport:
    """Category-constrained retrieval; R@K = queries with the truth in top K."""
    queries = list(queries)
    ks = sorted(set(int(k) for k in ks))
    max_k = max(ks) if ks else 0
    catalog = runtime.catalog

    def worker(query: CirQuery) -> dict:
        if query.ground_truth_item_id not in catalog.id_index:
            raise MissingItem(f"query {query.query_id}: ground truth not in catalog")
        truth = catalog.item(query.ground_truth_item_id)
        if truth.category != query.target_category:
            raise MissingItem(
                f"query {query.query_id}: ground truth category {truth.category!r} "
                f"!= target {query.target_category!r}"
            )
        try:
            ranking, outcome = run_recommend(
                runtime, query.outfit_item_ids, query.target_category, max_k, config
            )
        except UnknownItem as exc:
            raise MissingItem(f"query {query.query_id}: {exc}") from exc
        top_ids = ranking.item_ids()
        rank = top_ids.index(query.ground_truth_item_id) + 1 \
            if query.ground_truth_item_id in top_ids else None
        return {
            "kind": "cir",
            "question_id": query.query_id,
            "ground_truth_item_id": query.ground_truth_item_id,
            "rank": rank,
            "hits": {str(k): bool(rank is not None and rank <= k) for k in ks},
            "top_item_ids": top_ids,
            "diagnostics": outcome.query.diagnostics.to_obj(),
        }

    records = _map_questions(queries, worker, parallelism)
    records.sort(key=lambda r: r["question_id"])
    report = EvalReport(config=config.to_obj(), questions=records)
    if records:
        report.recall_at = aggregate_recall(records, list(ks))
    return report


def eval_a100(
    questions: Iterable[A100Question],
    runtime: EngineRuntime,
    config: PipelineConfig,
    parallelism: int = 1,
    chooser: Chooser | None = None,
) -> EvalReport:
    """Aesthetic tests: hard/soft crowd scores plus per-attribute expert scores."""
    questions = list(questions)
    for question in questions:
        if question.test_kind == "lat" and question.vote_shares is None:
            raise MissingVoteShares(f"question {question.question_id} lacks vote_shares")
        if question.test_kind == "aat" and question.attribute_tag is None:
            raise MissingAttributeTag(f"question {question.question_id} lacks attribute_tag")
    choose = chooser if chooser is not None else _pipeline_chooser

    def worker(question: A100Question) -> dict:
        try:
            scores, chosen, diagnostics = choose(question, runtime, config)
        except UnknownItem as exc:
            raise MissingItem(f"question {question.question_id}: {exc}") from exc
        record = {
            "kind": "a100",
            "question_id": question.question_id,
            "test_kind": question.test_kind,
            "chosen_index": chosen,
            "chosen_item_id": question.candidate_item_ids[chosen],
            "answer_index": question.answer_index,
            "correct": chosen == question.answer_index,
            "scores": scores,
            "attribute_tag": question.attribute_tag,
            "diagnostics": diagnostics,
        }
        if question.test_kind == "lat":
            record["vote_share_chosen"] = float(question.vote_shares[chosen])
        return record

    records = _map_questions(questions, worker, parallelism)
    records.sort(key=lambda r: r["question_id"])
    report = EvalReport(config=config.to_obj(), questions=records)
    for name, value in aggregate_a100(records).items():
        setattr(report, name, value)
    return report


@dataclass
class AblationRow:
    label: str
    config: PipelineConfig
    report: EvalReport


@dataclass
class AblationResult:
    rows: list[AblationRow]

    _METRICS = (
        ("lat_hard", "LATs"),
        ("lat_soft", "mLATs"),
        ("aat_total", "AATs"),
        ("fitb_accuracy", "FITB ACC"),
    )

    def _columns(self) -> list[tuple[str, str]]:
        present = []
        for attr, header in self._METRICS:
            if any(getattr(row.report, attr) is not None for row in self.rows):
                present.append((attr, header))
        ks: set[int] = set()
        for row in self.rows:
            if row.report.recall_at:
                ks.update(row.report.recall_at.keys())
        for k in sorted(ks):
            present.append((f"recall@{k}", f"R@{k}"))
        return present

    def format_table(self) -> str:
        """Toggle marks plus one column per available metric."""
        columns = self._columns()
        headers = ["Config", "Ide.", "SVAF", "Aes."] + [h for _, h in columns]
        lines = [" | ".join(headers)]
        lines.append(" | ".join("-" * len(h) for h in headers))
        for row in self.rows:
            cells = [
                row.label,
                "on" if row.config.identify_step else "off",
                "on" if row.config.svaf_enabled else "off",
                "on" if row.config.aesthetic_thoughts else "off",
            ]
            for attr, _ in columns:
                if attr.startswith("recall@"):
                    k = int(attr.split("@")[1])
                    value = (row.report.recall_at or {}).get(k)
                else:
                    value = getattr(row.report, attr)
                cells.append("-" if value is None else f"{value:.4f}")
            lines.append(" | ".join(cells))
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        import json

        lines = []
        for row in self.rows:
            obj = row.report.to_obj()
            obj["label"] = row.label
            lines.append(json.dumps(obj, sort_keys=True, ensure_ascii=False))
        return "\n".join(lines) + "\n"


def run_ablation(
    grid: Sequence[tuple[str, PipelineConfig]],
    datasets: dict,
    runtime: EngineRuntime,
    parallelism: int = 1,
) -> AblationResult:
    """One report row per config, in grid order.

    ``datasets`` maps any of {"fitb", "cir", "a100"} to loaded question
    lists; each row evaluates every provided dataset and merges fragments.
    """
    from stylefuse.evaluation.report import merge_reports

    rows: list[AblationRow] = []
    for label, config in grid:
        fragments = []
        if datasets.get("a100"):
            fragments.append(eval_a100(datasets["a100"], runtime, config, parallelism))
        if datasets.get("fitb"):
            fragments.append(eval_fitb(datasets["fitb"], runtime, config, parallelism))
        if datasets.get("cir"):
            fragments.append(eval_cir(
                datasets["cir"], runtime, config,
                ks=datasets.get("ks", DEFAULT_RECALL_KS), parallelism=parallelism,
            ))
        report = merge_reports(*fragments) if fragments else EvalReport(config=config.to_obj())
        if not fragments:
            report.config = config.to_obj()
        rows.append(AblationRow(label=label, config=config, report=report))
    return AblationResult(rows=rows)


def standard_grid(base: PipelineConfig | None = None) -> list[tuple[str, PipelineConfig]]:
    """The four-row grid: full, identify off, fusion off, fusion+thoughts off."""
    from dataclasses import replace

    base = base if base is not None else PipelineConfig()
    return [
        ("full", replace(base)),
        ("ide_off", replace(base, identify_step=False)),
        ("svaf_off", replace(base, svaf_enabled=False)),
        ("svaf_aes_off", replace(base, svaf_enabled=False, aesthetic_thoughts=False)),
    ]
