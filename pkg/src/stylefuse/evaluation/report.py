"""Evaluation reports: per-question records plus the aggregates they imply.

Serialization is canonical (sorted keys, stable float repr), so a report
produced from the same inputs is byte-identical run over run — the basis
of the replay-determinism guarantee.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from stylefuse.reasoning.records import ATTRIBUTES


@dataclass
class EvalReport:
    config: dict = field(default_factory=dict)
    fitb_accuracy: float | None = None
    recall_at: dict[int, float] | None = None
    lat_hard: float | None = None
    lat_soft: float | None = None
    aat_per_attribute: dict[str, float] | None = None
    aat_total: float | None = None
    questions: list[dict] = field(default_factory=list)

    def to_obj(self) -> dict:
        obj: dict = {"config": self.config}
        if self.fitb_accuracy is not None:
            obj["fitb_accuracy"] = self.fitb_accuracy
        if self.recall_at is not None:
            obj["recall_at"] = {str(k): v for k, v in sorted(self.recall_at.items())}
        if self.lat_hard is not None:
            obj["lat_hard"] = self.lat_hard
        if self.lat_soft is not None:
            obj["lat_soft"] = self.lat_soft
        if self.aat_per_attribute is not None:
            obj["aat_per_attribute"] = dict(sorted(self.aat_per_attribute.items()))
        if self.aat_total is not None:
            obj["aat_total"] = self.aat_total
        obj["questions"] = self.questions
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, ensure_ascii=False)

    def question_lines(self) -> list[str]:
        return [
            json.dumps(q, sort_keys=True, ensure_ascii=False) for q in self.questions
        ]


def merge_reports(*reports: EvalReport) -> EvalReport:
    """Combine fragments from different datasets into one report."""
    merged = EvalReport()
    for report in reports:
        if not merged.config:
            merged.config = report.config
        for name in ("fitb_accuracy", "recall_at", "lat_hard", "lat_soft",
                     "aat_per_attribute", "aat_total"):
            value = getattr(report, name)
            if value is not None:
                setattr(merged, name, value)
        merged.questions.extend(report.questions)
    merged.questions.sort(key=lambda q: (q.get("kind", ""), q.get("question_id", "")))
    return merged


def aggregate_fitb(records: list[dict]) -> float:
    correct = sum(1 for r in records if r["correct"])
    return correct / len(records)


def aggregate_recall(records: list[dict], ks: list[int]) -> dict[int, float]:
    return {
        k: sum(1 for r in records if r["hits"][str(k)]) / len(records)
        for k in ks
    }


def aggregate_a100(records: list[dict]) -> dict:
    lat = [r for r in records if r["test_kind"] == "lat"]
    aat = [r for r in records if r["test_kind"] == "aat"]
    out: dict = {}
    if lat:
        out["lat_hard"] = sum(1 for r in lat if r["correct"]) / len(lat)
        out["lat_soft"] = sum(r["vote_share_chosen"] for r in lat) / len(lat)
    if aat:
        out["aat_total"] = sum(1 for r in aat if r["correct"]) / len(aat)
        per: dict[str, float] = {}
        for attribute in ATTRIBUTES:
            tagged = [r for r in aat if r["attribute_tag"] == attribute]
            if tagged:
                per[attribute] = sum(1 for r in tagged if r["correct"]) / len(tagged)
        out["aat_per_attribute"] = per
    return out


def verify_report(report: EvalReport) -> None:
    """Recompute every aggregate from the per-question records, exactly.

    Raises AssertionError on any mismatch; used by tests and the harness's
    own self-check.
    """
    fitb = [q for q in report.questions if q.get("kind") == "fitb"]
    if report.fitb_accuracy is not None:
        assert fitb, "fitb_accuracy reported without fitb records"
        assert report.fitb_accuracy == aggregate_fitb(fitb)
    cir = [q for q in report.questions if q.get("kind") == "cir"]
    if report.recall_at is not None:
        assert cir, "recall_at reported without cir records"
        ks = sorted(report.recall_at.keys())
        assert report.recall_at == aggregate_recall(cir, ks)
    a100 = [q for q in report.questions if q.get("kind") == "a100"]
    if report.lat_hard is not None or report.aat_total is not None:
        agg = aggregate_a100(a100)
        for name in ("lat_hard", "lat_soft", "aat_total"):
            assert getattr(report, name) == agg.get(name)
        if report.aat_per_attribute is not None:
            assert report.aat_per_attribute == agg.get("aat_per_attribute")
