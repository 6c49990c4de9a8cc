"""Scoring, dataset splitting and evaluation reports.

The answer metric: text and boolean answers must match exactly (case
folded, whitespace trimmed), numeric answers count as correct within a
closed 5% relative ball around the gold value; a gold of exactly 0 demands
an exact 0. A prediction that merely fails to parse as a number falls back
to string comparison, so OCR junk like "100-" scores false against 98.

Reports break accuracy down over the 3x3 question-category x answer-type
grid; the structural x open-vocabulary cell is structurally empty and
reported as NA.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .answers import Answer, AnswerUnavailable, UnparseableQuestion
from .qgen import QuestionInstance
from .templates import ANSWER_TYPES, CATEGORIES

REL_TOL = 0.05  # closed ball: |pred - gold| <= 0.05 |gold|


def _as_float(value) -> float | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value) if math.isfinite(float(value)) else None
    try:
        v = float(str(value).strip())
    except (TypeError, ValueError):
        return None
    return v if math.isfinite(v) else None


def _norm(s: str) -> str:
    return " ".join(str(s).split()).casefold()


def score_answer(pred: Answer | None, gold: Answer) -> bool:
    """True iff the prediction counts as correct under the 5% metric."""
    if pred is None:
        return False
    if gold.kind == "number":
        gv = float(gold.value)
        pv = _as_float(pred.value)
        if pv is not None:
            if gv == 0.0:
                return pv == 0.0
            return abs(pv - gv) <= REL_TOL * abs(gv)
        return _norm(pred.rendered()) == _norm(gold.rendered())
    if gold.kind == "boolean":
        if pred.kind == "boolean":
            return bool(pred.value) == bool(gold.value)
        return _norm(pred.rendered()) == _norm(gold.rendered())
    return _norm(pred.rendered()) == _norm(gold.rendered())


# ---------------------------------------------------------------------------
# splits

@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15)
    seed: int = 0

    def __post_init__(self):
        if any(r < 0 for r in self.ratios):
            raise ValueError("split ratios must be non-negative")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios sum to {sum(self.ratios)}, expected 1")


def split(plots: list, spec: SplitSpec) -> tuple[list, list, list]:
    """Deterministic train/valid/test partition at plot granularity."""
    n = len(plots)
    order = list(np.random.default_rng(spec.seed).permutation(n))
    sizes = [int(math.floor(n * r)) for r in spec.ratios]
    remainders = [n * r - s for r, s in zip(spec.ratios, sizes)]
    while sum(sizes) < n:
        k = max(range(3), key=lambda i: (remainders[i], -i))
        sizes[k] += 1
        remainders[k] = -1.0
    parts: tuple[list, list, list] = ([], [], [])
    pos = 0
    for k, size in enumerate(sizes):
        for idx in order[pos:pos + size]:
            parts[k].append(plots[idx])
        pos += size
    return parts


# ---------------------------------------------------------------------------
# reports

@dataclass
class EvalReport:
    overall_accuracy: float
    accuracy_by: dict[str, dict[str, float | None]]  # category -> answer type
    counts: dict[str, dict[str, int]]
    map_scores: dict[str, float] | None = None  # {"0.5": ..., "0.75": ..., "0.9": ...}
    ocr_accuracy: float | None = None
    mean_table_f1: float | None = None
    verdicts: list[bool] = field(default_factory=list, repr=False)

    def cell(self, category: str, answer_type: str) -> float | None:
        return self.accuracy_by[category][answer_type]

    def to_json(self) -> dict:
        return {
            "overall_accuracy": self.overall_accuracy,
            "accuracy_by": self.accuracy_by,
            "counts": self.counts,
            "map": self.map_scores,
            "ocr_accuracy": self.ocr_accuracy,
            "mean_table_f1": self.mean_table_f1,
        }

    @staticmethod
    def from_json(obj: dict) -> "EvalReport":
        return EvalReport(
            overall_accuracy=obj["overall_accuracy"],
            accuracy_by=obj["accuracy_by"],
            counts=obj["counts"],
            map_scores=obj.get("map"),
            ocr_accuracy=obj.get("ocr_accuracy"),
            mean_table_f1=obj.get("mean_table_f1"),
        )

    def render_text(self) -> str:
        def fmt(v: float | None) -> str:
            return "   NA " if v is None else f"{100 * v:5.1f}%"

        lines = [
            f"overall accuracy: {100 * self.overall_accuracy:.2f}%",
            "",
            f"{'answer type':<16}" + "".join(f"{c:>16}" for c in CATEGORIES),
        ]
        for at in ANSWER_TYPES:
            row = f"{at:<16}"
            for c in CATEGORIES:
                n = self.counts[c][at]
                row += f"{fmt(self.accuracy_by[c][at]):>10} ({n:>4})"
            lines.append(row)
        if self.map_scores:
            pretty = ", ".join(f"mAP@{k}={100 * v:.2f}%" for k, v in sorted(self.map_scores.items()))
            lines.append("")
            lines.append(pretty)
        if self.ocr_accuracy is not None:
            lines.append(f"OCR accuracy: {100 * self.ocr_accuracy:.2f}%")
        if self.mean_table_f1 is not None:
            lines.append(f"mean table F1: {self.mean_table_f1:.3f}")
        return "\n".join(lines) + "\n"

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def evaluate(
    questions: list[QuestionInstance],
    system: Callable[[QuestionInstance], Answer],
    map_scores: dict[str, float] | None = None,
    ocr_accuracy: float | None = None,
    mean_table_f1: float | None = None,
) -> EvalReport:
    """Run the system over gold questions and tabulate the 3x3 grid.

    System exceptions of the AnswerUnavailable / UnparseableQuestion kind
    score as incorrect; anything else propagates.
    """
    if not questions:
        raise ValueError("no questions to evaluate")
    hits: dict[tuple[str, str], int] = {}
    totals: dict[tuple[str, str], int] = {}
    verdicts = []
    for q in questions:
        try:
            pred = system(q)
        except (AnswerUnavailable, UnparseableQuestion):
            pred = None
        ok = score_answer(pred, q.gold_answer)
        verdicts.append(ok)
        key = (q.category, q.answer_type)
        totals[key] = totals.get(key, 0) + 1
        hits[key] = hits.get(key, 0) + (1 if ok else 0)

    accuracy_by: dict[str, dict[str, float | None]] = {}
    counts: dict[str, dict[str, int]] = {}
    for c in CATEGORIES:
        accuracy_by[c] = {}
        counts[c] = {}
        for at in ANSWER_TYPES:
            n = totals.get((c, at), 0)
            counts[c][at] = n
            if n == 0 or (c == "structural" and at == "open_vocab"):
                accuracy_by[c][at] = None
            else:
                accuracy_by[c][at] = hits[(c, at)] / n
    overall = sum(hits.values()) / sum(totals.values())
    return EvalReport(
        overall_accuracy=overall,
        accuracy_by=accuracy_by,
        counts=counts,
        map_scores=map_scores,
        ocr_accuracy=ocr_accuracy,
        mean_table_f1=mean_table_f1,
        verdicts=verdicts,
    )
