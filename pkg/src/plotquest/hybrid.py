"""Hybrid answering: route each question to the classification-style branch
(structural and yes/no questions, plus the plot-text retrieval templates
that resolve against geometry: ordinal bar order, tick step, title, axis
labels) or to the multi-stage pipeline branch (everything whose answer
lives in the extracted table).

The classification branch answers from the detection set directly: element
counts, positions, style metadata and tick/legend texts. For comparative
yes/no questions it reconstructs per-series value readings geometrically
(tick parsing + interpolation) but never builds or consults the extracted
table; the pipeline branch, by contrast, is exactly ``tableqa.answer``
over ``sie.extract_table``.

Routing is a pure function of the question text. Unparseable questions
fall through to the pipeline branch, which fails loudly there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .answers import Answer, AnswerUnavailable, UnparseableQuestion, number, text, yes_no
from .detsim import Detection, DetectionSet
from .plotgen import PlotAnnotation
from .qgen import count_line_crossings, is_monotonic_nondecreasing
from .sie import (
    ExtractionError, _canonical, _infer_orientation, _interp, _tick_refs,
    associate_legend, extract_table, parse_tick_value,
)
from .tableqa import answer as table_answer
from .tableqa import parse as parse_question
from .templates import TemplateMatcher, default_matcher, parse_ordinal

CLASSIFICATION_BRANCH = "classification_branch"
PIPELINE_BRANCH = "pipeline_branch"

# data-retrieval templates whose answers are plot text or element order,
# not table content; they resolve against annotation geometry
_ANNOTATION_TEMPLATES = frozenset({19, 20, 21, 22, 23, 24, 26, 28, 30, 31})

_SCI_RE = re.compile(r"-?\d\.\d{3}e[+-]\d+")


@dataclass(frozen=True)
class Route:
    branch: str
    reason: str


def route(question: str, matcher: TemplateMatcher | None = None) -> Route:
    """Branch decision from the question text alone."""
    m = (matcher or default_matcher()).match(question)
    if m is None:
        return Route(PIPELINE_BRANCH, "unparseable: pipeline is the safe default")
    template, _ = m
    if template.category == "structural":
        return Route(CLASSIFICATION_BRANCH, f"structural template {template.id}")
    if template.answer_type == "yes_no":
        return Route(CLASSIFICATION_BRANCH, f"yes/no template {template.id}")
    if template.id in _ANNOTATION_TEMPLATES:
        return Route(CLASSIFICATION_BRANCH, f"plot-text template {template.id}")
    return Route(PIPELINE_BRANCH, f"{template.answer_type} {template.category} template {template.id}")


# ---------------------------------------------------------------------------
# geometric reading of a detection set

def _as_detections(d: DetectionSet | PlotAnnotation) -> DetectionSet:
    if isinstance(d, DetectionSet):
        return d
    dets = [
        Detection(cls=e.cls, bbox=e.bbox, score=1.0, text=e.text, color=e.color)
        for e in d.elements
    ]
    return DetectionSet(dets, style=d.style)


class VisualReading:
    """Lazy geometric digest of a detection set for structural answering."""

    def __init__(self, d: DetectionSet | PlotAnnotation):
        self.d = _as_detections(d)
        self.style = self.d.style
        self.bars = _canonical(self.d.by_class("bar"))
        self.points = _canonical([x for x in self.d.detections if x.cls in ("line", "dotline")])
        self.bars_are_data = len(self.bars) >= len(self.points)
        self.orientation = _infer_orientation(self.bars) if self.bars_are_data else "vertical"
        self.horizontal = self.orientation == "horizontal"
        cat_axis = "y" if self.horizontal else "x"
        val_axis = "x" if self.horizontal else "y"
        self.cat_refs = _tick_refs(self.d, cat_axis)
        self.val_tick_values: list[tuple[float, float]] = []
        for r in _tick_refs(self.d, val_axis):
            v = parse_tick_value(r.text)
            if v is not None:
                self.val_tick_values.append((v, r.pos))
        self.val_tick_texts = [r.text for r in _tick_refs(self.d, val_axis)]
        self.legend_map = associate_legend(self.d)  # text -> color, reading order
        self._rows: tuple[list[str], np.ndarray] | None = None

    # -- small lookups ------------------------------------------------------

    def one_text(self, cls: str) -> str:
        dets = _canonical(self.d.by_class(cls))
        for det in dets:
            if det.text:
                return det.text
        raise AnswerUnavailable(f"no {cls} detected")

    @property
    def legend_texts(self) -> list[str]:
        return list(self.legend_map.keys())

    def cats(self) -> list[str]:
        return [r.text for r in self.cat_refs]

    def _nearest_cat(self, det: Detection) -> int:
        if not self.cat_refs:
            raise AnswerUnavailable("no category ticks detected")
        c_axis = det.center[1] if self.horizontal else det.center[0]
        return min(range(len(self.cat_refs)), key=lambda k: abs(self.cat_refs[k].pos - c_axis))

    def group_counts(self) -> list[int]:
        counts = [0] * len(self.cat_refs)
        for bar in self.bars:
            counts[self._nearest_cat(bar)] += 1
        return counts

    def value_of(self, det: Detection) -> float:
        if len(self.val_tick_values) < 2:
            raise AnswerUnavailable("fewer than 2 readable value ticks")
        if det.cls == "bar":
            x, y, w, h = det.bbox
            p = (x + w) if self.horizontal else y
        else:
            p = det.center[0] if self.horizontal else det.center[1]
        return _interp(p, self.val_tick_values)

    def series_rows(self) -> tuple[list[str], np.ndarray]:
        """Per-series value readings aligned to category order (nan = missing)."""
        if self._rows is not None:
            return self._rows
        data = self.bars if self.bars_are_data else self.points
        n_cats = len(self.cat_refs)
        if self.legend_map:
            names = self.legend_texts
            color_to_row = {c: k for k, (_, c) in enumerate(self.legend_map.items())}
        else:
            names = [""]
            color_to_row = {}
        V = np.full((len(names), n_cats), np.nan)
        for det in data:
            if self.legend_map:
                if det.color is None or det.color not in color_to_row:
                    continue
                r = color_to_row[det.color]
            else:
                r = 0
            c = self._nearest_cat(det)
            if np.isnan(V[r][c]):
                V[r][c] = self.value_of(det)
        self._rows = (names, V)
        return self._rows

    def row_for(self, legend: str | None) -> np.ndarray:
        names, V = self.series_rows()
        if legend is None:
            if len(names) == 1:
                return V[0]
            raise AnswerUnavailable("ambiguous series reference")
        if legend not in names:
            raise AnswerUnavailable(f"no series labeled {legend!r}")
        return V[names.index(legend)]

    def require(self, row: np.ndarray, *idx: int) -> list[float]:
        out = []
        for i in idx:
            if i < 0 or i >= len(row) or np.isnan(row[i]):
                raise AnswerUnavailable("required data point not detected")
            out.append(float(row[i]))
        return out


# ---------------------------------------------------------------------------
# classification-branch answering

def answer_structural(question: str, d: DetectionSet | PlotAnnotation,
                      matcher: TemplateMatcher | None = None) -> Answer:
    """Answer a classification-branch question from visual elements only."""
    parsed = parse_question(question, matcher)
    reading = VisualReading(d)
    try:
        return _structural(parsed.template_id, parsed.bindings, reading)
    except AnswerUnavailable:
        raise
    except (ValueError, KeyError, IndexError, ZeroDivisionError, ExtractionError) as e:
        raise AnswerUnavailable(str(e))


def _ordered_cat_indices(reading: VisualReading, direction: str) -> list[int]:
    # cat_refs are sorted by pixel position: ascending x (left->right) for
    # vertical plots, ascending y (top->bottom) for horizontal ones
    idx = list(range(len(reading.cat_refs)))
    return idx if direction in ("left", "top") else idx[::-1]


def _style_or_unavailable(reading: VisualReading):
    if reading.style is None:
        raise AnswerUnavailable("no style metadata available")
    return reading.style


def _structural(tid: int, b: dict[str, str], rd: VisualReading) -> Answer:
    if tid == 1:
        _, V = rd.series_rows()
        vals = V[~np.isnan(V)]
        if vals.size == 0:
            raise AnswerUnavailable("no data values readable")
        return yes_no(bool((vals == 0.0).any()))
    if tid == 2:
        return yes_no(_style_or_unavailable(rd).grid)
    if tid == 3:
        return text(_style_or_unavailable(rd).legend_position)
    if tid == 4:
        n = len(rd.d.by_class("legend_label"))
        if n == 0:
            raise AnswerUnavailable("no legend detected")
        return number(n)
    if tid == 5:
        labels = _canonical(rd.d.by_class("legend_label"))
        if len(labels) >= 2:
            xs = [l.center[0] for l in labels]
            ys = [l.center[1] for l in labels]
            return text("horizontal" if max(xs) - min(xs) >= max(ys) - min(ys) else "vertical")
        pos = _style_or_unavailable(rd).legend_position
        return text("horizontal" if pos.startswith("bottom") else "vertical")
    if tid == 6:
        if not rd.cat_refs:
            raise AnswerUnavailable("no category ticks detected")
        return number(len(rd.cat_refs))
    if tid in (7, 8):
        ft = b["figure_type"]
        dets = rd.bars if ft == "bar" else [p for p in rd.points if p.cls == ft]
        if not dets:
            raise AnswerUnavailable(f"no {ft} elements detected")
        if tid == 8 or ft != "bar":
            return number(len({det.color for det in dets if det.color is not None}))
        return number(len(dets))
    if tid == 9:
        if not rd.bars:
            raise AnswerUnavailable("no bars detected")
        return number(len(rd.cat_refs))
    if tid in (10, 11):
        counts = rd.group_counts()
        if not counts:
            raise AnswerUnavailable("no category ticks detected")
        if tid == 10:
            return yes_no(all(c == len(rd.legend_texts) for c in counts))
        return yes_no(len(set(counts)) == 1)
    if tid in (12, 13, 14, 15):
        i = parse_ordinal(b["i"])
        direction = {12: "left", 13: "right", 14: "top", 15: "bottom"}[tid]
        order = _ordered_cat_indices(rd, direction)
        if i < 1 or i > len(order):
            raise AnswerUnavailable(f"no {b['i']} tick")
        return number(rd.group_counts()[order[i - 1]])
    if tid == 16:
        if not rd.bars:
            raise AnswerUnavailable("no bars detected")
        return yes_no(rd.horizontal)
    if tid == 17:
        _, V = rd.series_rows()
        if np.isnan(V).any():
            raise AnswerUnavailable("incomplete line readings")
        return number(count_line_crossings(V))
    if tid == 18:
        colors = {p.color for p in rd.points if p.color is not None}
        if not colors:
            raise AnswerUnavailable("no lines detected")
        return yes_no(len(colors) == len(rd.legend_texts))
    if tid in (19, 20, 21, 22):
        i = parse_ordinal(b["i"])
        if not rd.bars or not rd.cat_refs:
            raise AnswerUnavailable("no bars detected")
        groups: dict[int, list[Detection]] = {}
        for bar in rd.bars:
            groups.setdefault(rd._nearest_cat(bar), []).append(bar)
        # within-group order along the category axis
        axis = (lambda det: det.center[1]) if rd.horizontal else (lambda det: det.center[0])
        color_to_label = {c: t for t, c in rd.legend_map.items()}
        votes: dict[str, int] = {}
        for bars in groups.values():
            ordered = sorted(bars, key=axis)
            if tid in (20, 22):
                ordered = ordered[::-1]
            if i < 1 or i > len(ordered):
                continue
            label = color_to_label.get(ordered[i - 1].color)
            if label:
                votes[label] = votes.get(label, 0) + 1
        if not votes:
            raise AnswerUnavailable("bar order unreadable")
        return text(max(sorted(votes), key=lambda k: votes[k]))
    if tid in (23, 24):
        j = parse_ordinal(b["j"])
        order = _ordered_cat_indices(rd, "left" if tid == 23 else "top")
        if j < 1 or j > len(order):
            raise AnswerUnavailable(f"no {b['j']} group")
        return text(rd.cat_refs[order[j - 1]].text)
    if tid in (25, 35):
        row = rd.row_for(b.get("legend_label"))
        vals = rd.require(row, *range(len(row)))
        return yes_no(is_monotonic_nondecreasing(vals))
    if tid == 26:
        if len(rd.val_tick_values) < 2:
            raise AnswerUnavailable("fewer than 2 readable value ticks")
        ordered = sorted(v for v, _ in rd.val_tick_values)
        steps = [b2 - a2 for a2, b2 in zip(ordered, ordered[1:])]
        return number(float(np.median(steps)))
    if tid == 27:
        if not rd.val_tick_texts:
            raise AnswerUnavailable("no value ticks detected")
        hits = sum(1 for t in rd.val_tick_texts if _SCI_RE.fullmatch(t))
        return yes_no(hits > len(rd.val_tick_texts) / 2.0)
    if tid == 28:
        return text(rd.one_text("title"))
    if tid == 29:
        return yes_no(b["legend_label"] in rd.legend_texts)
    if tid == 30:
        return text(rd.one_text("xaxis_label"))
    if tid == 31:
        return text(rd.one_text("yaxis_label"))
    if tid in (36, 37):
        v1 = rd.row_for(b["legend_label"])
        v2 = rd.row_for(b["legend_label2"])
        a = rd.require(v1, *range(len(v1)))
        c = rd.require(v2, *range(len(v2)))
        ok = all(x > y for x, y in zip(a, c)) if tid == 36 else all(x < y for x, y in zip(a, c))
        return yes_no(ok)
    if tid == 57:
        row = rd.row_for(None)
        cats = rd.cats()
        if b["x_tick"] not in cats or b["x_tick2"] not in cats:
            raise AnswerUnavailable("span endpoint tick missing")
        i, j = sorted((cats.index(b["x_tick"]), cats.index(b["x_tick2"])))
        if b["incl"] == "exclusive":
            i, j = i + 1, j - 1
        if i > j:
            raise AnswerUnavailable("empty span")
        window = rd.require(row, *range(i, j + 1))
        n = float(b["n"])
        return yes_no(sum(1 for v in window if v > n) > len(window) / 2.0)
    if tid in (59, 62):
        row = rd.row_for(b.get("legend_label") if tid == 62 else None)
        cats = rd.cats()
        if b["x_tick"] not in cats or b["x_tick2"] not in cats:
            raise AnswerUnavailable("tick missing")
        vi, vj = rd.require(row, cats.index(b["x_tick"]), cats.index(b["x_tick2"]))
        return yes_no(vi < vj)
    if tid == 63:
        row = rd.row_for(None)
        vals = rd.require(row, *range(len(row)))
        cats = rd.cats()
        vi, vj = rd.require(row, cats.index(b["x_tick"]), cats.index(b["x_tick2"]))
        return yes_no((vi - vj) > (max(vals) - min(vals)))
    if tid == 65:
        row = rd.row_for(None)
        vals = rd.require(row, *range(len(row)))
        cats = rd.cats()
        vi, vj = rd.require(row, cats.index(b["x_tick"]), cats.index(b["x_tick2"]))
        return yes_no(vi + vj > max(vals))
    if tid == 68:
        cats = rd.cats()
        if b["x_tick"] not in cats or b["x_tick2"] not in cats:
            raise AnswerUnavailable("tick missing")
        i, j = cats.index(b["x_tick"]), cats.index(b["x_tick2"])
        a1, a2 = rd.require(rd.row_for(b["legend_label"]), i, j)
        c1, c2 = rd.require(rd.row_for(b["legend_label2"]), i, j)
        return yes_no((a1 - a2) > (c1 - c2))
    if tid == 72:
        r1 = rd.row_for(b["legend_label"])
        r2 = rd.row_for(b["legend_label2"])
        r3 = rd.row_for(b["legend_label3"])
        n = len(r1)
        a = rd.require(r1, *range(n))
        c = rd.require(r2, *range(n))
        e = rd.require(r3, *range(n))
        return yes_no(all(x + y > z for x, y, z in zip(a, c, e)))
    if tid == 73:
        cats = rd.cats()
        if b["x_tick"] not in cats or b["x_tick2"] not in cats:
            raise AnswerUnavailable("tick missing")
        i, j = cats.index(b["x_tick"]), cats.index(b["x_tick2"])
        vi, vj = rd.require(rd.row_for(b["legend_label"]), i, j)
        other = rd.row_for(b["legend_label2"])
        vals = rd.require(other, *range(len(other)))
        return yes_no(vi + vj > max(vals))
    if tid == 74:
        rows = [rd.row_for(b[k]) for k in ("legend_label", "legend_label2", "legend_label3", "legend_label4")]
        n = len(rows[0])
        vals = [rd.require(r, *range(n)) for r in rows]
        return yes_no(all(a + c > e + g for a, c, e, g in zip(*vals)))
    raise AnswerUnavailable(f"template {tid} is not a classification-branch question")


# ---------------------------------------------------------------------------
# composition

def answer_hybrid(question: str, d: DetectionSet | PlotAnnotation,
                  matcher: TemplateMatcher | None = None) -> Answer:
    """Dispatch per route; errors surface as AnswerUnavailable, never a crash."""
    r = route(question, matcher)
    try:
        if r.branch == CLASSIFICATION_BRANCH:
            return answer_structural(question, d, matcher)
        return table_answer(question, extract_table(_as_detections(d)), matcher)
    except (AnswerUnavailable, UnparseableQuestion):
        raise
    except (ValueError, KeyError, IndexError, ZeroDivisionError) as e:
        raise AnswerUnavailable(str(e))


def answer_pipeline_only(question: str, d: DetectionSet | PlotAnnotation,
                         matcher: TemplateMatcher | None = None) -> Answer:
    """Everything through table extraction + QA (ablation arm)."""
    try:
        return table_answer(question, extract_table(_as_detections(d)), matcher)
    except (AnswerUnavailable, UnparseableQuestion):
        raise
    except (ValueError, KeyError, IndexError, ZeroDivisionError) as e:
        raise AnswerUnavailable(str(e))


def answer_structural_only(question: str, d: DetectionSet | PlotAnnotation,
                           matcher: TemplateMatcher | None = None) -> Answer:
    """Everything through the classification branch (ablation arm)."""
    try:
        return answer_structural(question, d, matcher)
    except (AnswerUnavailable, UnparseableQuestion):
        raise
    except (ValueError, KeyError, IndexError, ZeroDivisionError) as e:
        raise AnswerUnavailable(str(e))
