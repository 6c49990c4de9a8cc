"""Geometric reconstruction of the underlying table from a detection set.

The association procedure mirrors how a human reads a chart: legend labels
pair with the nearest preview swatch, tick labels give named positions on
each axis, every bar (or line vertex) is assigned to the closest category
tick and to the legend entry whose color it carries, and the value is
linearly interpolated from the bar's value-edge pixel between the two
bracketing numeric ticks.

Legend labels pair with previews by minimal Euclidean centroid distance
(ties broken in reading order). Marks pair with category ticks by centroid
distance projected onto the category axis: the perpendicular coordinate of
a bar centroid scales with its value, so unprojected distance misassigns
long bars even on noise-free input. Anything that cannot be associated
(unmatched color, unparseable tick text, too few numeric ticks) degrades
to an empty cell; extraction never guesses and never raises once inputs
are detections.

All association is permutation-invariant: detections are put into a
canonical order before any tie can matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detsim import Detection, DetectionSet
from .table import SemiStructuredTable

DATA_CLASSES = ("bar", "line", "dotline")


class ExtractionError(ValueError):
    pass


@dataclass(frozen=True)
class _TickRef:
    text: str
    pos: float  # label center projected onto the axis
    center: tuple[float, float]


def _canonical(dets: list[Detection]) -> list[Detection]:
    return sorted(dets, key=lambda d: (d.cls, d.bbox, d.text or "", -1 if d.color is None else d.color))


def parse_tick_value(text: str) -> float | None:
    """Numeric tick text to float; None when the text does not parse."""
    try:
        v = float(text)
    except (TypeError, ValueError):
        return None
    return v if math.isfinite(v) else None


# ---------------------------------------------------------------------------
# associations

def _reading_order(dets: list[Detection]) -> list[Detection]:
    """Order legend entries along their stacking direction."""
    if len(dets) <= 1:
        return list(dets)
    xs = [d.center[0] for d in dets]
    ys = [d.center[1] for d in dets]
    horizontal = (max(xs) - min(xs)) >= (max(ys) - min(ys))
    return sorted(dets, key=(lambda d: d.center[0]) if horizontal else (lambda d: d.center[1]))


def associate_legend(d: DetectionSet) -> dict[str, int]:
    """Map legend label text -> color id of its nearest preview swatch.

    One-to-one greedy matching on centroid distance; equidistant pairs fall
    back to reading order. An empty map signals the single-series fallback.
    """
    labels = _reading_order(_canonical(d.by_class("legend_label")))
    previews = _reading_order(_canonical(d.by_class("legend_preview")))
    labels = [l for l in labels if l.text]
    previews = [p for p in previews if p.color is not None]
    if not labels or not previews:
        return {}
    pairs = []
    for li, lab in enumerate(labels):
        for pi, prev in enumerate(previews):
            dist = math.dist(lab.center, prev.center)
            pairs.append((dist, li, pi))
    pairs.sort()
    out: dict[str, int] = {}
    used_l: set[int] = set()
    used_p: set[int] = set()
    for _, li, pi in pairs:
        if li in used_l or pi in used_p:
            continue
        used_l.add(li)
        used_p.add(pi)
        label_text = labels[li].text
        if label_text not in out:
            out[label_text] = int(previews[pi].color)
    return out


def _tick_refs(d: DetectionSet, axis: str) -> list[_TickRef]:
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    cls = "xtick_label" if axis == "x" else "ytick_label"
    refs = []
    for det in _canonical(d.by_class(cls)):
        if det.text is None:
            continue
        cx, cy = det.center
        refs.append(_TickRef(det.text, cx if axis == "x" else cy, (cx, cy)))
    refs.sort(key=lambda r: r.pos)
    return refs


def associate_ticks(d: DetectionSet, axis: str) -> list[tuple[str, float]]:
    """Ordered (tick text, pixel position) pairs along one axis."""
    refs = _tick_refs(d, axis)
    if len(refs) < 2:
        raise ExtractionError(f"fewer than 2 tick labels on the {axis} axis")
    return [(r.text, r.pos) for r in refs]


def associate_bars(
    d: DetectionSet,
    legend_map: dict[str, int],
    x_ticks: list[tuple[str, float]],
) -> list[tuple[str, str]]:
    """Per-bar (row, col) assignment for vertical bar detections.

    Exposed for inspection; extract_table performs the same association
    internally for all plot types. Bars whose color matches no legend entry
    come back with col '' (unassigned).
    """
    bars = _canonical(d.by_class("bar"))
    if not bars:
        raise ExtractionError("no bar detections")
    color_to_col = {c: name for name, c in legend_map.items()}
    out = []
    for bar in bars:
        cx = bar.center[0]
        row = min(x_ticks, key=lambda t: abs(t[1] - cx))[0]
        if legend_map:
            col = color_to_col.get(bar.color, "")
        else:
            col = ""
        out.append((row, col))
    return out


# ---------------------------------------------------------------------------
# value interpolation

def _interp(p: float, ticks: list[tuple[float, float]]) -> float:
    """Linear value at pixel p given >= 2 (value, pixel) anchors."""
    ticks = sorted(ticks, key=lambda t: t[1])  # by pixel position
    lo, hi = None, None
    for k in range(len(ticks) - 1):
        if ticks[k][1] <= p <= ticks[k + 1][1]:
            lo, hi = ticks[k], ticks[k + 1]
            break
    if lo is None:
        # outside the tick span: extrapolate from the two nearest extremes
        if p < ticks[0][1]:
            lo, hi = ticks[0], ticks[1]
        else:
            lo, hi = ticks[-2], ticks[-1]
    (v0, p0), (v1, p1) = lo, hi
    if p1 == p0:
        return v0
    return v0 + (p - p0) * (v1 - v0) / (p1 - p0)


def interpolate_value(
    bar_bbox: tuple[float, float, float, float],
    value_ticks: list[tuple[float, float]],
    orientation: str,
) -> float:
    """Value represented by a bar, read from its value-edge pixel.

    value_ticks are (numeric value, pixel position) pairs; orientation is
    'vertical' (value grows upward, edge = box top) or 'horizontal' (value
    grows rightward, edge = box right).
    """
    if len(value_ticks) < 2:
        raise ExtractionError("interpolation needs at least 2 numeric ticks")
    x, y, w, h = bar_bbox
    p = (x + w) if orientation == "horizontal" else y
    return _interp(p, value_ticks)


# ---------------------------------------------------------------------------
# full extraction

def _axis_label_text(d: DetectionSet, axis: str) -> str:
    cls = "xaxis_label" if axis == "x" else "yaxis_label"
    labels = _canonical(d.by_class(cls))
    return labels[0].text or "" if labels and labels[0].text else ""


def _infer_orientation(bars: list[Detection]) -> str:
    """Bars share a baseline: bottoms align for vertical, lefts for horizontal."""
    if len(bars) < 2:
        return "vertical"
    bottoms = [b.bbox[1] + b.bbox[3] for b in bars]
    lefts = [b.bbox[0] for b in bars]
    return "vertical" if np.std(bottoms) <= np.std(lefts) else "horizontal"


def extract_table(d: DetectionSet) -> SemiStructuredTable:
    """Reconstruct the semi-structured table from detections.

    Always returns a table; association failures leave empty cells and
    unreadable axes simply produce no values.
    """
    bars = _canonical([det for det in d.detections if det.cls == "bar"])
    points = _canonical([det for det in d.detections if det.cls in ("line", "dotline")])
    # majority vote between mark families: a lone misclassified element must
    # not displace the real data marks
    use_bars = len(bars) >= len(points)
    data_elems = bars if use_bars else points
    orientation = _infer_orientation(bars) if use_bars else "vertical"

    cat_axis = "y" if orientation == "horizontal" else "x"
    val_axis = "x" if orientation == "horizontal" else "y"

    cat_refs = _tick_refs(d, cat_axis)
    row_headers = [r.text for r in cat_refs]

    val_ticks: list[tuple[float, float]] = []
    for r in _tick_refs(d, val_axis):
        v = parse_tick_value(r.text)
        if v is not None:
            val_ticks.append((v, r.pos))
    can_interpolate = len(val_ticks) >= 2

    legend_map = associate_legend(d)
    if legend_map:
        col_headers = list(legend_map.keys())  # insertion follows reading order
    else:
        fallback = _axis_label_text(d, val_axis)
        col_headers = [fallback if fallback else "value"]
    color_to_col = {c: k for k, (name, c) in enumerate(legend_map.items())}

    cells: list[list[float | None]] = [[None] * len(col_headers) for _ in row_headers]
    if cat_refs:
        for el in data_elems:
            # nearest category tick by axis-projected centroid distance
            c_axis = el.center[1] if orientation == "horizontal" else el.center[0]
            ri = min(range(len(cat_refs)), key=lambda k: abs(cat_refs[k].pos - c_axis))
            if legend_map:
                if el.color is None or el.color not in color_to_col:
                    continue  # unassignable mark: leave the cell empty
                ci = color_to_col[el.color]
            else:
                ci = 0
            if not can_interpolate:
                continue
            if el.cls == "bar":
                value = interpolate_value(el.bbox, val_ticks, orientation)
            else:
                p = el.center[0] if orientation == "horizontal" else el.center[1]
                value = _interp(p, val_ticks)
            if cells[ri][ci] is None:
                cells[ri][ci] = float(value)

    return SemiStructuredTable(
        row_headers=row_headers,
        col_headers=col_headers,
        cells=cells,
        row_label=_axis_label_text(d, cat_axis),
    )


# ---------------------------------------------------------------------------
# extraction quality

def table_f1(
    pred: SemiStructuredTable,
    gold: SemiStructuredTable,
    rel_tol: float,
) -> tuple[float, float, float]:
    """Precision, recall and F1 over {row, col, value} tuples.

    A predicted tuple matches a gold tuple when row and column headers are
    string-equal and the value lies within rel_tol relative error of the
    gold value (gold 0 demands an exact 0). Matching is one-to-one, which
    the (row, col) keys already guarantee.
    """
    if rel_tol < 0:
        raise ValueError("rel_tol must be >= 0")
    pred_tuples = {(t.row, t.col): t.value for t in pred.tuples()}
    gold_tuples = {(t.row, t.col): t.value for t in gold.tuples()}
    matched = 0
    for key, pv in pred_tuples.items():
        if key not in gold_tuples:
            continue
        gv = gold_tuples[key]
        if gv == 0.0:
            ok = pv == 0.0
        else:
            ok = abs(pv - gv) <= rel_tol * abs(gv)
        if ok:
            matched += 1
    n_pred, n_gold = len(pred_tuples), len(gold_tuples)
    precision = matched / n_pred if n_pred else (1.0 if n_gold == 0 else 0.0)
    recall = matched / n_gold if n_gold else (1.0 if n_pred == 0 else 0.0)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1
