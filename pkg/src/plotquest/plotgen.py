"""SVG plot rendering with exact ground-truth element annotations.

The renderer produces a deterministic SVG 1.1 document plus a
PlotAnnotation listing every data-bearing element (10 classes: title, the
two axis labels, the two tick label families, legend labels, legend
previews, and bar / line / dotline marks) with float pixel bounding boxes.

Geometry contract: bar extents and vertex centers are exact linear maps of
the data values onto the value axis, with no pixel rounding anywhere, so a
noise-free reading of the annotation reconstructs cell values to float
precision. All perception noise is injected downstream, never here.

Conventions (the underlying study leaves these open):
- value axis starts at 0; its max is the smallest "nice" number
  (1, 2, 2.5 or 5 times a power of ten) at or above the data max,
  giving 5-6 major ticks
- grouped bars sit centered in their category slot, ordered by series,
  with an intra-group gap of 10% of the bar width
- text boxes use nominal font metrics (0.6 em advance, 1.2 em line height)
- canvas defaults to 800x600 px; origin top-left, y grows downward
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .answers import format_scientific
from .corpus import PlotData
from .palette import N_COLORS, color_hex
from .table import SemiStructuredTable

PLOT_TYPES = ("vbar", "hbar", "line", "dotline")
LEGEND_POSITIONS = ("bottom-left", "bottom-centre", "bottom-right", "center-right", "top-right")
LINE_STYLES = ("solid", "dashed", "dotted", "dashdot")
MARKERS = ("asterisk", "circle", "diamond", "square", "triangle", "inverted_triangle")
TICK_NOTATIONS = ("standard", "scientific_E")

ELEMENT_CLASSES = (
    "title", "bar", "line", "dotline", "xaxis_label", "yaxis_label",
    "xtick_label", "ytick_label", "legend_label", "legend_preview",
)
TEXTUAL_CLASSES = ("title", "xaxis_label", "yaxis_label", "xtick_label", "ytick_label", "legend_label")
MARK_CLASSES = ("bar", "line", "dotline", "legend_preview")

DEFAULT_CANVAS = (800.0, 600.0)

_MARKER_SIZE = 9.0  # bbox edge for line/dotline vertex elements
_PREVIEW_W, _PREVIEW_H = 18.0, 10.0


class LayoutError(ValueError):
    """Canvas too small to place all textual elements without overlap."""


@dataclass(frozen=True)
class StyleParams:
    grid: bool
    font_size: float
    tick_notation: str
    line_style: str
    marker: str
    legend_position: str
    series_colors: tuple[int, ...]
    canvas: tuple[float, float] = DEFAULT_CANVAS

    def validate(self) -> None:
        if self.tick_notation not in TICK_NOTATIONS:
            raise ValueError(f"bad tick_notation {self.tick_notation!r}")
        if self.line_style not in LINE_STYLES:
            raise ValueError(f"bad line_style {self.line_style!r}")
        if self.marker not in MARKERS:
            raise ValueError(f"bad marker {self.marker!r}")
        if self.legend_position not in LEGEND_POSITIONS:
            raise ValueError(f"bad legend_position {self.legend_position!r}")
        if len(set(self.series_colors)) != len(self.series_colors):
            raise ValueError("series colors must be pairwise distinct")
        for c in self.series_colors:
            if not (0 <= c < N_COLORS):
                raise ValueError(f"color id {c} outside palette")

    def to_json(self) -> dict:
        return {
            "grid": self.grid,
            "font_size": self.font_size,
            "tick_notation": self.tick_notation,
            "line_style": self.line_style,
            "marker": self.marker,
            "legend_position": self.legend_position,
            "series_colors": list(self.series_colors),
            "canvas": list(self.canvas),
        }

    @staticmethod
    def from_json(obj: dict) -> "StyleParams":
        return StyleParams(
            grid=obj["grid"],
            font_size=obj["font_size"],
            tick_notation=obj["tick_notation"],
            line_style=obj["line_style"],
            marker=obj["marker"],
            legend_position=obj["legend_position"],
            series_colors=tuple(obj["series_colors"]),
            canvas=tuple(obj["canvas"]),
        )


@dataclass(frozen=True)
class PlotSpec:
    data: PlotData
    plot_type: str
    style: StyleParams

    def __post_init__(self):
        if self.plot_type not in PLOT_TYPES:
            raise ValueError(f"bad plot_type {self.plot_type!r}")


@dataclass(frozen=True)
class VisualElement:
    cls: str  # one of ELEMENT_CLASSES ("class" in JSON)
    bbox: tuple[float, float, float, float]  # x, y, w, h
    text: str | None = None
    color: int | None = None
    series_index: int | None = None
    x_index: int | None = None

    @property
    def center(self) -> tuple[float, float]:
        x, y, w, h = self.bbox
        return (x + w / 2.0, y + h / 2.0)

    def to_json(self) -> dict:
        rec: dict = {"class": self.cls, "bbox": list(self.bbox)}
        if self.text is not None:
            rec["text"] = self.text
        if self.color is not None:
            rec["color"] = self.color
        if self.series_index is not None:
            rec["series_index"] = self.series_index
        if self.x_index is not None:
            rec["x_index"] = self.x_index
        return rec

    @staticmethod
    def from_json(obj: dict) -> "VisualElement":
        return VisualElement(
            cls=obj["class"],
            bbox=tuple(float(v) for v in obj["bbox"]),
            text=obj.get("text"),
            color=obj.get("color"),
            series_index=obj.get("series_index"),
            x_index=obj.get("x_index"),
        )


@dataclass
class PlotAnnotation:
    elements: list[VisualElement]
    style: StyleParams
    plot_type: str
    gold_table: SemiStructuredTable

    def by_class(self, cls: str) -> list[VisualElement]:
        return [e for e in self.elements if e.cls == cls]

    def to_json(self) -> dict:
        return {
            "plot_type": self.plot_type,
            "style": self.style.to_json(),
            "elements": [e.to_json() for e in self.elements],
            "gold_table": self.gold_table.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "PlotAnnotation":
        return PlotAnnotation(
            elements=[VisualElement.from_json(e) for e in obj["elements"]],
            style=StyleParams.from_json(obj["style"]),
            plot_type=obj["plot_type"],
            gold_table=SemiStructuredTable.from_json(obj["gold_table"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @staticmethod
    def loads(text: str) -> "PlotAnnotation":
        return PlotAnnotation.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# style sampling

def make_plot_spec(data: PlotData, seed: int) -> PlotSpec:
    """Draw plot type and styling deterministically from the seed."""
    rng = np.random.default_rng(seed)
    plot_type = PLOT_TYPES[int(rng.integers(4))]
    style = StyleParams(
        grid=bool(rng.random() < 0.5),
        font_size=float(rng.integers(10, 14)),
        tick_notation=TICK_NOTATIONS[int(rng.integers(2))],
        line_style=LINE_STYLES[int(rng.integers(4))],
        marker=MARKERS[int(rng.integers(6))],
        legend_position=LEGEND_POSITIONS[int(rng.integers(5))],
        series_colors=tuple(int(c) for c in rng.choice(N_COLORS, size=data.n_series, replace=False)),
    )
    style.validate()
    return PlotSpec(data=data, plot_type=plot_type, style=style)


# ---------------------------------------------------------------------------
# value axis

def value_axis(data: PlotData) -> tuple[float, float, list[float]]:
    """(axis max, tick step, tick values) for the value axis.

    Tick values are built from integer mantissas ("6e-1") so their decimal
    representations stay short and re-parse to the identical float.
    """
    vmax = float(np.max(data.values_matrix())) if data.n_series else 1.0
    if vmax <= 0:
        mant, exp, steps = 1, 0, 5
    else:
        exp = math.floor(math.log10(vmax))
        frac = vmax / 10.0**exp
        if frac <= 1.0:
            mant, steps = 1, 5  # step .2
        elif frac <= 2.0:
            mant, steps = 2, 4  # step .5
        elif frac <= 2.5:
            mant, steps = 25, 5  # step .5, mantissa scaled by 10
        elif frac <= 5.0:
            mant, steps = 5, 5  # step 1
        else:
            mant, exp, steps = 1, exp + 1, 5
    if mant == 25:
        step_m, step_e = 5, exp - 1
    elif mant == 1:
        step_m, step_e = 2, exp - 1
    elif mant == 2:
        step_m, step_e = 5, exp - 1
    else:  # mant == 5
        step_m, step_e = 1, exp
    ticks = [float(f"{i * step_m}e{step_e}") for i in range(steps + 1)]
    return ticks[-1], ticks[1], ticks


def format_tick(value: float, notation: str) -> str:
    if notation == "scientific_E":
        return format_scientific(value)
    if float(value).is_integer():
        return str(int(value))
    return str(value)


def plot_title(data: PlotData) -> str:
    head = data.y_label[0].upper() + data.y_label[1:]
    if data.n_series == 1:
        return f"{head} in {data.series[0][0]}"
    return f"{head} by {data.x_label.lower()}"


def screen_axis_labels(data: PlotData, plot_type: str) -> tuple[str, str]:
    """Texts of the x-axis and y-axis labels as they appear on screen."""
    value_text = data.y_label[0].upper() + data.y_label[1:]
    if plot_type == "hbar":
        return value_text, data.x_label
    return data.x_label, value_text


# ---------------------------------------------------------------------------
# rendering

def _text_w(s: str, fs: float) -> float:
    return 0.6 * fs * len(s)


def _text_h(fs: float) -> float:
    return 1.2 * fs


def _fnum(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return s if s else "0"


_DASHES = {"solid": None, "dashed": "8,5", "dotted": "2,4", "dashdot": "8,4,2,4"}


class _Svg:
    def __init__(self, w: float, h: float):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fnum(w)}" height="{_fnum(h)}" viewBox="0 0 {_fnum(w)} {_fnum(h)}">',
            f'<rect x="0" y="0" width="{_fnum(w)}" height="{_fnum(h)}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, stroke="#333333", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fnum(x1)}" y1="{_fnum(y1)}" x2="{_fnum(x2)}" y2="{_fnum(y2)}"'
            f' stroke="{stroke}" stroke-width="{_fnum(width)}"{d}/>'
        )

    def rect(self, x, y, w, h, fill):
        self.parts.append(
            f'<rect x="{_fnum(x)}" y="{_fnum(y)}" width="{_fnum(w)}" height="{_fnum(h)}" fill="{fill}"/>'
        )

    def polyline(self, pts, stroke, width=2.0, dash=None):
        coords = " ".join(f"{_fnum(x)},{_fnum(y)}" for x, y in pts)
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{_fnum(width)}"{d}/>'
        )

    def text(self, x, y, s, fs, anchor="middle", rotate=False):
        esc = s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        tr = f' transform="rotate(-90 {_fnum(x)} {_fnum(y)})"' if rotate else ""
        self.parts.append(
            f'<text x="{_fnum(x)}" y="{_fnum(y)}" font-family="Helvetica" font-size="{_fnum(fs)}"'
            f' text-anchor="{anchor}" dominant-baseline="middle"{tr}>{esc}</text>'
        )

    def marker(self, x, y, kind, color, size=7.0):
        r = size / 2.0
        if kind == "circle":
            self.parts.append(f'<circle cx="{_fnum(x)}" cy="{_fnum(y)}" r="{_fnum(r)}" fill="{color}"/>')
        elif kind == "square":
            self.rect(x - r, y - r, size, size, color)
        elif kind == "diamond":
            pts = [(x, y - r), (x + r, y), (x, y + r), (x - r, y)]
            self._polygon(pts, color)
        elif kind == "triangle":
            self._polygon([(x, y - r), (x + r, y + r), (x - r, y + r)], color)
        elif kind == "inverted_triangle":
            self._polygon([(x - r, y - r), (x + r, y - r), (x, y + r)], color)
        else:  # asterisk
            for dx, dy in ((r, 0), (0, r), (r * 0.7, r * 0.7), (r * 0.7, -r * 0.7)):
                self.line(x - dx, y - dy, x + dx, y + dy, stroke=color, width=1.5)

    def _polygon(self, pts, fill):
        coords = " ".join(f"{_fnum(x)},{_fnum(y)}" for x, y in pts)
        self.parts.append(f'<polygon points="{coords}" fill="{fill}"/>')

    def tobytes(self) -> bytes:
        return ("\n".join(self.parts) + "\n</svg>\n").encode("utf-8")


def render(spec: PlotSpec) -> tuple[bytes, PlotAnnotation]:
    """Render the plot; returns the SVG document and its annotation."""
    data, style, ptype = spec.data, spec.style, spec.plot_type
    data.validate()
    style.validate()
    W, H = style.canvas
    fs = style.font_size
    th = _text_h(fs)
    horizontal = ptype == "hbar"

    axis_max, _step, ticks = value_axis(data)
    tick_texts = [format_tick(t, style.tick_notation) for t in ticks]
    title = plot_title(data)
    x_axis_text, y_axis_text = screen_axis_labels(data, ptype)
    legends = data.legend_labels

    title_fs = fs + 4.0
    title_h = _text_h(title_fs)

    legend_at_bottom = style.legend_position.startswith("bottom")
    entry_ws = [_PREVIEW_W + 5.0 + _text_w(s, fs) for s in legends]
    legend_row_h = max(_PREVIEW_H, th)

    # category tick texts sit under the x axis for vertical plots, left of
    # the y axis for hbar
    if horizontal:
        ytick_texts = list(data.x_categories)
        xtick_texts = tick_texts
    else:
        ytick_texts = tick_texts
        xtick_texts = list(data.x_categories)

    max_ytick_w = max(_text_w(s, fs) for s in ytick_texts)
    max_xtick_w = max(_text_w(s, fs) for s in xtick_texts)
    left = 8.0 + th + 6.0 + max_ytick_w + 8.0
    # the outermost bottom tick label is centered on the axis end for hbar
    right = max(16.0, max_xtick_w / 2.0 + 6.0) if horizontal else 16.0
    top = 8.0 + title_h + 10.0
    bottom = 8.0 + th + 6.0 + th + 8.0
    if legend_at_bottom:
        bottom += legend_row_h + 10.0

    area_x, area_y = left, top
    area_w, area_h = W - left - right, H - top - bottom
    if area_w < 120.0 or area_h < 100.0:
        raise LayoutError(f"canvas {W}x{H} leaves plot area {area_w:.0f}x{area_h:.0f}")
    area_r, area_b = area_x + area_w, area_y + area_h

    def vpix(v: float) -> float:
        # value -> pixel along the value axis
        if horizontal:
            return area_x + v / axis_max * area_w
        return area_b - v / axis_max * area_h

    def cat_center(i: int) -> float:
        if horizontal:
            return area_y + (i + 0.5) * area_h / data.n_categories
        return area_x + (i + 0.5) * area_w / data.n_categories

    svg = _Svg(W, H)
    elements: list[VisualElement] = []

    def add_text(cls: str, cx: float, cy: float, s: str, size: float,
                 rotate: bool = False, **extra) -> None:
        w, h = _text_w(s, size), _text_h(size)
        if rotate:
            w, h = h, w
        elements.append(VisualElement(cls, (cx - w / 2.0, cy - h / 2.0, w, h), text=s, **extra))
        svg.text(cx, cy, s, size, rotate=rotate)

    # grid
    if style.grid:
        for t in ticks:
            p = vpix(t)
            if horizontal:
                svg.line(p, area_y, p, area_b, stroke="#dddddd")
            else:
                svg.line(area_x, p, area_r, p, stroke="#dddddd")

    # axes
    svg.line(area_x, area_y, area_x, area_b)
    svg.line(area_x, area_b, area_r, area_b)

    # title and axis labels
    add_text("title", W / 2.0, 8.0 + title_h / 2.0, title, title_fs)
    xlab_cy = area_b + 8.0 + th + 6.0 + th / 2.0
    add_text("xaxis_label", area_x + area_w / 2.0, xlab_cy, x_axis_text, fs)
    add_text("yaxis_label", 8.0 + th / 2.0, area_y + area_h / 2.0, y_axis_text, fs, rotate=True)

    # tick labels
    if horizontal:
        for t, s in zip(ticks, tick_texts):
            p = vpix(t)
            svg.line(p, area_b, p, area_b + 4.0)
            add_text("xtick_label", p, area_b + 8.0 + th / 2.0, s, fs)
        for i, cat in enumerate(data.x_categories):
            cy = cat_center(i)
            svg.line(area_x - 4.0, cy, area_x, cy)
            add_text("ytick_label", area_x - 8.0 - _text_w(cat, fs) / 2.0, cy, cat, fs)
    else:
        for t, s in zip(ticks, tick_texts):
            p = vpix(t)
            svg.line(area_x - 4.0, p, area_x, p)
            add_text("ytick_label", area_x - 8.0 - _text_w(s, fs) / 2.0, p, s, fs)
        for i, cat in enumerate(data.x_categories):
            cx = cat_center(i)
            svg.line(cx, area_b, cx, area_b + 4.0)
            add_text("xtick_label", cx, area_b + 8.0 + th / 2.0, cat, fs)

    # data marks
    values = data.values_matrix()
    n_series, n_cats = data.n_series, data.n_categories
    if ptype in ("vbar", "hbar"):
        slot = (area_h if horizontal else area_w) / n_cats
        usable = 0.7 * slot
        bw = usable / (n_series + 0.1 * (n_series - 1))
        gap = 0.1 * bw
        for i in range(n_cats):
            start = cat_center(i) - (n_series * bw + (n_series - 1) * gap) / 2.0
            for s in range(n_series):
                v = float(values[s][i])
                color = style.series_colors[s]
                off = start + s * (bw + gap)
                if horizontal:
                    bbox = (area_x, off, vpix(v) - area_x, bw)
                else:
                    bbox = (off, vpix(v), bw, area_b - vpix(v))
                elements.append(VisualElement("bar", bbox, color=color, series_index=s, x_index=i))
                svg.rect(*bbox, fill=color_hex(color))
    else:
        cls = "line" if ptype == "line" else "dotline"
        dash = _DASHES[style.line_style]
        for s in range(n_series):
            color = style.series_colors[s]
            pts = [(cat_center(i), vpix(float(values[s][i]))) for i in range(n_cats)]
            svg.polyline(pts, color_hex(color), dash=dash)
            for i, (px, py) in enumerate(pts):
                bbox = (px - _MARKER_SIZE / 2.0, py - _MARKER_SIZE / 2.0, _MARKER_SIZE, _MARKER_SIZE)
                elements.append(VisualElement(cls, bbox, color=color, series_index=s, x_index=i))
                if ptype == "dotline":
                    svg.marker(px, py, style.marker, color_hex(color))

    # legend
    if legend_at_bottom:
        total = sum(entry_ws) + 14.0 * (len(legends) - 1)
        if style.legend_position == "bottom-left":
            x0 = area_x
        elif style.legend_position == "bottom-centre":
            x0 = area_x + (area_w - total) / 2.0
        else:
            x0 = area_r - total
        cy = H - 8.0 - legend_row_h / 2.0
        for s, name in enumerate(legends):
            _legend_entry(svg, elements, style, name, s, x0, cy, fs, ptype)
            x0 += entry_ws[s] + 14.0
    else:
        max_entry = max(entry_ws)
        x0 = area_r - 10.0 - max_entry
        step_y = legend_row_h + 6.0
        if style.legend_position == "top-right":
            y0 = area_y + 10.0 + legend_row_h / 2.0
        else:  # center-right
            y0 = area_y + area_h / 2.0 - step_y * (len(legends) - 1) / 2.0
        for s, name in enumerate(legends):
            _legend_entry(svg, elements, style, name, s, x0, y0 + s * step_y, fs, ptype)

    gold = SemiStructuredTable(
        row_headers=list(data.x_categories),
        col_headers=list(legends),
        cells=[[float(values[s][i]) for s in range(n_series)] for i in range(n_cats)],
        row_label=data.x_label,
    )
    annotation = PlotAnnotation(elements=elements, style=style, plot_type=ptype, gold_table=gold)

    _check_layout(annotation, W, H)
    return svg.tobytes(), annotation


def _legend_entry(svg, elements, style, name, series_idx, x0, cy, fs, ptype) -> None:
    color = style.series_colors[series_idx]
    pbox = (x0, cy - _PREVIEW_H / 2.0, _PREVIEW_W, _PREVIEW_H)
    if ptype in ("vbar", "hbar"):
        svg.rect(*pbox, fill=color_hex(color))
    else:
        svg.line(x0, cy, x0 + _PREVIEW_W, cy, stroke=color_hex(color), width=2.0,
                 dash=_DASHES[style.line_style])
        if ptype == "dotline":
            svg.marker(x0 + _PREVIEW_W / 2.0, cy, style.marker, color_hex(color))
    elements.append(VisualElement("legend_preview", pbox, color=color, series_index=series_idx))
    lw = _text_w(name, fs)
    lx = x0 + _PREVIEW_W + 5.0
    elements.append(VisualElement("legend_label", (lx, cy - _text_h(fs) / 2.0, lw, _text_h(fs)),
                                  text=name, series_index=series_idx))
    svg.text(lx + lw / 2.0, cy, name, fs)


def _boxes_overlap(a, b) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def _check_layout(annotation: PlotAnnotation, W: float, H: float) -> None:
    texts = [e for e in annotation.elements if e.cls in TEXTUAL_CLASSES]
    for i, a in enumerate(texts):
        x, y, w, h = a.bbox
        if x < 0 or y < 0 or x + w > W or y + h > H:
            raise LayoutError(f"{a.cls} {a.text!r} spills off the canvas")
        for b in texts[i + 1:]:
            if _boxes_overlap(a.bbox, b.bbox):
                raise LayoutError(f"{a.cls} {a.text!r} overlaps {b.cls} {b.text!r}")


# ---------------------------------------------------------------------------
# validation

def validate_annotation(annotation: PlotAnnotation) -> list[str]:
    """Check PlotAnnotation invariants; returns human-readable violations."""
    out = []
    W, H = annotation.style.canvas
    counts = {cls: 0 for cls in ELEMENT_CLASSES}
    for e in annotation.elements:
        if e.cls not in ELEMENT_CLASSES:
            out.append(f"unknown element class {e.cls!r}")
            continue
        counts[e.cls] += 1
        x, y, w, h = e.bbox
        if w <= 0 or h <= 0:
            out.append(f"{e.cls} has degenerate bbox {e.bbox}")
        if x < -1e-9 or y < -1e-9 or x + w > W + 1e-9 or y + h > H + 1e-9:
            out.append(f"{e.cls} bbox {e.bbox} outside canvas")
        if e.cls in TEXTUAL_CLASSES and not e.text:
            out.append(f"{e.cls} carries no text")
        if e.cls in MARK_CLASSES and e.color is None:
            out.append(f"{e.cls} carries no color")

    for cls in ("title", "xaxis_label", "yaxis_label"):
        if counts[cls] != 1:
            out.append(f"expected exactly one {cls}, found {counts[cls]}")

    n_series = len(annotation.gold_table.col_headers)
    n_cats = len(annotation.gold_table.row_headers)
    if counts["legend_label"] != n_series:
        out.append(f"{counts['legend_label']} legend labels for {n_series} series")
    if counts["legend_preview"] != counts["legend_label"]:
        out.append("legend preview count != legend label count")
    if annotation.plot_type in ("vbar", "hbar"):
        if counts["bar"] != n_series * n_cats:
            out.append(f"{counts['bar']} bars for {n_series} series x {n_cats} categories")
    else:
        cls = "line" if annotation.plot_type == "line" else "dotline"
        if counts[cls] != n_series * n_cats:
            out.append(f"{counts[cls]} {cls} points for {n_series} series x {n_cats} categories")
    return out
