"""Question instantiation over a plot: applicability, binding sampling,
surface realization and gold answers for all 74 templates.

Gold answers are computed directly in value space from the PlotData (plus
style metadata for structural questions), independently of the extraction
pipeline that will later answer the same questions from detections. Table
templates must agree with the tableqa executor on the gold table; that
equality is a tested invariant, not an implementation shortcut.

Two sampling rules keep generated questions well-posed:

- numeric thresholds ("greater than N units") are placed at the midpoint
  of a value gap near a round quantile, so no data point sits on the
  boundary;
- bindings whose answer would hinge on a float coincidence (a value equal
  to the column mean, two differences closer than 1e-9 of the data scale)
  are rejected and resampled. Without this, a comparison could flip on the
  last bit between the raw values and their pixel-roundtripped twins, and
  "exact at zero noise" would be unfalsifiable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .answers import Answer, number, text, yes_no
from .corpus import ENTITY_POOLS, PlotData, pluralize
from .plotgen import PlotSpec, plot_title, screen_axis_labels, value_axis
from .templates import (
    Template, TemplateError, default_templates, ordinal, parse_ordinal,
)

DEFAULT_QUESTIONS_PER_PLOT = 12

# defaults skew heavily toward reasoning and open-vocabulary answers;
# structural questions are a small slice and never have open answers
DEFAULT_CATEGORY_WEIGHTS = {"structural": 0.045, "data_retrieval": 0.14, "reasoning": 0.815}
ANSWER_TYPE_WEIGHTS = {
    "structural": {"yes_no": 0.3699, "fixed_vocab": 0.6301, "open_vocab": 0.0},
    "data_retrieval": {"yes_no": 0.0519, "fixed_vocab": 0.1852, "open_vocab": 0.7629},
    "reasoning": {"yes_no": 0.0205, "fixed_vocab": 0.1592, "open_vocab": 0.8203},
}

_EPS_REL = 1e-9


class Degenerate(Exception):
    """Bindings whose answer would sit on a float knife edge."""


@dataclass(frozen=True)
class QuestionInstance:
    template_id: int
    category: str
    answer_type: str
    text: str
    bindings: dict[str, str]
    gold_answer: Answer

    def to_json(self) -> dict:
        return {
            "template_id": self.template_id,
            "category": self.category,
            "answer_type": self.answer_type,
            "text": self.text,
            "bindings": dict(self.bindings),
            "gold_answer": self.gold_answer.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "QuestionInstance":
        return QuestionInstance(
            template_id=obj["template_id"],
            category=obj["category"],
            answer_type=obj["answer_type"],
            text=obj["text"],
            bindings=dict(obj["bindings"]),
            gold_answer=Answer.from_json(obj["gold_answer"]),
        )


# ---------------------------------------------------------------------------
# plot context

class _Ctx:
    def __init__(self, data: PlotData, spec: PlotSpec):
        if spec.data is not data:
            data.validate()
        self.data = data
        self.spec = spec
        self.V = data.values_matrix()
        self.n_series = data.n_series
        self.n_cats = data.n_categories
        self.ptype = spec.plot_type
        self.is_bar = spec.plot_type in ("vbar", "hbar")
        self.legends = list(data.legend_labels)
        self.cats = list(data.x_categories)
        self.y = data.y_label
        self.x_singular = data.x_label.lower()
        self.x_plural = pluralize(self.x_singular)
        self.figure_type = "bar" if self.is_bar else spec.plot_type
        self.title = plot_title(data)
        _axis_max, self.tick_step, self.ticks = value_axis(data)
        self.eps = _EPS_REL * max(1.0, float(self.V.max()))

    def series_values(self, legend: str) -> np.ndarray:
        return self.V[self.legends.index(legend)]

    def cat_index(self, tick: str) -> int:
        return self.cats.index(tick)


def count_line_crossings(V: np.ndarray) -> int:
    """Crossing points between distinct series polylines on a shared x grid.

    A crossing is a strict sign flip of the pairwise difference across one
    category interval; contacts at shared vertices do not count.
    """
    n_series, n_cats = V.shape
    crossings = 0
    for a in range(n_series):
        for b in range(a + 1, n_series):
            d = V[a] - V[b]
            for i in range(n_cats - 1):
                if d[i] * d[i + 1] < 0:
                    crossings += 1
    return crossings


def is_monotonic_nondecreasing(values) -> bool:
    return all(b >= a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# applicability

def _applicable(tid: int, ctx: _Ctx) -> bool:
    p, ns = ctx.ptype, ctx.n_series
    if tid in (9, 10, 11, 16, 32):
        return ctx.is_bar
    if tid in (12, 13, 19, 20, 23):
        return p == "vbar"
    if tid in (14, 15, 21, 22, 24):
        return p == "hbar"
    if tid in (17, 18):
        return p in ("line", "dotline")
    if tid in (26, 27):
        return p != "hbar"  # value ticks must sit on the Y axis
    if tid in (33, 35, 38, 39, 40, 41, 46, 47, 48, 49, 56, 57, 58, 59, 63, 64, 65, 66, 67):
        return ns == 1
    if tid in (36, 37, 52, 54, 55, 68):
        return ns >= 2
    if tid == 72:
        return ns >= 3
    if tid == 73:
        return ns >= 2
    if tid == 74:
        return ns >= 4
    return True


def applicable_templates(ctx_or_pair, templates: list[Template] | None = None) -> list[Template]:
    """Templates that can be instantiated on this plot."""
    ctx = ctx_or_pair if isinstance(ctx_or_pair, _Ctx) else _Ctx(*ctx_or_pair)
    return [t for t in (templates or default_templates()) if _applicable(t.id, ctx)]


# ---------------------------------------------------------------------------
# binding samplers

def _guard_margins(diffs, eps: float, allow_exact_ties: bool = True) -> None:
    for d in np.atleast_1d(np.asarray(diffs, dtype=float)):
        a = abs(float(d))
        if a < eps and (a > 0.0 or not allow_exact_ties):
            raise Degenerate("comparison margin below float-safety threshold")


def _threshold_string(values: np.ndarray, rng: np.random.Generator, eps: float) -> str:
    """A round threshold strictly between two data values (or above all)."""
    uniq = sorted(set(float(v) for v in values))
    if len(uniq) == 1:
        v = uniq[0]
        n = v * 1.5 if v > 0 else 1.0
        n = float(f"{n:.3g}")
        if n <= v + eps:
            n = v * 2 + 1.0
        return _num_str(n)
    q = float(rng.choice([0.25, 0.5, 0.75]))
    target = uniq[0] + q * (uniq[-1] - uniq[0])
    gaps = sorted(
        ((lo, hi) for lo, hi in zip(uniq, uniq[1:])),
        key=lambda g: abs((g[0] + g[1]) / 2.0 - target),
    )
    for lo, hi in gaps:
        if hi - lo < 4 * eps:
            continue
        mid = (lo + hi) / 2.0
        for digits in range(1, 17):
            cand = float(f"{mid:.{digits}g}")
            if lo + eps < cand < hi - eps:
                return _num_str(cand)
    raise Degenerate("no representable threshold between data values")


def _num_str(v: float) -> str:
    s = str(int(v)) if float(v).is_integer() and abs(v) < 1e16 else str(v)
    return s.lstrip("+")


def _pick_cat(ctx: _Ctx, rng) -> int:
    return int(rng.integers(ctx.n_cats))


def _pick_two_cats(ctx: _Ctx, rng, ordered: bool = False) -> tuple[int, int]:
    i, j = rng.choice(ctx.n_cats, size=2, replace=False)
    i, j = int(i), int(j)
    if ordered and i > j:
        i, j = j, i
    return i, j


def _pick_series(ctx: _Ctx, rng, k: int = 1) -> list[int]:
    idx = rng.choice(ctx.n_series, size=k, replace=False)
    return [int(i) for i in idx]


def _legend_pool(ctx: _Ctx) -> list[str]:
    if ctx.data.x_label == "Year":
        return list(ENTITY_POOLS[ctx.data.indicator.plural_entity_phrase])
    return [str(y) for y in range(1960, 2017)]


def sample_bindings(template: Template, ctx: _Ctx, rng: np.random.Generator) -> dict[str, str]:
    """Draw one binding set for an applicable template.

    Raises Degenerate when the draw lands on a knife-edge answer; callers
    resample or move on.
    """
    tid = template.id
    b: dict[str, str] = {}
    slots = template.slots

    if "y_label" in slots:
        b["y_label"] = ctx.y
    if "x_singular" in slots:
        b["x_singular"] = ctx.x_singular
    if "x_plural" in slots:
        b["x_plural"] = ctx.x_plural
    if "figure_type" in slots:
        b["figure_type"] = ctx.figure_type
    if "title" in slots:
        b["title"] = ctx.title

    if tid in (12, 13, 14, 15):
        b["i"] = ordinal(int(rng.integers(1, ctx.n_cats + 1)))
    elif tid in (19, 20, 21, 22):
        b["i"] = ordinal(int(rng.integers(1, ctx.n_series + 1)))
    if tid in (23, 24):
        b["j"] = ordinal(int(rng.integers(1, ctx.n_cats + 1)))

    if tid == 29:
        pool = _legend_pool(ctx)
        absent = [c for c in pool if c not in ctx.legends]
        if absent and rng.random() < 0.5:
            b["legend_label"] = absent[int(rng.integers(len(absent)))]
        else:
            b["legend_label"] = ctx.legends[int(rng.integers(ctx.n_series))]
    elif "legend_label4" in slots:
        s = _pick_series(ctx, rng, 4)
        b["legend_label"], b["legend_label2"] = ctx.legends[s[0]], ctx.legends[s[1]]
        b["legend_label3"], b["legend_label4"] = ctx.legends[s[2]], ctx.legends[s[3]]
    elif "legend_label3" in slots:
        s = _pick_series(ctx, rng, 3)
        b["legend_label"], b["legend_label2"] = ctx.legends[s[0]], ctx.legends[s[1]]
        b["legend_label3"] = ctx.legends[s[2]]
    elif "legend_label2" in slots:
        s = _pick_series(ctx, rng, 2)
        b["legend_label"], b["legend_label2"] = ctx.legends[s[0]], ctx.legends[s[1]]
    elif "legend_label" in slots:
        b["legend_label"] = ctx.legends[_pick_series(ctx, rng, 1)[0]]

    if tid == 65:
        i = int(rng.integers(ctx.n_cats - 1))
        b["x_tick"], b["x_tick2"] = ctx.cats[i], ctx.cats[i + 1]
    elif tid == 57:
        if ctx.n_cats < 3:
            i, j = 0, ctx.n_cats - 1
            b["incl"] = "inclusive"
        else:
            i, j = _pick_two_cats(ctx, rng, ordered=True)
            if j - i >= 2 and rng.random() < 0.5:
                b["incl"] = "exclusive"
            else:
                b["incl"] = "inclusive"
        b["x_tick"], b["x_tick2"] = ctx.cats[i], ctx.cats[j]
    elif "x_tick2" in slots:
        i, j = _pick_two_cats(ctx, rng)
        b["x_tick"], b["x_tick2"] = ctx.cats[i], ctx.cats[j]
    elif "x_tick" in slots:
        b["x_tick"] = ctx.cats[_pick_cat(ctx, rng)]

    if "n" in slots:
        series = ctx.series_values(b["legend_label"]) if "legend_label" in b else ctx.V[0]
        b["n"] = _threshold_string(np.asarray(series), rng, ctx.eps)

    _check_degenerate(tid, b, ctx)
    return b


def _check_degenerate(tid: int, b: dict[str, str], ctx: _Ctx) -> None:
    eps = ctx.eps
    if tid in (25, 35):
        vals = ctx.series_values(b["legend_label"]) if tid == 25 else ctx.V[0]
        _guard_margins(np.diff(vals), eps)
    elif tid in (36, 37):
        d = ctx.series_values(b["legend_label"]) - ctx.series_values(b["legend_label2"])
        _guard_margins(d, eps)
    elif tid in (40, 41, 44, 45):
        vals = ctx.series_values(b["legend_label"]) if tid in (44, 45) else ctx.V[0]
        s = np.sort(vals)
        edge = (s[-1] - s[-2]) if tid in (40, 44) else (s[1] - s[0])
        _guard_margins([edge], eps)
    elif tid in (59, 62):
        vals = ctx.series_values(b["legend_label"]) if tid == 62 else ctx.V[0]
        i, j = ctx.cat_index(b["x_tick"]), ctx.cat_index(b["x_tick2"])
        _guard_margins([vals[i] - vals[j]], eps)
    elif tid == 63:
        v = ctx.V[0]
        i, j = ctx.cat_index(b["x_tick"]), ctx.cat_index(b["x_tick2"])
        _guard_margins([(v[i] - v[j]) - (v.max() - v.min())], eps)
    elif tid in (65, 73):
        vals = ctx.series_values(b["legend_label"]) if tid == 73 else ctx.V[0]
        other = ctx.series_values(b["legend_label2"]) if tid == 73 else ctx.V[0]
        i, j = ctx.cat_index(b["x_tick"]), ctx.cat_index(b["x_tick2"])
        _guard_margins([(vals[i] + vals[j]) - other.max()], eps, allow_exact_ties=False)
    elif tid in (67, 71):
        vals = ctx.series_values(b["legend_label"]) if tid == 71 else ctx.V[0]
        _guard_margins(vals - vals.mean(), eps, allow_exact_ties=False)
    elif tid == 68:
        i, j = ctx.cat_index(b["x_tick"]), ctx.cat_index(b["x_tick2"])
        v1 = ctx.series_values(b["legend_label"])
        v2 = ctx.series_values(b["legend_label2"])
        _guard_margins([(v1[i] - v1[j]) - (v2[i] - v2[j])], eps, allow_exact_ties=False)
    elif tid == 72:
        s = ctx.series_values(b["legend_label"]) + ctx.series_values(b["legend_label2"])
        _guard_margins(s - ctx.series_values(b["legend_label3"]), eps, allow_exact_ties=False)
    elif tid == 74:
        s1 = ctx.series_values(b["legend_label"]) + ctx.series_values(b["legend_label2"])
        s2 = ctx.series_values(b["legend_label3"]) + ctx.series_values(b["legend_label4"])
        _guard_margins(s1 - s2, eps, allow_exact_ties=False)


# ---------------------------------------------------------------------------
# gold answers

def gold_answer(template: Template, bindings: dict[str, str], data: PlotData, spec: PlotSpec) -> Answer:
    """Ground-truth answer for an applicable template under given bindings."""
    ctx = _Ctx(data, spec)
    return _gold(template.id, bindings, ctx)


def _gold(tid: int, b: dict[str, str], ctx: _Ctx) -> Answer:
    V, style = ctx.V, ctx.spec.style

    if tid == 1:
        return yes_no(bool((V == 0).any()))
    if tid == 2:
        return yes_no(style.grid)
    if tid == 3:
        return text(style.legend_position)
    if tid == 4:
        return number(ctx.n_series)
    if tid == 5:
        return text("horizontal" if style.legend_position.startswith("bottom") else "vertical")
    if tid == 6:
        return number(ctx.n_cats)
    if tid == 7:
        return number(ctx.n_series * ctx.n_cats if ctx.is_bar else ctx.n_series)
    if tid == 8:
        return number(ctx.n_series)
    if tid == 9:
        return number(ctx.n_cats)
    if tid in (10, 11):
        return yes_no(True)  # every group is fully populated by construction
    if tid in (12, 13, 14, 15):
        parse_ordinal(b["i"])  # validates the binding
        return number(ctx.n_series)
    if tid == 16:
        return yes_no(ctx.ptype == "hbar")
    if tid == 17:
        return number(count_line_crossings(V))
    if tid == 18:
        return yes_no(True)
    if tid in (19, 20, 21, 22):
        i = parse_ordinal(b["i"])
        idx = i - 1 if tid in (19, 21) else ctx.n_series - i
        return text(ctx.legends[idx])
    if tid in (23, 24):
        return text(ctx.cats[parse_ordinal(b["j"]) - 1])
    if tid == 25:
        return yes_no(is_monotonic_nondecreasing(ctx.series_values(b["legend_label"])))
    if tid == 26:
        return number(ctx.tick_step)
    if tid == 27:
        return yes_no(style.tick_notation == "scientific_E")
    if tid == 28:
        return text(ctx.title)
    if tid == 29:
        return yes_no(b["legend_label"] in ctx.legends)
    if tid == 30:
        return text(screen_axis_labels(ctx.data, ctx.ptype)[0])
    if tid == 31:
        return text(screen_axis_labels(ctx.data, ctx.ptype)[1])
    if tid == 32:
        return number(0)
    if tid == 33:
        return number(V[0][ctx.cat_index(b["x_tick"])])
    if tid == 34:
        return number(ctx.series_values(b["legend_label"])[ctx.cat_index(b["x_tick"])])
    if tid == 35:
        return yes_no(is_monotonic_nondecreasing(V[0]))
    if tid in (36, 37):
        v1 = ctx.series_values(b["legend_label"])
        v2 = ctx.series_values(b["legend_label2"])
        return yes_no(bool((v1 > v2).all() if tid == 36 else (v1 < v2).all()))
    if tid in (38, 39):
        return number(V[0].max() if tid == 38 else V[0].min())
    if tid in (40, 41):
        idx = int(np.argmax(V[0]) if tid == 40 else np.argmin(V[0]))
        return text(ctx.cats[idx])
    if tid in (42, 43):
        vals = ctx.series_values(b["legend_label"])
        return number(vals.max() if tid == 42 else vals.min())
    if tid in (44, 45):
        vals = ctx.series_values(b["legend_label"])
        idx = int(np.argmax(vals) if tid == 44 else np.argmin(vals))
        return text(ctx.cats[idx])
    if tid == 46:
        return number(float(V[0].sum()))
    if tid == 47:
        v = V[0]
        return number(v[ctx.cat_index(b["x_tick"])] - v[ctx.cat_index(b["x_tick2"])])
    if tid == 48:
        return number(float(V[0].sum()) / ctx.n_cats)
    if tid == 49:
        return number(float(np.median(V[0])))
    if tid == 50:
        return number(float(ctx.series_values(b["legend_label"]).sum()))
    if tid == 51:
        vals = ctx.series_values(b["legend_label"])
        return number(vals[ctx.cat_index(b["x_tick"])] - vals[ctx.cat_index(b["x_tick2"])])
    if tid == 52:
        va = ctx.series_values(b["legend_label"])[ctx.cat_index(b["x_tick"])]
        vb = ctx.series_values(b["legend_label2"])[ctx.cat_index(b["x_tick2"])]
        return number(va - vb)
    if tid == 53:
        vals = ctx.series_values(b["legend_label"])
        return number(float(vals.sum()) / ctx.n_cats)
    if tid in (54, 55):
        i = ctx.cat_index(b["x_tick"])
        va = ctx.series_values(b["legend_label"])[i]
        vb = ctx.series_values(b["legend_label2"])[i]
        return number(va - vb)
    if tid in (56, 60):
        vals = ctx.series_values(b["legend_label"]) if tid == 60 else V[0]
        n = float(b["n"])
        return number(int((vals > n).sum()))
    if tid == 57:
        v = V[0]
        i, j = sorted((ctx.cat_index(b["x_tick"]), ctx.cat_index(b["x_tick2"])))
        if b["incl"] == "exclusive":
            i, j = i + 1, j - 1
        window = v[i:j + 1]
        n = float(b["n"])
        return yes_no(bool((window > n).sum() > len(window) / 2.0))
    if tid in (58, 61):
        vals = ctx.series_values(b["legend_label"]) if tid == 61 else V[0]
        num_v = vals[ctx.cat_index(b["x_tick"])]
        den_v = vals[ctx.cat_index(b["x_tick2"])]
        if den_v == 0:
            raise Degenerate("ratio with zero denominator")
        return number(num_v / den_v)
    if tid in (59, 62):
        vals = ctx.series_values(b["legend_label"]) if tid == 62 else V[0]
        return yes_no(bool(vals[ctx.cat_index(b["x_tick"])] < vals[ctx.cat_index(b["x_tick2"])]))
    if tid == 63:
        v = V[0]
        d = v[ctx.cat_index(b["x_tick"])] - v[ctx.cat_index(b["x_tick2"])]
        return yes_no(bool(d > v.max() - v.min()))
    if tid in (64, 69):
        vals = ctx.series_values(b["legend_label"]) if tid == 69 else V[0]
        s = np.sort(vals)[::-1]
        return number(float(s[0] - s[1]))
    if tid == 65:
        v = V[0]
        s = v[ctx.cat_index(b["x_tick"])] + v[ctx.cat_index(b["x_tick2"])]
        return yes_no(bool(s > v.max()))
    if tid in (66, 70):
        vals = ctx.series_values(b["legend_label"]) if tid == 70 else V[0]
        return number(float(vals.max() - vals.min()))
    if tid in (67, 71):
        vals = ctx.series_values(b["legend_label"]) if tid == 71 else V[0]
        return number(int((vals > vals.mean()).sum()))
    if tid == 68:
        i, j = ctx.cat_index(b["x_tick"]), ctx.cat_index(b["x_tick2"])
        v1, v2 = ctx.series_values(b["legend_label"]), ctx.series_values(b["legend_label2"])
        return yes_no(bool((v1[i] - v1[j]) > (v2[i] - v2[j])))
    if tid == 72:
        s = ctx.series_values(b["legend_label"]) + ctx.series_values(b["legend_label2"])
        return yes_no(bool((s > ctx.series_values(b["legend_label3"])).all()))
    if tid == 73:
        vals = ctx.series_values(b["legend_label"])
        s = vals[ctx.cat_index(b["x_tick"])] + vals[ctx.cat_index(b["x_tick2"])]
        return yes_no(bool(s > ctx.series_values(b["legend_label2"]).max()))
    if tid == 74:
        s1 = ctx.series_values(b["legend_label"]) + ctx.series_values(b["legend_label2"])
        s2 = ctx.series_values(b["legend_label3"]) + ctx.series_values(b["legend_label4"])
        return yes_no(bool((s1 > s2).all()))
    raise ValueError(f"no gold semantics for template {tid}")


# ---------------------------------------------------------------------------
# surface realization

def paraphrase(pattern: str, bindings: dict[str, str], lexicon: dict[str, str]) -> str:
    """Fill a pattern after mapping binding values through the lexicon.

    Values without a lexicon entry substitute verbatim; a slot missing from
    the bindings raises naming the slot.
    """
    mapped = {k: lexicon.get(str(v), str(v)) for k, v in bindings.items()}
    return Template(0, "structural", "yes_no", pattern).fill(mapped)


def instantiate(
    data: PlotData,
    spec: PlotSpec,
    templates: list[Template],
    seed: int,
    n_questions: int = DEFAULT_QUESTIONS_PER_PLOT,
    category_weights: dict[str, float] | None = None,
    lexicon: dict[str, str] | None = None,
) -> list[QuestionInstance]:
    """Sample questions for one plot.

    Categories are drawn from the (renormalized) category weights, answer
    types from the per-category distribution grid, templates uniformly
    within the bucket. Duplicate surface texts are rejected.
    """
    if not templates:
        raise ValueError("no templates supplied")
    rng = np.random.default_rng(seed)
    lexicon = lexicon or {}
    ctx = _Ctx(data, spec)
    cat_w = category_weights or DEFAULT_CATEGORY_WEIGHTS

    buckets: dict[tuple[str, str], list[Template]] = {}
    for t in templates:
        if _applicable(t.id, ctx):
            buckets.setdefault((t.category, t.answer_type), []).append(t)
    if not buckets:
        return []

    categories = sorted({c for c, _ in buckets})
    cw = np.array([cat_w.get(c, 0.0) for c in categories], dtype=float)
    if cw.sum() == 0:
        cw[:] = 1.0
    cw /= cw.sum()

    out: list[QuestionInstance] = []
    seen: set[str] = set()
    attempts = 0
    while len(out) < n_questions and attempts < n_questions * 40:
        attempts += 1
        cat = categories[int(rng.choice(len(categories), p=cw))]
        atypes = sorted({a for c, a in buckets if c == cat})
        aw = np.array([ANSWER_TYPE_WEIGHTS[cat].get(a, 0.0) for a in atypes], dtype=float)
        if aw.sum() == 0:
            aw[:] = 1.0
        aw /= aw.sum()
        atype = atypes[int(rng.choice(len(atypes), p=aw))]
        pool = buckets[(cat, atype)]
        template = pool[int(rng.integers(len(pool)))]
        try:
            bindings = sample_bindings(template, ctx, rng)
            gold = _gold(template.id, bindings, ctx)
        except Degenerate:
            continue
        bindings = {k: lexicon.get(v, v) for k, v in bindings.items()}
        try:
            text_q = template.fill(bindings)
        except TemplateError:
            continue
        if text_q in seen:
            continue
        seen.add(text_q)
        out.append(QuestionInstance(template.id, cat, atype, text_q, bindings, gold))
    return out


def instantiate_all(
    data: PlotData,
    spec: PlotSpec,
    templates: list[Template],
    seed: int,
    lexicon: dict[str, str] | None = None,
) -> list[QuestionInstance]:
    """One instance of every applicable template (skipping degenerate draws)."""
    rng = np.random.default_rng(seed)
    lexicon = lexicon or {}
    ctx = _Ctx(data, spec)
    out = []
    for template in templates:
        if not _applicable(template.id, ctx):
            continue
        for _ in range(8):
            try:
                bindings = sample_bindings(template, ctx, rng)
                gold = _gold(template.id, bindings, ctx)
            except Degenerate:
                continue
            bindings = {k: lexicon.get(v, v) for k, v in bindings.items()}
            out.append(QuestionInstance(
                template.id, template.category, template.answer_type,
                template.fill(bindings), bindings, gold,
            ))
            break
    return out


def write_jsonl(instances: list[QuestionInstance], path: str, plot_ids: list[int] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for k, inst in enumerate(instances):
            rec = inst.to_json()
            if plot_ids is not None:
                rec["plot_id"] = plot_ids[k]
            f.write(json.dumps(rec) + "\n")


def read_jsonl(path: str) -> list[tuple[QuestionInstance, int | None]]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append((QuestionInstance.from_json(obj), obj.get("plot_id")))
    return out
