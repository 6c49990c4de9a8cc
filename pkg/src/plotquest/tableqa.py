"""Table question answering over a knowledge graph.

The table becomes a graph with one row node per table row and one entity
node per cell plus one per row header; edges run row -> entity and carry
the column header as label (the row-header edge carries the table's corner
label). Questions parse deterministically against the closed template
grammar into logical forms, small expression trees over aggregation /
selection / comparison primitives, which the executor evaluates against
the graph.

Questions about plot structure (legend placement, bar ordering, axis
titles...) have no table semantics; they parse fine but execute to
AnswerUnavailable, which is how the pipeline-only configuration fails on
them. Out-of-grammar text raises UnparseableQuestion instead.

Missing cells simply never contribute: a column expression yields only the
rows that have values, and direct cell references to holes give
AnswerUnavailable rather than a fabricated number.
"""

from __future__ import annotations

from dataclasses import dataclass

from .answers import Answer, AnswerUnavailable, UnparseableQuestion, number, text, yes_no
from .table import SemiStructuredTable
from .templates import Template, TemplateMatcher, default_matcher
from .sie import parse_tick_value

ROW_HEADER_EDGE = "__row__"  # edge label for header entities on unlabeled tables

LF = tuple  # ("op", arg, ...) expression trees


@dataclass
class KnowledgeGraph:
    row_nodes: list[str]
    entity_nodes: dict[str, float | str]
    edges: list[tuple[str, str, str]]  # (row node, label, entity node)
    columns: list[str]
    row_header_label: str

    def out_edges(self, row_node: str) -> list[tuple[str, str]]:
        return [(label, ent) for rn, label, ent in self.edges if rn == row_node]

    def row_header(self, row_node: str) -> str:
        for label, ent in self.out_edges(row_node):
            if label == self.row_header_label:
                return str(self.entity_nodes[ent])
        raise KeyError(f"{row_node} has no header entity")

    def column(self, col: str) -> list[tuple[str, float]]:
        """(row header, value) pairs for one column, in row order."""
        out = []
        for rn in self.row_nodes:
            header, value = None, None
            for label, ent in self.out_edges(rn):
                if label == self.row_header_label:
                    header = str(self.entity_nodes[ent])
                elif label == col:
                    value = self.entity_nodes[ent]
            if header is not None and value is not None:
                out.append((header, float(value)))
        return out

    def to_table(self) -> SemiStructuredTable:
        rows = [self.row_header(rn) for rn in self.row_nodes]
        cells: list[list[float | None]] = []
        for rn in self.row_nodes:
            by_label = dict(self.out_edges(rn))
            row = []
            for col in self.columns:
                ent = by_label.get(col)
                row.append(None if ent is None else float(self.entity_nodes[ent]))
            cells.append(row)
        label = "" if self.row_header_label == ROW_HEADER_EDGE else self.row_header_label
        return SemiStructuredTable(rows, list(self.columns), cells, row_label=label)


def build_kg(t: SemiStructuredTable) -> KnowledgeGraph:
    """Convert a table into its knowledge graph (lossless)."""
    if len(set(t.row_headers)) != len(t.row_headers):
        raise ValueError("duplicate row headers make row nodes ambiguous")
    header_label = t.row_label if t.row_label else ROW_HEADER_EDGE
    if header_label in t.col_headers:
        raise ValueError(f"row-header label {header_label!r} collides with a column")
    row_nodes = [f"r{i}" for i in range(t.n_rows)]
    entity_nodes: dict[str, float | str] = {}
    edges = []
    for i, header in enumerate(t.row_headers):
        hid = f"h{i}"
        entity_nodes[hid] = header
        edges.append((row_nodes[i], header_label, hid))
        for j, col in enumerate(t.col_headers):
            v = t.cells[i][j]
            if v is None:
                continue
            cid = f"c{i}_{j}"
            entity_nodes[cid] = float(v)
            edges.append((row_nodes[i], col, cid))
    return KnowledgeGraph(row_nodes, entity_nodes, edges, list(t.col_headers), header_label)


# ---------------------------------------------------------------------------
# logical forms

@dataclass(frozen=True)
class ParsedQuestion:
    template_id: int
    bindings: dict[str, str]
    logical_form: LF

    def __hash__(self):  # pragma: no cover - convenience only
        return hash((self.template_id, tuple(sorted(self.bindings.items()))))


def _num_binding(bindings: dict[str, str], key: str) -> LF:
    v = parse_tick_value(bindings[key])
    if v is None:
        raise UnparseableQuestion(f"threshold {bindings[key]!r} is not numeric")
    return ("num", v)


def build_logical_form(template: Template, bindings: dict[str, str]) -> LF:
    """Expression tree for one parsed question.

    Templates that resolve against plot geometry rather than the table get
    the ("visual", id) sentinel; executing it reports AnswerUnavailable.
    """
    b = bindings
    tid = template.id
    y = ("col", b["y_label"]) if "y_label" in b else None
    l1 = ("col", b["legend_label"]) if "legend_label" in b else None

    if tid == 25:
        return ("monotonic_increasing", l1)
    if tid == 29:
        return ("has_col", b["legend_label"])
    if tid == 32:
        return ("count_where", ("row_sizes",), "!=", ("ncols",))
    if tid == 33:
        return ("cell", b["x_tick"], b["y_label"])
    if tid == 34:
        return ("cell", b["x_tick"], b["legend_label"])
    if tid == 35:
        return ("monotonic_increasing", y)
    if tid == 36:
        return ("strictly_dominates", l1, ("col", b["legend_label2"]))
    if tid == 37:
        return ("strictly_dominates", ("col", b["legend_label2"]), l1)
    if tid in (38, 39):
        return ("max" if tid == 38 else "min", y)
    if tid in (40, 41):
        return ("argmax" if tid == 40 else "argmin", y)
    if tid in (42, 43):
        return ("max" if tid == 42 else "min", l1)
    if tid in (44, 45):
        return ("argmax" if tid == 44 else "argmin", l1)
    if tid == 46:
        return ("sum", ("col", b["title"]))
    if tid == 47:
        return ("diff", ("cell", b["x_tick"], b["y_label"]), ("cell", b["x_tick2"], b["y_label"]))
    if tid == 48:
        return ("mean", y)
    if tid == 49:
        return ("median", y)
    if tid == 50:
        return ("sum", l1)
    if tid == 51:
        return ("diff", ("cell", b["x_tick"], b["legend_label"]), ("cell", b["x_tick2"], b["legend_label"]))
    if tid == 52:
        return ("diff", ("cell", b["x_tick"], b["legend_label"]), ("cell", b["x_tick2"], b["legend_label2"]))
    if tid == 53:
        return ("mean", l1)
    if tid in (54, 55):
        return ("diff", ("cell", b["x_tick"], b["legend_label"]), ("cell", b["x_tick"], b["legend_label2"]))
    if tid == 56:
        return ("count_where", y, ">", _num_binding(b, "n"))
    if tid == 57:
        return ("majority_gt", ("span", y, b["x_tick"], b["x_tick2"], b["incl"]), _num_binding(b, "n"))
    if tid == 58:
        return ("ratio", ("cell", b["x_tick"], b["y_label"]), ("cell", b["x_tick2"], b["y_label"]))
    if tid == 59:
        return ("cmp", "<", ("cell", b["x_tick"], b["y_label"]), ("cell", b["x_tick2"], b["y_label"]))
    if tid == 60:
        return ("count_where", l1, ">", _num_binding(b, "n"))
    if tid == 61:
        return ("ratio", ("cell", b["x_tick"], b["legend_label"]), ("cell", b["x_tick2"], b["legend_label"]))
    if tid == 62:
        return ("cmp", "<", ("cell", b["x_tick"], b["legend_label"]), ("cell", b["x_tick2"], b["legend_label"]))
    if tid == 63:
        d = ("diff", ("cell", b["x_tick"], b["y_label"]), ("cell", b["x_tick2"], b["y_label"]))
        return ("cmp", ">", d, ("diff", ("max", y), ("min", y)))
    if tid == 64:
        return ("diff", ("nth_from", y, 1, "largest"), ("nth_from", y, 2, "largest"))
    if tid == 65:
        s = ("add", ("cell", b["x_tick"], b["y_label"]), ("cell", b["x_tick2"], b["y_label"]))
        return ("cmp", ">", s, ("max", y))
    if tid == 66:
        return ("diff", ("max", y), ("min", y))
    if tid == 67:
        return ("count_where", y, ">", ("mean", y))
    if tid == 68:
        d1 = ("diff", ("cell", b["x_tick"], b["legend_label"]), ("cell", b["x_tick2"], b["legend_label"]))
        d2 = ("diff", ("cell", b["x_tick"], b["legend_label2"]), ("cell", b["x_tick2"], b["legend_label2"]))
        return ("cmp", ">", d1, d2)
    if tid == 69:
        return ("diff", ("nth_from", l1, 1, "largest"), ("nth_from", l1, 2, "largest"))
    if tid == 70:
        return ("diff", ("max", l1), ("min", l1))
    if tid == 71:
        return ("count_where", l1, ">", ("mean", l1))
    if tid == 72:
        s = ("pointwise_sum", l1, ("col", b["legend_label2"]))
        return ("strictly_dominates", s, ("col", b["legend_label3"]))
    if tid == 73:
        s = ("add", ("cell", b["x_tick"], b["legend_label"]), ("cell", b["x_tick2"], b["legend_label"]))
        return ("cmp", ">", s, ("max", ("col", b["legend_label2"])))
    if tid == 74:
        s1 = ("pointwise_sum", l1, ("col", b["legend_label2"]))
        s2 = ("pointwise_sum", ("col", b["legend_label3"]), ("col", b["legend_label4"]))
        return ("strictly_dominates", s1, s2)
    return ("visual", tid)


def parse(question: str, matcher: TemplateMatcher | None = None) -> ParsedQuestion:
    """Match a question against the grammar; unique by template priority."""
    m = (matcher or default_matcher()).match(question)
    if m is None:
        raise UnparseableQuestion(question)
    template, bindings = m
    return ParsedQuestion(template.id, bindings, build_logical_form(template, bindings))


# ---------------------------------------------------------------------------
# execution

_CMP = {
    ">": lambda a, b: a > b,
    "<": lambda a, b: a < b,
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def _resolve_col(kg: KnowledgeGraph, name: str) -> str:
    if name in kg.columns:
        return name
    if len(kg.columns) == 1:
        # plots without a legend label their lone column with the value-axis
        # phrase; any value-phrase mention resolves to it
        return kg.columns[0]
    raise AnswerUnavailable(f"no column named {name!r}")


def _eval_list(lf: LF, kg: KnowledgeGraph) -> list[tuple[str, float]]:
    op = lf[0]
    if op == "col":
        return kg.column(_resolve_col(kg, lf[1]))
    if op == "row_sizes":
        sizes = []
        for rn in kg.row_nodes:
            n = sum(1 for label, _ in kg.out_edges(rn) if label != kg.row_header_label)
            sizes.append((kg.row_header(rn), float(n)))
        return sizes
    if op == "span":
        items = _eval_list(lf[1], kg)
        labels = [lab for lab, _ in items]
        a, b2, mode = lf[2], lf[3], lf[4]
        if a not in labels or b2 not in labels:
            raise AnswerUnavailable(f"span endpoint missing: {a!r}..{b2!r}")
        i, j = labels.index(a), labels.index(b2)
        if i > j:
            i, j = j, i
        if mode == "exclusive":
            i, j = i + 1, j - 1
        if i > j:
            raise AnswerUnavailable("empty span")
        return items[i:j + 1]
    if op == "pointwise_sum":
        xs, ys = _eval_list(lf[1], kg), _eval_list(lf[2], kg)
        if [l for l, _ in xs] != [l for l, _ in ys]:
            raise AnswerUnavailable("pointwise sum over misaligned columns")
        return [(l, vx + vy) for (l, vx), (_, vy) in zip(xs, ys)]
    raise AnswerUnavailable(f"not a list expression: {op}")


def _eval_scalar(lf: LF, kg: KnowledgeGraph) -> float:
    op = lf[0]
    if op == "num":
        return float(lf[1])
    if op == "ncols":
        return float(len(kg.columns))
    if op == "cell":
        row_text, col_name = lf[1], lf[2]
        col = _resolve_col(kg, col_name)
        for label, value in kg.column(col):
            if label == row_text:
                return value
        raise AnswerUnavailable(f"no cell ({row_text!r}, {col!r})")
    if op in ("max", "min", "sum", "mean", "median"):
        values = [v for _, v in _eval_list(lf[1], kg)]
        if not values:
            raise AnswerUnavailable(f"{op} over an empty column")
        if op == "max":
            return max(values)
        if op == "min":
            return min(values)
        if op == "sum":
            return float(sum(values))
        if op == "mean":
            return float(sum(values)) / len(values)
        vs = sorted(values)
        k = len(vs)
        mid = k // 2
        return vs[mid] if k % 2 else (vs[mid - 1] + vs[mid]) / 2.0
    if op == "nth_from":
        values = [v for _, v in _eval_list(lf[1], kg)]
        k, direction = int(lf[2]), lf[3]
        if k < 1 or k > len(values):
            raise AnswerUnavailable(f"rank {k} outside column of size {len(values)}")
        ordered = sorted(values, reverse=(direction == "largest"))
        return ordered[k - 1]
    if op == "diff":
        return _eval_scalar(lf[1], kg) - _eval_scalar(lf[2], kg)
    if op == "add":
        return _eval_scalar(lf[1], kg) + _eval_scalar(lf[2], kg)
    if op == "ratio":
        den = _eval_scalar(lf[2], kg)
        if den == 0:
            raise AnswerUnavailable("ratio with zero denominator")
        return _eval_scalar(lf[1], kg) / den
    if op == "count_where":
        threshold = _eval_scalar(lf[3], kg)
        cmp = _CMP[lf[2]]
        return float(sum(1 for _, v in _eval_list(lf[1], kg) if cmp(v, threshold)))
    raise AnswerUnavailable(f"not a scalar expression: {op}")


def execute(lf: LF, kg: KnowledgeGraph) -> Answer:
    """Evaluate a logical form against the knowledge graph."""
    op = lf[0]
    if op == "visual":
        raise AnswerUnavailable(f"template {lf[1]} resolves against plot geometry, not the table")
    if op in ("argmax", "argmin"):
        items = _eval_list(lf[1], kg)
        if not items:
            raise AnswerUnavailable(f"{op} over an empty column")
        best = max(items, key=lambda it: it[1]) if op == "argmax" else min(items, key=lambda it: it[1])
        # first occurrence wins on ties
        for label, v in items:
            if v == best[1]:
                return text(label)
    if op == "has_col":
        return yes_no(lf[1] in kg.columns)
    if op == "monotonic_increasing":
        values = [v for _, v in _eval_list(lf[1], kg)]
        if not values:
            raise AnswerUnavailable("monotonicity of an empty column")
        strict = bool(lf[2]) if len(lf) > 2 else False
        ok = all(b > a if strict else b >= a for a, b in zip(values, values[1:]))
        return yes_no(ok)
    if op == "strictly_dominates":
        xs, ys = _eval_list(lf[1], kg), _eval_list(lf[2], kg)
        if not xs or [l for l, _ in xs] != [l for l, _ in ys]:
            raise AnswerUnavailable("dominance over misaligned columns")
        return yes_no(all(vx > vy for (_, vx), (_, vy) in zip(xs, ys)))
    if op == "majority_gt":
        items = _eval_list(lf[1], kg)
        if not items:
            raise AnswerUnavailable("majority over an empty span")
        threshold = _eval_scalar(lf[2], kg)
        return yes_no(sum(1 for _, v in items if v > threshold) > len(items) / 2.0)
    if op == "cmp":
        return yes_no(_CMP[lf[1]](_eval_scalar(lf[2], kg), _eval_scalar(lf[3], kg)))
    return number(_eval_scalar(lf, kg))


def answer(question: str, t: SemiStructuredTable, matcher: TemplateMatcher | None = None) -> Answer:
    """Parse, build the knowledge graph, execute."""
    parsed = parse(question, matcher)
    return execute(parsed.logical_form, build_kg(t))


def to_sexpr(lf: LF) -> str:
    """Debug rendering, e.g. (count_where (col "price of diesel") > 0.6)."""
    parts = []
    for item in lf:
        if isinstance(item, tuple):
            parts.append(to_sexpr(item))
        elif isinstance(item, str) and lf[0] in ("col", "cell", "has_col", "span") and item is not lf[0]:
            parts.append(f'"{item}"')
        else:
            parts.append(str(item))
    return "(" + " ".join(parts) + ")"
