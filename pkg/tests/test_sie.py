import random

import numpy as np
import pytest

from plotquest.corpus import sample_plot_data
from plotquest.detsim import ZERO_NOISE, Detection, DetectionSet, perturb
from plotquest.palette import PALETTE
from plotquest.plotgen import make_plot_spec, render
from plotquest.sie import (
    ExtractionError, associate_bars, associate_legend, associate_ticks,
    extract_table, interpolate_value, parse_tick_value, table_f1,
)
from plotquest.table import SemiStructuredTable

from conftest import clean_detections, make_data, make_spec, rendered


def color_id(name):
    return next(k for k, (n, _) in enumerate(PALETTE) if n == name)


# -- legend association -------------------------------------------------------

def test_legend_label_maps_to_adjacent_preview_color():
    dark_cyan = color_id("Dark Cyan")
    crimson = color_id("Crimson")
    d = DetectionSet([
        Detection("legend_preview", (100, 10, 18, 10), 1.0, color=dark_cyan),
        Detection("legend_label", (123, 10, 40, 12), 1.0, text="Brazil"),
        Detection("legend_preview", (100, 40, 18, 10), 1.0, color=crimson),
        Detection("legend_label", (123, 40, 50, 12), 1.0, text="Iceland"),
    ])
    m = associate_legend(d)
    assert m == {"Brazil": dark_cyan, "Iceland": crimson}


def test_legend_single_pairing():
    d = DetectionSet([
        Detection("legend_preview", (10, 10, 18, 10), 1.0, color=5),
        Detection("legend_label", (200, 300, 30, 12), 1.0, text="Only"),
    ])
    assert associate_legend(d) == {"Only": 5}


def test_legend_tie_broken_by_reading_order():
    # one label exactly between two previews: the leftmost preview wins
    d = DetectionSet([
        Detection("legend_preview", (100, 50, 10, 10), 1.0, color=1),
        Detection("legend_preview", (140, 50, 10, 10), 1.0, color=2),
        Detection("legend_label", (120, 50, 10, 10), 1.0, text="A"),
    ])
    assert associate_legend(d)["A"] == 1


def test_legend_empty_when_no_labels():
    assert associate_legend(DetectionSet([])) == {}


# -- tick association ---------------------------------------------------------

def test_associate_ticks_ordered_pairs():
    d = DetectionSet([
        Detection("xtick_label", (300, 500, 30, 12), 1.0, text="1997"),
        Detection("xtick_label", (100, 500, 30, 12), 1.0, text="1996"),
        Detection("xtick_label", (700, 500, 30, 12), 1.0, text="1999"),
        Detection("xtick_label", (500, 500, 30, 12), 1.0, text="1998"),
    ])
    ticks = associate_ticks(d, "x")
    assert [t for t, _ in ticks] == ["1996", "1997", "1998", "1999"]
    assert [p for _, p in ticks] == sorted(p for _, p in ticks)


def test_associate_ticks_numeric_positions_ascend_with_value():
    d = DetectionSet([
        Detection("ytick_label", (10, 100, 30, 12), 1.0, text="100"),
        Detection("ytick_label", (10, 300, 30, 12), 1.0, text="0"),
    ])
    ticks = associate_ticks(d, "y")
    parsed = [(parse_tick_value(t), p) for t, p in ticks]
    assert parsed == [(100.0, 106.0), (0.0, 306.0)]


def test_scientific_tick_text_parses():
    assert parse_tick_value("2.000e+5") == 200000.0
    assert parse_tick_value("200B") is None
    assert parse_tick_value("-2009") == -2009.0


def test_associate_ticks_needs_two():
    d = DetectionSet([Detection("ytick_label", (10, 100, 30, 12), 1.0, text="0")])
    with pytest.raises(ExtractionError):
        associate_ticks(d, "y")
    with pytest.raises(ValueError):
        associate_ticks(d, "z")


# -- bar association ----------------------------------------------------------

def test_sixteen_bars_get_distinct_cells():
    data = make_data(np.arange(1, 17).reshape(4, 4),
                     legends=["Brazil", "Iceland", "Thailand", "Lebanon"],
                     cats=["1996", "1997", "1998", "1999"])
    _, _, ann = rendered(data, "vbar")
    det = clean_detections(ann)
    legend_map = associate_legend(det)
    x_ticks = associate_ticks(det, "x")
    pairs = associate_bars(det, legend_map, x_ticks)
    assert len(pairs) == 16
    assert len(set(pairs)) == 16  # every (row, col) distinct


def test_single_series_bars_fall_back_to_unlabeled_column():
    data = make_data([[3.0, 5.0, 4.0]])
    _, _, ann = rendered(data, "vbar")
    det = clean_detections(ann)
    table = extract_table(det)
    assert table.col_headers == list(data.legend_labels)  # 1-entry legend
    # with the legend stripped, the value-axis label names the lone column
    stripped = DetectionSet(
        [d for d in det.detections if d.cls not in ("legend_label", "legend_preview")],
        style=det.style)
    table2 = extract_table(stripped)
    assert table2.col_headers == ["Price of diesel"]
    assert all(v is not None for row in table2.cells for v in row)


def test_corrupted_bar_color_leaves_cell_empty():
    data = make_data([[3.0, 5.0], [2.0, 4.0]])
    _, _, ann = rendered(data, "vbar")
    det = clean_detections(ann)
    bad = []
    flipped = 0
    for d in det.detections:
        if d.cls == "bar" and flipped == 0:
            bad.append(Detection("bar", d.bbox, d.score, d.text, color=72))
            flipped = 1
        else:
            bad.append(d)
    table = extract_table(DetectionSet(bad, style=det.style))
    empty = sum(1 for row in table.cells for v in row if v is None)
    assert empty == 1


# -- interpolation ------------------------------------------------------------

def test_interpolate_midpoint():
    ticks = [(0.0, 300.0), (100.0, 100.0)]
    assert interpolate_value((50, 200, 30, 100), ticks, "vertical") == pytest.approx(50.0)


def test_interpolate_exact_at_tick():
    ticks = [(0.0, 300.0), (50.0, 200.0), (100.0, 100.0)]
    assert interpolate_value((10, 200.0, 5, 100.0), ticks, "vertical") == 50.0
    assert interpolate_value((10, 100.0, 5, 200.0), ticks, "vertical") == 100.0


def test_interpolate_extrapolates_beyond_ticks():
    ticks = [(0.0, 300.0), (100.0, 100.0)]
    assert interpolate_value((10, 50.0, 5, 250.0), ticks, "vertical") == pytest.approx(125.0)


def test_interpolate_horizontal_uses_right_edge():
    ticks = [(0.0, 100.0), (10.0, 300.0)]
    assert interpolate_value((100.0, 50, 100.0, 20), ticks, "horizontal") == pytest.approx(5.0)


def test_interpolate_requires_two_ticks():
    with pytest.raises(ExtractionError):
        interpolate_value((0, 0, 1, 1), [(0.0, 300.0)], "vertical")


# -- full extraction ----------------------------------------------------------

def test_zero_noise_roundtrip_all_types(corpus):
    for seed in range(40):
        data = sample_plot_data(corpus, seed)
        for ptype in ("vbar", "hbar", "line", "dotline"):
            _, ann = render(make_spec(data, ptype))
            table = extract_table(perturb(ann, ZERO_NOISE))
            p, r, f1 = table_f1(table, ann.gold_table, 0.005)
            assert f1 == 1.0, (seed, ptype)


def test_dropped_point_leaves_one_empty_cell():
    data = make_data([[3.0, 5.0, 4.0], [2.0, 6.0, 1.0]])
    _, _, ann = rendered(data, "dotline")
    det = clean_detections(ann)
    kept = [d for d in det.detections if d.cls != "dotline"]
    points = [d for d in det.detections if d.cls == "dotline"]
    table = extract_table(DetectionSet(kept + points[1:], style=det.style))
    empty = [v for row in table.cells for v in row if v is None]
    assert len(empty) == 1
    gold = ann.gold_table
    for i, row in enumerate(table.cells):
        for j, v in enumerate(row):
            if v is not None:
                assert v == pytest.approx(gold.cells[i][j], rel=1e-6)


def test_corrupted_tick_text_becomes_row_header():
    data = make_data([[3.0, 5.0], [2.0, 4.0]], cats=["2008", "2009"])
    _, _, ann = rendered(data, "vbar")
    det = clean_detections(ann)
    mangled = [
        Detection(d.cls, d.bbox, d.score, "200B", d.color)
        if d.cls == "xtick_label" and d.text == "2008" else d
        for d in det.detections
    ]
    table = extract_table(DetectionSet(mangled, style=det.style))
    assert "200B" in table.row_headers


def test_extraction_permutation_invariant(corpus):
    data = sample_plot_data(corpus, 13)
    _, ann = render(make_plot_spec(data, 13))
    det = clean_detections(ann)
    base = extract_table(det).to_json()
    rng = random.Random(5)
    for _ in range(5):
        shuffled = list(det.detections)
        rng.shuffle(shuffled)
        assert extract_table(DetectionSet(shuffled, style=det.style)).to_json() == base


def test_empty_detections_give_empty_table():
    table = extract_table(DetectionSet([]))
    assert table.row_headers == []
    assert table.tuples() == []


# -- tuple F1 ------------------------------------------------------------------

def test_f1_equal_tables():
    t = SemiStructuredTable(["a", "b"], ["x"], [[1.0], [2.0]])
    assert table_f1(t, t, 0.0) == (1.0, 1.0, 1.0)


def test_f1_two_of_three_against_four():
    # oracle: P = 2/3, R = 2/4, F1 = 2PR/(P+R) = 4/7
    gold = SemiStructuredTable(["a", "b", "c", "d"], ["x"], [[1.0], [2.0], [3.0], [4.0]])
    pred = SemiStructuredTable(["a", "b", "z"], ["x"], [[1.0], [2.0], [9.0]])
    p, r, f1 = table_f1(pred, gold, 0.0)
    p_oracle, r_oracle = 2 / 3, 2 / 4
    f1_oracle = 2 * p_oracle * r_oracle / (p_oracle + r_oracle)
    assert (p, r) == (pytest.approx(p_oracle), pytest.approx(r_oracle))
    assert f1 == pytest.approx(f1_oracle) == pytest.approx(4 / 7)


def test_f1_symmetry_under_swap():
    gold = SemiStructuredTable(["a", "b", "c"], ["x"], [[1.0], [2.0], [3.0]])
    pred = SemiStructuredTable(["a", "b", "q"], ["x"], [[1.0], [5.0], [3.0]])
    p1, r1, f1 = table_f1(pred, gold, 0.0)
    p2, r2, f2 = table_f1(gold, pred, 0.0)
    assert (p1, r1) == (r2, p2)
    assert f1 == pytest.approx(f2)


def test_f1_relative_tolerance_boundary():
    gold = SemiStructuredTable(["a"], ["x"], [[100.0]])
    ok = SemiStructuredTable(["a"], ["x"], [[102.0]])
    bad = SemiStructuredTable(["a"], ["x"], [[102.1]])
    assert table_f1(ok, gold, 0.02)[2] == 1.0
    assert table_f1(bad, gold, 0.02)[2] == 0.0


def test_f1_gold_zero_requires_exact():
    gold = SemiStructuredTable(["a"], ["x"], [[0.0]])
    assert table_f1(SemiStructuredTable(["a"], ["x"], [[0.0]]), gold, 0.5)[2] == 1.0
    assert table_f1(SemiStructuredTable(["a"], ["x"], [[1e-9]]), gold, 0.5)[2] == 0.0


def test_f1_empty_tables():
    empty = SemiStructuredTable([], [], [])
    assert table_f1(empty, empty, 0.0) == (1.0, 1.0, 1.0)
    gold = SemiStructuredTable(["a"], ["x"], [[1.0]])
    assert table_f1(empty, gold, 0.0)[2] == 0.0


def test_table_csv_roundtrip():
    t = SemiStructuredTable(["2008", "2009"], ["Brazil", "Iceland"],
                            [[1.5, None], [2.25, 3.0]], row_label="Year")
    again = SemiStructuredTable.from_csv(t.to_csv())
    assert again.row_headers == t.row_headers
    assert again.col_headers == t.col_headers
    assert again.cells == t.cells
    assert again.row_label == "Year"


def test_misclassified_lone_bar_does_not_displace_line_points():
    # one line vertex misread as a bar must not flip extraction to bar mode
    data = make_data([[3.0, 5.0, 4.0], [2.0, 6.0, 1.0]])
    _, _, ann = rendered(data, "line")
    det = clean_detections(ann)
    flipped = False
    mangled = []
    for d in det.detections:
        if d.cls == "line" and not flipped:
            mangled.append(Detection("bar", d.bbox, d.score, d.text, d.color))
            flipped = True
        else:
            mangled.append(d)
    table = extract_table(DetectionSet(mangled, style=det.style))
    filled = sum(1 for row in table.cells for v in row if v is not None)
    assert filled >= 5  # the five real points still extract
