import numpy as np
import pytest

from plotquest.answers import AnswerUnavailable
from plotquest.corpus import sample_plot_data
from plotquest.detsim import PAPER_LIKE, ZERO_NOISE, Detection, DetectionSet, perturb
from plotquest.hybrid import (
    CLASSIFICATION_BRANCH, PIPELINE_BRANCH, answer_hybrid, answer_structural,
    route,
)
from plotquest.plotgen import make_plot_spec, render
from plotquest.qgen import instantiate_all

from conftest import clean_detections, make_data, make_spec, rendered


def test_route_fixtures(matcher):
    assert route("How many legend labels are there?", matcher).branch == CLASSIFICATION_BRANCH
    assert route("What is the ratio of the price of diesel in Lebanon in 2010 to that in 2014?",
                 matcher).branch == PIPELINE_BRANCH
    assert route("Does the graph contain grids?", matcher).branch == CLASSIFICATION_BRANCH
    assert route("this is not a question the grammar knows", matcher).branch == PIPELINE_BRANCH


def test_route_partitions_every_template(corpus, templates, matcher):
    # each question lands on exactly one branch, decided by text alone
    for seed in range(10):
        data = sample_plot_data(corpus, seed)
        spec = make_spec(data, ("vbar", "hbar", "line", "dotline")[seed % 4])
        for q in instantiate_all(data, spec, templates, seed):
            r1, r2 = route(q.text, matcher), route(q.text, matcher)
            assert r1 == r2
            assert r1.branch in (CLASSIFICATION_BRANCH, PIPELINE_BRANCH)
            if q.category == "structural" or q.answer_type == "yes_no":
                assert r1.branch == CLASSIFICATION_BRANCH


def test_structural_bars_on_second_tick_from_top(matcher):
    data = make_data([[3, 4], [5, 6]], legends=["Indoor", "Outdoor"])
    _, _, ann = rendered(data, "hbar")
    got = answer_structural("How many bars are there on the 2nd tick from the top?", ann, matcher)
    assert got.value == 2


def test_structural_legend_stacking_horizontal(matcher):
    data = make_data([[1, 2], [3, 4]])
    _, _, ann = rendered(data, "vbar", legend_position="bottom-centre")
    got = answer_structural("How are the legend labels stacked?", ann, matcher)
    assert got.value == "horizontal"
    _, _, ann2 = rendered(data, "vbar", legend_position="center-right")
    assert answer_structural("How are the legend labels stacked?", ann2, matcher).value == "vertical"


def test_structural_parallel_lines_never_intersect(matcher):
    data = make_data([[2.0, 2.0, 2.0], [5.0, 5.0, 5.0]])
    _, _, ann = rendered(data, "line")
    got = answer_structural("How many lines intersect with each other?", ann, matcher)
    assert got.value == 0


def test_structural_crossing_lines_counted(matcher):
    data = make_data([[1.0, 6.0], [6.0, 1.0]])
    _, _, ann = rendered(data, "line")
    got = answer_structural("How many lines intersect with each other?", ann, matcher)
    assert got.value == 1


def test_structural_missing_elements_unavailable(matcher):
    det = DetectionSet([Detection("bar", (10, 10, 5, 5), 1.0, color=0)])
    with pytest.raises(AnswerUnavailable):
        answer_structural("What is the title of the graph?", det, matcher)
    with pytest.raises(AnswerUnavailable):
        answer_structural("How many legend labels are there?", det, matcher)


def test_structural_works_on_detections_and_annotations(corpus, matcher):
    data = sample_plot_data(corpus, 3)
    _, ann = render(make_plot_spec(data, 3))
    det = clean_detections(ann)
    q = "Where does the legend appear in the graph?"
    assert answer_structural(q, ann, matcher).value == answer_structural(q, det, matcher).value


def test_count_answers_survive_jitter(matcher):
    # pure-count questions do not depend on box accuracy, only presence
    from plotquest.detsim import NoiseModel
    data = make_data([[3, 4, 5], [5, 6, 7]])
    _, _, ann = rendered(data, "vbar")
    noisy = perturb(ann, NoiseModel(box_jitter_sigma=2.5, seed=11))
    got = answer_hybrid("How many bars are there?", noisy, matcher)
    assert got.value == 6


def test_hybrid_zero_noise_equals_gold(corpus, templates, matcher):
    from plotquest.harness import score_answer
    for seed in range(12):
        data = sample_plot_data(corpus, seed)
        spec = make_plot_spec(data, seed)
        _, ann = render(spec)
        det = clean_detections(ann)
        for q in instantiate_all(data, spec, templates, seed):
            got = answer_hybrid(q.text, det, matcher)
            assert score_answer(got, q.gold_answer), (seed, q.text, got, q.gold_answer)


def test_hybrid_never_panics_under_heavy_noise(corpus, templates, matcher):
    from plotquest.detsim import NoiseModel
    brutal = NoiseModel(box_jitter_sigma=6.0, drop_prob=0.35, misclass_prob=0.2,
                        ocr_char_sub_prob=0.4, ocr_truncate_prob=0.4,
                        ocr_sign_digit_prob=0.4, seed=5)
    for seed in range(8):
        data = sample_plot_data(corpus, seed)
        spec = make_plot_spec(data, seed)
        _, ann = render(spec)
        det = perturb(ann, brutal.with_seed(seed))
        for q in instantiate_all(data, spec, templates, seed):
            try:
                answer_hybrid(q.text, det, matcher)
            except AnswerUnavailable:
                pass  # the only acceptable failure mode


def test_hybrid_strictly_dominates_single_branches_at_zero_noise(corpus, templates, matcher):
    from plotquest.answers import UnparseableQuestion
    from plotquest.harness import evaluate
    from plotquest.hybrid import answer_pipeline_only, answer_structural_only
    questions, dets = [], {}
    for seed in range(15):
        data = sample_plot_data(corpus, seed)
        spec = make_plot_spec(data, seed)
        _, ann = render(spec)
        det = clean_detections(ann)
        for q in instantiate_all(data, spec, templates, seed):
            questions.append(q)
            dets[id(q)] = det

    def run(fn):
        def system(q):
            try:
                return fn(q.text, dets[id(q)], matcher)
            except UnparseableQuestion:
                return None
        return evaluate(questions, system).overall_accuracy

    hybrid = run(answer_hybrid)
    pipeline = run(answer_pipeline_only)
    structural = run(answer_structural_only)
    assert hybrid == 1.0
    # each single branch fails on the other branch's questions
    assert pipeline < hybrid
    assert structural < hybrid


def test_unparseable_question_fails_loudly_via_pipeline(corpus, matcher):
    from plotquest.answers import UnparseableQuestion
    data = sample_plot_data(corpus, 0)
    _, ann = render(make_plot_spec(data, 0))
    with pytest.raises(UnparseableQuestion):
        answer_hybrid("what is the airspeed of an unladen swallow?", ann, matcher)
