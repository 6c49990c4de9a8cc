"""
Hybrid question answering, end to end
=====================================

Route each question to the right branch, answer it from noisy detections,
and score the whole thing with the 5%-tolerance metric broken down over the
question-category x answer-type grid. The hybrid beats either branch alone
because they fail on complementary question families.
"""

import plotquest as pq
from plotquest.cli import stable_seed
from plotquest.hybrid import answer_hybrid, answer_pipeline_only, answer_structural_only
from plotquest.templates import default_matcher

matcher = default_matcher()

print("routing examples:")
for q in ("How many legend labels are there?",
          "Does the graph contain grids?",
          "What is the ratio of the price of diesel in Lebanon in 2010 to that in 2014?"):
    r = pq.route(q, matcher)
    print(f"  {r.branch:<22} <- {q}")

# build a small evaluation batch under calibrated noise
corpus = pq.default_corpus()
templates = pq.default_templates()
questions, det_of = [], {}
for i in range(80):
    data = pq.sample_plot_data(corpus, stable_seed(1, "data", i))
    spec = pq.make_plot_spec(data, stable_seed(1, "style", i))
    _, ann = pq.render(spec)
    det = pq.perturb(ann, pq.PAPER_LIKE.with_seed(stable_seed(1, "noise", i)))
    for q in pq.instantiate(data, spec, templates, stable_seed(1, "q", i)):
        questions.append(q)
        det_of[id(q)] = det

for name, fn in (("hybrid", answer_hybrid),
                 ("pipeline only", answer_pipeline_only),
                 ("structural only", answer_structural_only)):
    report = pq.evaluate(questions, lambda q: fn(q.text, det_of[id(q)], matcher))
    print(f"\n=== {name}: {100 * report.overall_accuracy:.1f}% overall")
    if name == "hybrid":
        print(report.render_text())
