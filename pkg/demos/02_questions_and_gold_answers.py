"""
Template questions with gold answers
====================================

Instantiate the 74-template question grammar over one plot. Every question
carries its category, answer type, slot bindings and a gold answer computed
directly from the data. The same grammar parses questions back, so
generation and parsing can never drift apart.
"""

import plotquest as pq
from plotquest import tableqa

corpus = pq.default_corpus()
data = pq.sample_plot_data(corpus, seed=11)
spec = pq.make_plot_spec(data, seed=2)
templates = pq.default_templates()

questions = pq.instantiate(data, spec, templates, seed=5, n_questions=10)
for q in questions:
    print(f"[{q.category}/{q.answer_type}] {q.text}")
    print(f"    gold: {q.gold_answer.rendered()}")

# every generated question re-parses to its own template and bindings
q = questions[0]
parsed = tableqa.parse(q.text)
assert (parsed.template_id, parsed.bindings) == (q.template_id, q.bindings)
print("\nround trip ok:", q.template_id, "->", tableqa.to_sexpr(parsed.logical_form))

# surface phrasing can be adjusted with a substitution lexicon
lexicon = {"race of the students(%) of Asian": "percentage of Asian students"}
text = pq.paraphrase(
    "In how many cities, is the {y_label} greater than the average {y_label} "
    "taken over all cities?",
    {"y_label": "race of the students(%) of Asian"},
    lexicon,
)
print("\nparaphrased:", text)
