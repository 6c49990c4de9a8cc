"""plotquest: synthetic annotated plots, template question answering, and a
perception-to-reasoning pipeline with controllable noise and evaluation
metrics.

The pieces compose left to right:

    corpus -> plotgen -> (detsim) -> sie -> tableqa
                 \\         |                  /
                  qgen     +---- hybrid -----+
                     \\          |
                      +------ harness

corpus samples realistic data series; plotgen renders them to SVG with
exact element annotations; qgen instantiates the 74-template question
grammar with gold answers; detsim perturbs annotations into noisy
detections and scores them (AP/mAP, OCR accuracy); sie reconstructs the
table geometrically and scores it (tuple F1); tableqa answers questions
over the table's knowledge graph; hybrid routes each question to the
structural or the table branch; harness computes the 5%-tolerance accuracy
and the 3x3 report grid.
"""

__version__ = "0.1.0"

from .answers import Answer, AnswerUnavailable, UnparseableQuestion
from .corpus import (
    IndicatorVariable, PlotData, default_corpus, load_corpus, sample_plot_data,
)
from .detsim import (
    Detection, DetectionSet, NoiseModel, PAPER_LIKE, ZERO_NOISE,
    average_precision, corrupt_text, get_preset, iou, ocr_accuracy, perturb,
)
from .harness import EvalReport, SplitSpec, evaluate, score_answer, split
from .hybrid import Route, answer_hybrid, answer_structural, route
from .plotgen import (
    PlotAnnotation, PlotSpec, StyleParams, VisualElement, LayoutError,
    make_plot_spec, render, validate_annotation,
)
from .qgen import QuestionInstance, gold_answer, instantiate, instantiate_all, paraphrase
from .sie import (
    associate_bars, associate_legend, associate_ticks, extract_table,
    interpolate_value, table_f1,
)
from .table import ExtractionTuple, SemiStructuredTable
from .tableqa import KnowledgeGraph, ParsedQuestion, answer, build_kg, execute, parse, to_sexpr
from .templates import Template, default_templates, load_templates

__all__ = [
    "Answer", "AnswerUnavailable", "UnparseableQuestion",
    "IndicatorVariable", "PlotData", "default_corpus", "load_corpus", "sample_plot_data",
    "Detection", "DetectionSet", "NoiseModel", "PAPER_LIKE", "ZERO_NOISE",
    "average_precision", "corrupt_text", "get_preset", "iou", "ocr_accuracy", "perturb",
    "EvalReport", "SplitSpec", "evaluate", "score_answer", "split",
    "Route", "answer_hybrid", "answer_structural", "route",
    "PlotAnnotation", "PlotSpec", "StyleParams", "VisualElement", "LayoutError",
    "make_plot_spec", "render", "validate_annotation",
    "QuestionInstance", "gold_answer", "instantiate", "instantiate_all", "paraphrase",
    "associate_bars", "associate_legend", "associate_ticks", "extract_table",
    "interpolate_value", "table_f1",
    "ExtractionTuple", "SemiStructuredTable",
    "KnowledgeGraph", "ParsedQuestion", "answer", "build_kg", "execute", "parse", "to_sexpr",
    "Template", "default_templates", "load_templates",
]
