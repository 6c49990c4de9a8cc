"""Command-line orchestration: generate datasets, run the noisy pipeline,
extract single tables, re-score predictions, pretty-print reports.

Every command is reproducible from (config, seed): per-plot randomness is
derived from the top-level seed and the plot index, so plot order never
matters and a rerun with the same config writes byte-identical outputs.

Dataset layout under --out:
    plots/NNNN.svg         rendered plots
    annotations/NNNN.json  ground-truth element annotations
    tables/NNNN.csv        gold tables
    questions.jsonl        one question instance per line (with plot_id)
    manifest.json          config echo, split assignment, file hashes

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .corpus import CorpusError, default_corpus, load_corpus, sample_plot_data
from .detsim import NoiseModel, average_precision, get_preset, perturb_with_provenance
from .harness import EvalReport, SplitSpec, evaluate, score_answer, split
from .hybrid import answer_hybrid
from .plotgen import LayoutError, PlotAnnotation, make_plot_spec, render
from .qgen import DEFAULT_QUESTIONS_PER_PLOT, QuestionInstance, instantiate
from .sie import extract_table, table_f1
from .templates import default_matcher, default_templates

TABLE_F1_REL_TOL = 0.02
MAP_THRESHOLDS = (0.5, 0.75, 0.9)


class UsageError(ValueError):
    pass


class DataError(ValueError):
    pass


def stable_seed(master: int, *parts) -> int:
    """FNV-style stable derivation of per-plot seeds from the master seed."""
    h = 2166136261
    for b in f"{master}|" + "|".join(str(p) for p in parts):
        h ^= ord(b)
        h = (h * 16777619) & 0xFFFFFFFF
    return h


@dataclass(frozen=True)
class RunConfig:
    corpus: str | None
    n_plots: int
    seed: int
    noise: str
    split_ratios: tuple[float, float, float]
    out_dir: str
    questions_per_plot: int = DEFAULT_QUESTIONS_PER_PLOT
    category_weights: dict[str, float] | None = None

    def validate(self) -> None:
        if self.n_plots < 1:
            raise UsageError("--n-plots must be >= 1")
        if self.questions_per_plot < 1:
            raise UsageError("--questions-per-plot must be >= 1")


def _load_noise(spec: str) -> NoiseModel:
    if os.path.exists(spec):
        try:
            with open(spec, encoding="utf-8") as f:
                return NoiseModel.from_json(json.load(f))
        except (OSError, ValueError, KeyError) as e:
            raise DataError(f"bad noise model file {spec}: {e}")
    try:
        return get_preset(spec)
    except KeyError as e:
        raise UsageError(str(e))


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write(path: str, data: bytes, hashes: dict[str, str], root: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)
    hashes[os.path.relpath(path, root)] = _sha256(data)


# ---------------------------------------------------------------------------
# generate

def cmd_generate(config: RunConfig) -> int:
    config.validate()
    corpus = load_corpus(config.corpus) if config.corpus else default_corpus()
    if not corpus:
        raise DataError("corpus is empty")
    templates = default_templates()
    out = config.out_dir
    os.makedirs(out, exist_ok=True)

    hashes: dict[str, str] = {}
    question_lines: list[str] = []
    n_questions = 0
    for i in range(config.n_plots):
        data = sample_plot_data(corpus, stable_seed(config.seed, "data", i))
        spec = make_plot_spec(data, stable_seed(config.seed, "style", i))
        svg, annotation = render(spec)
        _write(os.path.join(out, "plots", f"{i:04d}.svg"), svg, hashes, out)
        _write(os.path.join(out, "annotations", f"{i:04d}.json"),
               annotation.dumps().encode(), hashes, out)
        _write(os.path.join(out, "tables", f"{i:04d}.csv"),
               annotation.gold_table.to_csv().encode(), hashes, out)
        questions = instantiate(
            data, spec, templates, stable_seed(config.seed, "questions", i),
            n_questions=config.questions_per_plot,
            category_weights=config.category_weights,
        )
        for q in questions:
            rec = q.to_json()
            rec["plot_id"] = i
            question_lines.append(json.dumps(rec))
        n_questions += len(questions)

    _write(os.path.join(out, "questions.jsonl"),
           ("\n".join(question_lines) + "\n").encode(), hashes, out)

    ids = list(range(config.n_plots))
    train, valid, test = split(ids, SplitSpec(config.split_ratios, seed=config.seed))
    manifest = {
        "version": __version__,
        "config": {
            "corpus": config.corpus,
            "n_plots": config.n_plots,
            "seed": config.seed,
            "split": list(config.split_ratios),
            "questions_per_plot": config.questions_per_plot,
            "category_weights": config.category_weights,
        },
        "splits": {"train": train, "valid": valid, "test": test},
        "n_questions": n_questions,
        "files": dict(sorted(hashes.items())),
    }
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
    print(f"wrote {config.n_plots} plots, {n_questions} questions to {out}")
    return 0


# ---------------------------------------------------------------------------
# run

def _load_dataset(dataset_dir: str) -> tuple[dict, list[tuple[QuestionInstance, int]]]:
    manifest_path = os.path.join(dataset_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise DataError(f"no manifest.json in {dataset_dir}")
    with open(manifest_path, encoding="utf-8") as f:
        manifest = json.load(f)
    questions_path = os.path.join(dataset_dir, "questions.jsonl")
    if not os.path.exists(questions_path):
        raise DataError(f"missing {questions_path}")
    questions = []
    with open(questions_path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            questions.append((QuestionInstance.from_json(obj), int(obj["plot_id"])))
    return manifest, questions


def _load_annotation(dataset_dir: str, plot_id: int) -> PlotAnnotation:
    path = os.path.join(dataset_dir, "annotations", f"{plot_id:04d}.json")
    if not os.path.exists(path):
        raise DataError(f"missing annotation {path}")
    with open(path, encoding="utf-8") as f:
        return PlotAnnotation.loads(f.read())


def cmd_run(dataset_dir: str, noise_spec: str, out_dir: str, run_split: str = "test",
            verdicts_csv: str | None = None) -> int:
    manifest, questions = _load_dataset(dataset_dir)
    if run_split not in manifest["splits"]:
        raise UsageError(f"unknown split {run_split!r}")
    wanted = set(manifest["splits"][run_split])
    noise = _load_noise(noise_spec)
    matcher = default_matcher()
    os.makedirs(out_dir, exist_ok=True)

    by_plot: dict[int, list[QuestionInstance]] = {}
    for q, pid in questions:
        if pid in wanted:
            by_plot.setdefault(pid, []).append(q)
    if not by_plot:
        raise DataError(f"no questions in split {run_split!r}")

    dets_per_plot = {}
    golds_per_plot = {}
    f1s = []
    ocr_pairs_pred, ocr_pairs_gold = [], []
    for pid in sorted(by_plot):
        annotation = _load_annotation(dataset_dir, pid)
        det, provenance = perturb_with_provenance(
            annotation, noise.with_seed(stable_seed(noise.seed, "plot", pid)))
        dets_per_plot[pid] = det
        golds_per_plot[pid] = annotation
        table = extract_table(det)
        f1s.append(table_f1(table, annotation.gold_table, TABLE_F1_REL_TOL)[2])
        for gold_el, d in provenance:
            if gold_el.text is None or d is None:
                continue
            ocr_pairs_gold.append((gold_el.cls, gold_el.text))
            ocr_pairs_pred.append((gold_el.cls, d.text or ""))

    plot_ids = sorted(by_plot)
    map_scores = {}
    for thr in MAP_THRESHOLDS:
        _, m = average_precision(
            [dets_per_plot[p] for p in plot_ids],
            [golds_per_plot[p] for p in plot_ids], thr)
        map_scores[str(thr)] = m

    from .detsim import ocr_accuracy as _ocr_acc
    ocr_total = _ocr_acc(ocr_pairs_pred, ocr_pairs_gold)["total"] if ocr_pairs_gold else None

    flat: list[tuple[QuestionInstance, int]] = [
        (q, pid) for pid in plot_ids for q in by_plot[pid]
    ]
    predictions = []
    answers = {}
    for q, pid in flat:
        try:
            pred = answer_hybrid(q.text, dets_per_plot[pid], matcher)
            pred_json = pred.to_json()
        except Exception as e:
            pred, pred_json = None, {"error": type(e).__name__}
        answers[id(q)] = pred
        rec = q.to_json()
        rec["plot_id"] = pid
        rec["prediction"] = pred_json
        rec["correct"] = score_answer(pred, q.gold_answer)
        predictions.append(rec)

    with open(os.path.join(out_dir, "predictions.jsonl"), "w", encoding="utf-8") as f:
        for rec in predictions:
            f.write(json.dumps(rec) + "\n")

    if verdicts_csv:
        import csv as _csv
        with open(verdicts_csv, "w", encoding="utf-8", newline="") as f:
            w = _csv.writer(f)
            w.writerow(["plot_id", "template_id", "category", "answer_type", "correct", "question"])
            for rec in predictions:
                w.writerow([rec["plot_id"], rec["template_id"], rec["category"],
                            rec["answer_type"], int(rec["correct"]), rec["text"]])

    report = evaluate(
        [q for q, _ in flat],
        lambda q: answers[id(q)],
        map_scores=map_scores,
        ocr_accuracy=ocr_total,
        mean_table_f1=sum(f1s) / len(f1s),
    )
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as f:
        f.write(report.dumps())
    with open(os.path.join(out_dir, "report.txt"), "w", encoding="utf-8") as f:
        f.write(report.render_text())
    print(report.render_text())
    return 0


# ---------------------------------------------------------------------------
# extract / evaluate / report

def cmd_extract(input_path: str, out_path: str | None) -> int:
    if not os.path.exists(input_path):
        raise DataError(f"no such file: {input_path}")
    with open(input_path, encoding="utf-8") as f:
        obj = json.load(f)
    if "elements" in obj:
        from .hybrid import _as_detections
        det = _as_detections(PlotAnnotation.from_json(obj))
    elif "detections" in obj:
        from .detsim import DetectionSet
        det = DetectionSet.from_json(obj)
    else:
        raise DataError("input is neither an annotation nor a detection set")
    if not det.detections:
        print("warning: empty detection set", file=sys.stderr)
    csv_text = extract_table(det).to_csv()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_evaluate(predictions_path: str, out_path: str | None) -> int:
    from .answers import Answer
    if not os.path.exists(predictions_path):
        raise DataError(f"no such file: {predictions_path}")
    questions, preds = [], []
    with open(predictions_path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            questions.append(QuestionInstance.from_json(obj))
            p = obj.get("prediction")
            preds.append(Answer.from_json(p) if p and "kind" in p else None)
    if not questions:
        raise DataError("empty predictions file")
    lookup = {id(q): p for q, p in zip(questions, preds)}
    report = evaluate(questions, lambda q: lookup[id(q)])
    text_out = report.render_text()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(report.dumps())
    print(text_out)
    return 0


def cmd_report(report_path: str) -> int:
    if not os.path.exists(report_path):
        raise DataError(f"no such file: {report_path}")
    with open(report_path, encoding="utf-8") as f:
        report = EvalReport.from_json(json.load(f))
    print(report.render_text())
    return 0


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        raise UsageError(message)


def _split_ratios(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--split needs 3 comma-separated ratios, got {text!r}")
    try:
        ratios = tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--split ratios are not numbers: {text!r}")
    try:
        SplitSpec(ratios)
    except ValueError as e:
        raise UsageError(str(e))
    return ratios


def build_parser() -> _Parser:
    p = _Parser(prog="plotquest", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="synthesize a dataset")
    g.add_argument("--corpus", default=None, help="indicator corpus file (default: bundled)")
    g.add_argument("--n-plots", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--split", type=_split_ratios, default=(0.70, 0.15, 0.15))
    g.add_argument("--questions-per-plot", type=int, default=DEFAULT_QUESTIONS_PER_PLOT)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="run the noisy pipeline over a dataset split")
    r.add_argument("--dataset", required=True)
    r.add_argument("--noise", default="zero", help="preset name or NoiseModel JSON file")
    r.add_argument("--run-split", default="test", choices=["train", "valid", "test"])
    r.add_argument("--verdicts-csv", default=None, help="also write per-question verdicts CSV")
    r.add_argument("--out", required=True)

    e = sub.add_parser("extract", help="extract a table CSV from one annotation/detection file")
    e.add_argument("--input", required=True)
    e.add_argument("--out", default=None)

    v = sub.add_parser("evaluate", help="re-score a predictions file")
    v.add_argument("--predictions", required=True)
    v.add_argument("--out", default=None)

    s = sub.add_parser("report", help="pretty-print a report JSON")
    s.add_argument("--report", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "generate":
            config = RunConfig(
                corpus=args.corpus,
                n_plots=args.n_plots,
                seed=args.seed,
                noise="zero",
                split_ratios=args.split,
                out_dir=args.out,
                questions_per_plot=args.questions_per_plot,
            )
            return cmd_generate(config)
        if args.command == "run":
            return cmd_run(args.dataset, args.noise, args.out, args.run_split,
                           verdicts_csv=args.verdicts_csv)
        if args.command == "extract":
            return cmd_extract(args.input, args.out)
        if args.command == "evaluate":
            return cmd_evaluate(args.predictions, args.out)
        if args.command == "report":
            return cmd_report(args.report)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (DataError, CorpusError, LayoutError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
