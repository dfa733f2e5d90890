"""Command-line driver for the MCQ pipeline.

One subcommand per stage: ingest, stats, generate-questions,
generate-distractors, qa-filter, evaluate, humaneval-plan, serve,
humaneval-stats. Stages communicate through JSONL files under the
output directory, written with sorted keys so identical inputs and
seed produce byte-identical outputs.

Per-item generation seeds are derived by hashing (global seed, role,
item id), which makes outputs independent of item order and lets a
partial run be resumed without shifting every later item's stream.
"""

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import replace

from mcqforge import config as config_mod
from mcqforge import corpus, decoding, humaneval, metrics, qafilter, service
from mcqforge.backends import BACKEND_KINDS
from mcqforge.errors import (
    ConfigError,
    GenerationError,
    MaxRetriesExceeded,
    McqForgeError,
    ValidationError,
)
from mcqforge.store import RatingStore
from mcqforge.tokenizer import Tokenizer

logger = logging.getLogger(__name__)

SQUAD_ITEMS = "squad_items.jsonl"
ITEMS = "items.jsonl"
QUESTIONS = "questions.jsonl"
MCQS = "mcqs.jsonl"
VERDICTS = "verdicts.jsonl"
ACCURACY = "accuracy.json"
REPORT = "report.json"
PLAN = "plan.json"
RATINGS = "ratings.jsonl"
HUMANEVAL_STATS = "humaneval_stats.json"
STATS = "stats.json"


def _item_seed(seed: int, role: str, item_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{role}:{item_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _load(args) -> config_mod.PipelineConfig:
    cfg = config_mod.load_config(args.config)
    if args.seed is not None:
        cfg.generation = replace(cfg.generation, seed=args.seed)
        cfg.humaneval = replace(cfg.humaneval, seed=args.seed)
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def _out_path(cfg, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _tokenizer(cfg) -> Tokenizer:
    if not cfg.vocab_path or not cfg.merges_path:
        raise ConfigError(
            "this stage needs a tokenizer: set 'vocab' and 'merges' in the config file"
        )
    return Tokenizer.from_files(cfg.vocab_path, cfg.merges_path)


def _backend_config(cfg, args, role: str):
    backend_cfg = cfg.backend_for(role)
    if args.backend is not None and args.backend != backend_cfg.kind:
        backend_cfg = replace(backend_cfg, kind=args.backend)
    return backend_cfg


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, ensure_ascii=False, indent=2)
        fh.write("\n")


def _read_verdicts(path: str) -> dict[str, bool]:
    verdicts = {}
    for record in corpus.read_jsonl(path):
        if "id" not in record or "accepted" not in record:
            raise ValidationError(f"{path}: verdict record needs 'id' and 'accepted'")
        verdicts[str(record["id"])] = bool(record["accepted"])
    return verdicts


# ---------------------------------------------------------------------------
# Stages


def cmd_ingest(args, cfg) -> int:
    if args.format == "squad":
        items = corpus.ingest_squad(args.input)
        path = _out_path(cfg, SQUAD_ITEMS)
        corpus.write_jsonl([i.as_dict() for i in items], path)
    else:
        items = corpus.ingest_race(args.input, split=args.split)
        path = _out_path(cfg, ITEMS)
        corpus.write_jsonl([i.as_dict() for i in items], path)
    print(f"ingested {len(items)} items from {args.input} -> {path}")
    return 0


def cmd_stats(args, cfg) -> int:
    items = corpus.read_items_jsonl(args.input)
    overall = corpus.corpus_stats(items)
    by_split = {}
    for split in sorted({i.split for i in items}):
        by_split[split] = corpus.corpus_stats([i for i in items if i.split == split]).as_dict()
    payload = {"overall": overall.as_dict(), "by_split": by_split}
    _write_json(payload, _out_path(cfg, STATS))
    print(f"items: {overall.item_count}")
    print(f"distractor words: mean {overall.distractor_word_mean:.1f} "
          f"sd {overall.distractor_word_std:.1f}")
    for split, stats in by_split.items():
        print(f"  {split}: {stats['item_count']} items")
    return 0


def cmd_generate_questions(args, cfg) -> int:
    tok = _tokenizer(cfg)
    backend = config_mod.build_generator(_backend_config(cfg, args, "qg"),
                                         tok.vocab_size, tok.end_id)
    records = corpus.read_jsonl(args.input)
    out, failures = [], 0
    for record in records:
        for key in ("id", "context", "answer"):
            if key not in record:
                raise ValidationError(f"{args.input}: record needs field {key!r}")
        gen_cfg = replace(cfg.generation,
                          seed=_item_seed(cfg.generation.seed, "qg", record["id"]))
        try:
            question = decoding.generate_question(
                backend, tok, record["context"], record["answer"], gen_cfg)
        except GenerationError as e:
            logger.warning("question generation failed for %s: %s", record["id"], e)
            failures += 1
            continue
        row = {"id": record["id"], "context": record["context"],
               "answer": record["answer"], "question": question}
        if "split" in record:
            row["split"] = record["split"]
        out.append(row)
    path = _out_path(cfg, QUESTIONS)
    corpus.write_jsonl(out, path)
    print(f"generated {len(out)} questions ({failures} failures) -> {path}")
    return 0 if out else 1


def cmd_generate_distractors(args, cfg) -> int:
    tok = _tokenizer(cfg)
    backend = config_mod.build_generator(_backend_config(cfg, args, "dg"),
                                         tok.vocab_size, tok.end_id)
    records = corpus.read_jsonl(args.input)
    items, failures = [], 0
    for record in records:
        for key in ("id", "context", "question", "answer"):
            if key not in record:
                raise ValidationError(f"{args.input}: record needs field {key!r}")
        gen_cfg = replace(cfg.generation,
                          seed=_item_seed(cfg.generation.seed, "dg", record["id"]))
        try:
            result = decoding.generate_distractors(
                backend, tok, record["context"], record["question"],
                record["answer"], gen_cfg)
        except MaxRetriesExceeded as e:
            logger.warning("distractors incomplete for %s: %s", record["id"], e)
            failures += 1
            continue
        items.append(corpus.McqItem(
            id=record["id"],
            context=record["context"],
            question=record["question"],
            answer=record["answer"],
            distractors=result.distractors,
            source="generated",
            split=record.get("split", "test"),
        ))
    path = _out_path(cfg, MCQS)
    corpus.write_items_jsonl(items, path)
    print(f"generated distractors for {len(items)} items ({failures} failures) -> {path}")
    return 0 if items else 1


def cmd_qa_filter(args, cfg) -> int:
    tok = _tokenizer(cfg)
    scorer = config_mod.build_scorer(_backend_config(cfg, args, "qa"))
    items = corpus.read_items_jsonl(args.input)
    if not items:
        raise ValidationError(f"{args.input}: no items to filter")
    shuffle_seed = cfg.generation.seed
    verdicts = [qafilter.filter_item(scorer, tok, item, shuffle_seed) for item in items]
    verdicts_path = _out_path(cfg, VERDICTS)
    corpus.write_jsonl([v.as_dict() for v in verdicts], verdicts_path)

    rows = {"all": qafilter.accuracy_of_verdicts(verdicts)}
    by_id = {v.item_id: v for v in verdicts}
    for source in sorted({i.source for i in items}):
        group = [by_id[i.id] for i in items if i.source == source]
        rows[f"source={source}"] = qafilter.accuracy_of_verdicts(group)
    payload = {
        "accuracy": rows["all"],
        "n_items": len(items),
        "n_accepted": sum(v.accepted for v in verdicts),
        "by_set": rows,
    }
    _write_json(payload, _out_path(cfg, ACCURACY))
    print(qafilter.render_accuracy_table(rows))
    print(f"verdicts -> {verdicts_path}")
    return 0


def cmd_evaluate(args, cfg) -> int:
    generated = {i.id: i for i in corpus.read_items_jsonl(args.generated)}
    reference = {i.id: i for i in corpus.read_items_jsonl(args.reference)}
    shared = sorted(set(generated) & set(reference))
    if not shared:
        raise ValidationError("no item ids shared between generated and reference files")
    reports = [
        metrics.evaluate_distractors(list(generated[i].distractors),
                                     list(reference[i].distractors))
        for i in shared
    ]
    total = metrics.aggregate_reports(reports)
    payload = {
        "n_items": len(shared),
        "per_slot": [s.as_dict() for s in total.per_slot],
        "averaged": total.averaged.as_dict(),
    }
    _write_json(payload, _out_path(cfg, REPORT))
    rows = {f"Distractor {i + 1}": slot for i, slot in enumerate(total.per_slot)}
    rows["Average"] = total.averaged
    print(metrics.render_report_table(rows))
    print(f"evaluated {len(shared)} items -> {_out_path(cfg, REPORT)}")
    return 0


def cmd_humaneval_plan(args, cfg) -> int:
    verdicts = _read_verdicts(args.verdicts)
    items = corpus.read_items_jsonl(args.items)
    missing = [i.id for i in items if i.id not in verdicts]
    if missing:
        raise ValidationError(f"items without verdicts: {missing[:5]}")
    accepted = [i.id for i in items if verdicts[i.id]]
    rejected = [i.id for i in items if not verdicts[i.id]]
    he = cfg.humaneval
    n_assessors = args.assessors if args.assessors is not None else he.n_assessors
    shared_n = args.shared if args.shared is not None else he.shared_n
    unique_n = args.unique if args.unique is not None else he.unique_n
    plan = humaneval.build_assignment(
        accepted, rejected, n_assessors=n_assessors,
        shared_n=shared_n, unique_n=unique_n, seed=he.seed)
    path = _out_path(cfg, PLAN)
    _write_json(plan.as_dict(), path)
    print(f"plan: {plan.n_items} items, {plan.n_tasks} rating tasks, "
          f"{len(plan.accepted_ids)} accepted / {len(plan.rejected_ids)} rejected -> {path}")
    return 0


def _service_app(args, cfg):
    plan = humaneval.AssignmentPlan.from_dict(
        json.load(open(args.plan, encoding="utf-8")))
    items = {i.id: i for i in corpus.read_items_jsonl(args.items)}
    verdicts = _read_verdicts(args.verdicts)
    ratings_path = args.ratings or _out_path(cfg, RATINGS)
    store = RatingStore(ratings_path)
    app = service.create_app(plan, items, verdicts, store,
                             show_context=args.show_context,
                             frontend_dir=args.frontend)
    return app, store, plan, verdicts


def cmd_serve(args, cfg) -> int:
    import uvicorn

    app, store, plan, _ = _service_app(args, cfg)
    print(f"serving {plan.n_tasks} rating tasks for {len(plan.assessors)} assessors "
          f"on http://{args.host}:{args.port} ({len(store)} ratings on disk)")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_humaneval_stats(args, cfg) -> int:
    plan = humaneval.AssignmentPlan.from_dict(
        json.load(open(args.plan, encoding="utf-8")))
    verdicts = _read_verdicts(args.verdicts)
    records = humaneval.read_ratings_jsonl(args.ratings)
    stats = service.compute_stats(records, plan, verdicts)
    path = _out_path(cfg, HUMANEVAL_STATS)
    _write_json(stats, path)

    for q in ("q1", "q2"):
        block = stats["kappa"][q]
        if block["status"] == "ok":
            print(f"{q} kappa: {block['kappa']:.3f} "
                  f"({block['complete_items']} fully rated shared items)")
        else:
            print(f"{q} kappa: {block['status']}")
    for q in ("q1", "q2"):
        block = stats["chi_squared"][q]
        if block["status"] == "ok":
            print(f"{q} chi-squared: {block['statistic']:.3f} "
                  f"df={block['df']} p={block['p_value']:.3f}")
        else:
            print(f"{q} chi-squared: {block['status']}")
    print(humaneval.render_rating_table(stats["aggregate"]))
    if args.csv:
        humaneval.write_ratings_csv(records, verdicts, args.csv)
        print(f"ratings csv -> {args.csv}")
    print(f"stats -> {path}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help="config file (default: $MCQFORGE_CONFIG)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the configured seed")
    common.add_argument("--backend", choices=BACKEND_KINDS, default=None,
                        help="override the configured backend kind")
    common.add_argument("--out", default=None, help="output directory")

    parser = argparse.ArgumentParser(prog="mcqforge",
                                     description="MCQ generation pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse a raw dataset to JSONL")
    p.add_argument("--format", choices=("squad", "race"), required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--split", default="train", choices=corpus.SPLITS)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("generate-questions", parents=[common],
                       help="generate a question per context/answer pair")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_generate_questions)

    p = sub.add_parser("generate-distractors", parents=[common],
                       help="generate three distractors per question")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_generate_distractors)

    p = sub.add_parser("qa-filter", parents=[common],
                       help="filter items through the answering model")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_qa_filter)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score generated distractors against references")
    p.add_argument("--generated", required=True)
    p.add_argument("--reference", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("humaneval-plan", parents=[common],
                       help="assign items to assessors")
    p.add_argument("--items", required=True)
    p.add_argument("--verdicts", required=True)
    p.add_argument("--assessors", type=int, default=None)
    p.add_argument("--shared", type=int, default=None)
    p.add_argument("--unique", type=int, default=None)
    p.set_defaults(func=cmd_humaneval_plan)

    p = sub.add_parser("serve", parents=[common], help="run the rating service")
    p.add_argument("--plan", required=True)
    p.add_argument("--items", required=True)
    p.add_argument("--verdicts", required=True)
    p.add_argument("--ratings", default=None, help="rating log path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--show-context", action="store_true",
                   help="show the context passage to assessors")
    p.add_argument("--frontend", default=None,
                   help="directory of static UI files to serve at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("humaneval-stats", parents=[common],
                       help="kappa, chi-squared, and the rating table")
    p.add_argument("--plan", required=True)
    p.add_argument("--ratings", required=True)
    p.add_argument("--verdicts", required=True)
    p.add_argument("--csv", default=None, help="also export ratings as CSV")
    p.set_defaults(func=cmd_humaneval_stats)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        return args.func(args, cfg)
    except McqForgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
