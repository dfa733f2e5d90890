"""Deterministic fixtures for tests and local demos.

The tiny vocabulary covers all 256 byte units plus a handful of common
English merges, so any UTF-8 text round-trips while merge behaviour is
still exercised. ``python -m mcqforge.testkit --port N`` serves the
12-item rating fixture over the real HTTP service, which is what the
browser UI's integration tests run against.
"""

import json
import os

from mcqforge.corpus import McqItem
from mcqforge.humaneval import build_assignment
from mcqforge.tokenizer import SpecialTokens, Tokenizer, byte_to_unit

_MERGES: list[tuple[str, str]] = [
    ("t", "h"),
    ("th", "e"),
    ("Ġ", "t"),
    ("Ġt", "h"),
    ("Ġth", "e"),
    ("i", "n"),
    ("o", "n"),
    ("e", "r"),
    ("a", "n"),
    ("an", "d"),
    ("c", "a"),
    ("ca", "t"),
    ("Ġ", "a"),
    ("Ġ", "s"),
    ("Ġ", "w"),
]


def tiny_vocab() -> tuple[dict[str, int], list[tuple[str, str]]]:
    units = byte_to_unit()
    vocab = {units[b]: b for b in range(256)}
    next_id = 256
    for first, second in _MERGES:
        vocab[first + second] = next_id
        next_id += 1
    return vocab, list(_MERGES)


def make_tokenizer() -> Tokenizer:
    vocab, merges = tiny_vocab()
    return Tokenizer(vocab, merges, SpecialTokens())


def write_tiny_vocab(directory) -> tuple[str, str]:
    """Write vocab.json + merges.txt; returns the two paths."""
    vocab, merges = tiny_vocab()
    os.makedirs(directory, exist_ok=True)
    vocab_path = os.path.join(str(directory), "vocab.json")
    merges_path = os.path.join(str(directory), "merges.txt")
    with open(vocab_path, "w", encoding="utf-8") as fh:
        json.dump(vocab, fh, ensure_ascii=False)
    with open(merges_path, "w", encoding="utf-8") as fh:
        fh.write("#version: tiny\n")
        for first, second in merges:
            fh.write(f"{first} {second}\n")
    return vocab_path, merges_path


# ---------------------------------------------------------------------------
# Dataset-shaped fixtures


def squad_fixture(path, n_questions: int = 6) -> str:
    """SQuAD-shaped JSON file with one impossible question included."""
    qas = []
    for i in range(n_questions):
        qas.append({
            "id": f"sq-{i:04d}",
            "question": f"what did item {i} do",
            "is_impossible": False,
            "answers": [{"text": f"thing {i}", "answer_start": 0}],
        })
    qas.append({
        "id": "sq-impossible",
        "question": "what is missing",
        "is_impossible": True,
        "answers": [],
    })
    paragraphs = [{
        "context": "the cat sat on the mat and " + " and ".join(
            f"thing {i}" for i in range(n_questions)),
        "qas": qas,
    }]
    payload = {"version": "v2.0", "data": [{"title": "fixture", "paragraphs": paragraphs}]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)
    return str(path)


def race_fixture(directory, n_articles: int = 3, per_article: int = 2) -> str:
    """RACE-shaped directory tree: <dir>/high/<k>.txt, one JSON per file."""
    base = os.path.join(str(directory), "high")
    os.makedirs(base, exist_ok=True)
    for a in range(n_articles):
        questions, options, answers = [], [], []
        for q in range(per_article):
            questions.append(f"question {a}-{q} about the story")
            options.append([
                f"right answer {a}-{q}",
                f"wrong one {a}-{q}",
                f"wrong two {a}-{q}",
                f"wrong three {a}-{q}",
            ])
            answers.append("A")
        payload = {
            "article": f"story {a}: the cat sat on the mat and watched the rain",
            "questions": questions,
            "options": options,
            "answers": answers,
            "id": f"high{a}.txt",
        }
        with open(os.path.join(base, f"{a}.txt"), "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
    return str(directory)


def pipeline_records(n: int = 20) -> list[dict]:
    """Context/answer records shaped like question-generation input."""
    rows = []
    for i in range(n):
        rows.append({
            "id": f"gen-{i:04d}",
            "context": f"the cat {i} sat on the mat and watched the rain in the garden",
            "answer": f"the mat {i}",
            "split": "test",
        })
    return rows


def mcq_items(n: int = 12, source: str = "generated") -> list[McqItem]:
    items = []
    for i in range(n):
        items.append(McqItem(
            id=f"mcq-{i:04d}",
            context=f"the cat {i} sat on the mat and watched the rain in the garden",
            question=f"where did cat {i} sit",
            answer=f"on the mat {i}",
            distractors=(f"in the tree {i}", f"on the roof {i}", f"under the bed {i}"),
            source=source,
            split="test",
        ))
    return items


def humaneval_fixture(n_items: int = 12):
    """(plan, items-by-id, verdicts) sized for two assessors.

    Item count must satisfy shared 4 + 2 assessors x unique (n-4)/2, so
    n_items must be even and at least 8.
    """
    if n_items < 8 or n_items % 4 != 0:
        raise ValueError("n_items must be a multiple of 4, at least 8")
    items = mcq_items(n_items)
    verdicts = {item.id: (i % 2 == 0) for i, item in enumerate(items)}
    accepted = [i.id for i in items if verdicts[i.id]]
    rejected = [i.id for i in items if not verdicts[i.id]]
    unique_n = (n_items - 4) // 2
    plan = build_assignment(accepted, rejected, n_assessors=2, shared_n=4,
                            unique_n=unique_n, seed=7)
    return plan, {i.id: i for i in items}, verdicts


def fixture_app(ratings_path: str, show_context: bool = False,
                frontend_dir: str | None = None):
    from mcqforge.service import create_app
    from mcqforge.store import RatingStore

    plan, items, verdicts = humaneval_fixture()
    store = RatingStore(ratings_path)
    app = create_app(plan, items, verdicts, store, show_context=show_context,
                     frontend_dir=frontend_dir)
    return app, plan


def main(argv=None) -> int:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(
        prog="python -m mcqforge.testkit",
        description="serve the 12-item rating fixture")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--ratings", default="fixture_ratings.jsonl")
    parser.add_argument("--show-context", action="store_true")
    parser.add_argument("--frontend", default=None)
    args = parser.parse_args(argv)
    app, plan = fixture_app(args.ratings, args.show_context, args.frontend)
    print(f"fixture service: {plan.n_tasks} tasks for {plan.assessors} "
          f"on http://{args.host}:{args.port}", flush=True)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
