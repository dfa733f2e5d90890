"""SQuAD v2 / RACE ingestion into unified records, plus corpus statistics.

SQuAD ingestion drops questions flagged impossible to answer. RACE
ingestion resolves the answer letter and keeps the remaining options as
distractors in their original order; source items whose distractor equals
the answer are kept but logged (generated items are held to the stricter
rule elsewhere).
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field

from mcqforge.errors import ParseError, SchemaError, ValidationError

logger = logging.getLogger(__name__)

SOURCES = ("dataset", "generated")
SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class SquadItem:
    id: str
    context: str
    question: str
    answer: str
    impossible: bool

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "context": self.context,
            "question": self.question,
            "answer": self.answer,
            "impossible": self.impossible,
        }


@dataclass(frozen=True)
class McqItem:
    id: str
    context: str
    question: str
    answer: str
    distractors: tuple[str, str, str]
    source: str = "dataset"
    split: str = "train"

    def __post_init__(self):
        if len(self.distractors) != 3:
            raise ValidationError(f"{self.id}: expected 3 distractors, got {len(self.distractors)}")
        if any(not d.strip() for d in self.distractors):
            raise ValidationError(f"{self.id}: empty distractor")
        if self.source not in SOURCES:
            raise ValidationError(f"{self.id}: unknown source {self.source!r}")
        if self.split not in SPLITS:
            raise ValidationError(f"{self.id}: unknown split {self.split!r}")
        object.__setattr__(self, "distractors", tuple(self.distractors))

    def options(self) -> list[str]:
        return [self.answer, *self.distractors]

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "context": self.context,
            "question": self.question,
            "answer": self.answer,
            "distractors": list(self.distractors),
            "source": self.source,
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "McqItem":
        try:
            return cls(
                id=str(d["id"]),
                context=str(d["context"]),
                question=str(d["question"]),
                answer=str(d["answer"]),
                distractors=tuple(d["distractors"]),
                source=str(d.get("source", "dataset")),
                split=str(d.get("split", "train")),
            )
        except KeyError as e:
            raise SchemaError(f"item record is missing field {e.args[0]!r}") from e


@dataclass(frozen=True)
class CorpusStats:
    item_count: int
    distractor_word_mean: float
    distractor_word_std: float

    def as_dict(self) -> dict:
        return {
            "item_count": self.item_count,
            "distractor_word_mean": self.distractor_word_mean,
            "distractor_word_std": self.distractor_word_std,
        }


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise SchemaError(f"{where}: missing required field {key!r}")
    return mapping[key]


def ingest_squad(path) -> list[SquadItem]:
    """Parse a SQuAD v2 file and keep only answerable questions, in
    document order."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    items: list[SquadItem] = []
    data = _require(doc, "data", str(path))
    for ai, article in enumerate(data):
        paragraphs = _require(article, "paragraphs", f"{path} data[{ai}]")
        for pi, para in enumerate(paragraphs):
            where = f"{path} data[{ai}].paragraphs[{pi}]"
            context = _require(para, "context", where)
            for qa in _require(para, "qas", where):
                qid = str(_require(qa, "id", where))
                question = _require(qa, "question", f"{where} qa {qid}")
                impossible = bool(_require(qa, "is_impossible", f"{where} qa {qid}"))
                if impossible:
                    continue
                answers = _require(qa, "answers", f"{where} qa {qid}")
                if not answers:
                    raise SchemaError(f"{where} qa {qid}: answerable question has no answers")
                answer = str(_require(answers[0], "text", f"{where} qa {qid} answers[0]"))
                if not answer:
                    raise SchemaError(f"{where} qa {qid}: empty answer text")
                if answer not in context:
                    raise SchemaError(f"{where} qa {qid}: answer does not occur in the context")
                items.append(
                    SquadItem(
                        id=qid,
                        context=context,
                        question=str(question),
                        answer=answer,
                        impossible=False,
                    )
                )
    return items


_LETTERS = {"A": 0, "B": 1, "C": 2, "D": 3}


def ingest_race(directory, split: str = "train") -> list[McqItem]:
    """Parse a directory tree of RACE JSON files, one McqItem per question.

    Files are visited in sorted relative-path order so ids and item order
    are reproducible across runs.
    """
    paths = []
    for root, _dirs, names in os.walk(directory):
        for name in names:
            if name.endswith((".txt", ".json")):
                full = os.path.join(root, name)
                paths.append((os.path.relpath(full, directory), full))
    paths.sort()
    items: list[McqItem] = []
    for rel, full in paths:
        with open(full, "r", encoding="utf-8") as f:
            try:
                doc = json.load(f)
            except json.JSONDecodeError as e:
                raise ParseError(f"{full}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
        article = _require(doc, "article", rel)
        questions = _require(doc, "questions", rel)
        options = _require(doc, "options", rel)
        answers = _require(doc, "answers", rel)
        if not (len(questions) == len(options) == len(answers)):
            raise SchemaError(
                f"{rel}: questions/options/answers lengths differ "
                f"({len(questions)}/{len(options)}/{len(answers)})"
            )
        for qi, (question, opts, letter) in enumerate(zip(questions, options, answers)):
            where = f"{rel}#{qi}"
            if letter not in _LETTERS:
                raise SchemaError(f"{where}: answer letter {letter!r} outside A-D")
            if len(opts) != 4:
                raise SchemaError(f"{where}: expected 4 options, got {len(opts)}")
            if any(not str(o).strip() for o in opts):
                raise SchemaError(f"{where}: empty option text")
            idx = _LETTERS[letter]
            answer = str(opts[idx])
            distractors = tuple(str(o) for i, o in enumerate(opts) if i != idx)
            if any(d == answer for d in distractors):
                logger.warning("%s: a distractor textually equals the answer; keeping item", where)
            items.append(
                McqItem(
                    id=where,
                    context=str(article),
                    question=str(question),
                    answer=answer,
                    distractors=distractors,  # type: ignore[arg-type]
                    source="dataset",
                    split=split,
                )
            )
    return items


def corpus_stats(items: list[McqItem]) -> CorpusStats:
    """Mean/std of whitespace-word counts over all individual distractors
    (population standard deviation; empty corpus yields zeros)."""
    lengths = [len(d.split()) for item in items for d in item.distractors]
    if not lengths:
        return CorpusStats(item_count=0, distractor_word_mean=0.0, distractor_word_std=0.0)
    mean = sum(lengths) / len(lengths)
    var = sum((x - mean) ** 2 for x in lengths) / len(lengths)
    return CorpusStats(
        item_count=len(items),
        distractor_word_mean=mean,
        distractor_word_std=math.sqrt(var),
    )


def write_jsonl(records, path) -> None:
    """One JSON object per line, UTF-8, keys sorted for reproducibility."""
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def write_items_jsonl(items, path) -> None:
    write_jsonl((item.as_dict() for item in items), path)


def read_items_jsonl(path) -> list[McqItem]:
    return [McqItem.from_dict(d) for d in read_jsonl(path)]
