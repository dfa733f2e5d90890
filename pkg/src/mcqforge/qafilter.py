"""Four-option answering head over a scorer backend, used as a filter.

Each option is scored independently against the context and question;
the four scores pass through a softmax and the highest-probability
option wins (ties break toward the lowest index). An item is accepted
iff the winner is the gold answer. The model head itself lives behind
the scorer backend; this module owns only the 4-way combination.

Presentation order of options is shuffled with a per-item seed so the
decision cannot lean on the answer always sitting in slot 0; the
permutation is recorded in the verdict for reproducibility.
"""

import hashlib
import random
from dataclasses import dataclass

import numpy as np

from mcqforge.corpus import McqItem
from mcqforge.errors import BackendError, ValidationError
from mcqforge.tokenizer import Tokenizer, build_qa_input

N_OPTIONS = 4


@dataclass(frozen=True)
class OptionScores:
    """Raw scores in presentation order, plus the canonical->shown map."""

    scores: tuple[float, float, float, float]
    order: tuple[int, int, int, int] = (0, 1, 2, 3)

    def __post_init__(self):
        if len(self.scores) != N_OPTIONS:
            raise ValidationError(f"expected {N_OPTIONS} scores, got {len(self.scores)}")
        if not all(np.isfinite(s) for s in self.scores):
            raise ValidationError(f"scores must be finite, got {self.scores!r}")
        if sorted(self.order) != list(range(N_OPTIONS)):
            raise ValidationError(f"order must be a permutation of 0..3, got {self.order!r}")


@dataclass(frozen=True)
class QaVerdict:
    item_id: str
    probabilities: tuple[float, float, float, float]
    chosen_index: int
    gold_index: int
    accepted: bool

    def __post_init__(self):
        if abs(sum(self.probabilities) - 1.0) > 1e-9:
            raise ValidationError(
                f"probabilities must sum to 1, got {sum(self.probabilities)!r}"
            )
        if any(p < 0 for p in self.probabilities):
            raise ValidationError("probabilities must be nonnegative")
        if not (0 <= self.chosen_index < N_OPTIONS and 0 <= self.gold_index < N_OPTIONS):
            raise ValidationError("indices must be in 0..3")
        if self.accepted != (self.chosen_index == self.gold_index):
            raise ValidationError("accepted flag contradicts chosen vs gold")

    def as_dict(self) -> dict:
        return {
            "id": self.item_id,
            "probabilities": list(self.probabilities),
            "chosen": self.chosen_index,
            "gold": self.gold_index,
            "accepted": self.accepted,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "QaVerdict":
        try:
            return cls(
                item_id=record["id"],
                probabilities=tuple(record["probabilities"]),
                chosen_index=record["chosen"],
                gold_index=record["gold"],
                accepted=record["accepted"],
            )
        except KeyError as e:
            raise ValidationError(f"verdict record is missing field {e.args[0]!r}") from e


def score_options(backend, tokenizer: Tokenizer, context: str, question: str,
                  options: list[str], order: tuple[int, int, int, int] = (0, 1, 2, 3),
                  ) -> OptionScores:
    """Score 4 options independently, in the given presentation order."""
    if len(options) != N_OPTIONS:
        raise ValidationError(f"expected {N_OPTIONS} options, got {len(options)}")
    if any(not o.strip() for o in options):
        raise ValidationError("options must be non-empty")
    scores = []
    for i, option in enumerate(options):
        ids = build_qa_input(tokenizer, context, question, option)
        try:
            scores.append(float(backend.score(ids)))
        except Exception as e:
            raise BackendError(f"scorer failed on option {i}: {e}") from e
    return OptionScores(tuple(scores), order)


def softmax_normalize(scores: OptionScores) -> np.ndarray:
    arr = np.asarray(scores.scores, dtype=float)
    shifted = arr - arr.max()
    exps = np.exp(shifted)
    return exps / exps.sum()


def classify(scores: OptionScores) -> int:
    """Index of the highest score; np.argmax takes the lowest on ties."""
    return int(np.argmax(np.asarray(scores.scores)))


def _item_permutation(item_id: str, shuffle_seed: int) -> list[int]:
    digest = hashlib.sha256(f"{shuffle_seed}:{item_id}".encode("utf-8")).digest()
    seed = int.from_bytes(digest[:8], "big")
    return random.Random(seed).sample(range(N_OPTIONS), N_OPTIONS)


def filter_item(backend, tokenizer: Tokenizer, item: McqItem,
                shuffle_seed: int = 0) -> QaVerdict:
    """Accept the item iff the model picks the gold answer's position."""
    perm = _item_permutation(item.id, shuffle_seed)
    canonical = item.options()
    shown = [canonical[j] for j in perm]
    gold_index = perm.index(0)
    scores = score_options(backend, tokenizer, item.context, item.question,
                           shown, order=tuple(perm))
    probs = softmax_normalize(scores)
    chosen = classify(scores)
    return QaVerdict(
        item_id=item.id,
        probabilities=tuple(float(p) for p in probs),
        chosen_index=chosen,
        gold_index=gold_index,
        accepted=chosen == gold_index,
    )


def qa_accuracy(backend, tokenizer: Tokenizer, items: list[McqItem],
                shuffle_seed: int = 0) -> float:
    if not items:
        raise ValidationError("qa_accuracy requires at least one item")
    accepted = sum(
        filter_item(backend, tokenizer, item, shuffle_seed).accepted for item in items
    )
    return accepted / len(items)


def accuracy_of_verdicts(verdicts: list[QaVerdict]) -> float:
    if not verdicts:
        raise ValidationError("no verdicts to aggregate")
    return sum(v.accepted for v in verdicts) / len(verdicts)


def render_accuracy_table(rows: dict[str, float]) -> str:
    """Accuracy table, one labeled row per item set, percentages."""
    if not rows:
        raise ValidationError("no rows to render")
    label_w = max(len(label) for label in rows)
    lines = [f"{'Set'.ljust(label_w)}  Accuracy"]
    for label, acc in rows.items():
        lines.append(f"{label.ljust(label_w)}  {100.0 * acc:6.2f}%")
    return "\n".join(lines)
