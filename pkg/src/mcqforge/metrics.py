"""Text-generation metrics: BLEU-1..4 and ROUGE-L, from scratch.

Distractor evaluation pairs slot i of the generated triple with slot i of
the reference triple only (reordering a correct triple lowers the score on
purpose), then averages over the three slots. Corpus-level numbers are the
arithmetic mean of per-item reports; a pooled-count BLEU mode is also
provided.
"""

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from mcqforge import kernels
from mcqforge.errors import ValidationError

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def metric_tokenize(text: str) -> list[str]:
    """Lowercase, separate punctuation from words, split on whitespace."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    smoothing: str = "none"

    def __post_init__(self):
        if not 1 <= self.max_order <= 4:
            raise ValidationError(f"max_order must be in 1..4, got {self.max_order}")
        if self.smoothing != "none":
            raise ValidationError(f"unsupported smoothing: {self.smoothing!r}")


@dataclass(frozen=True)
class RougeLScore:
    precision: float
    recall: float
    f1: float


def _to_id_arrays(seqs: list[list[str]]) -> list[np.ndarray]:
    # one shared token->id mapping so kernel comparisons stay meaningful
    ids: dict[str, int] = {}
    out = []
    for seq in seqs:
        arr = np.fromiter(
            (ids.setdefault(tok, len(ids)) for tok in seq), dtype=np.int64, count=len(seq)
        )
        out.append(arr)
    return out


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length between two token lists."""
    a_ids, b_ids = _to_id_arrays([list(a), list(b)])
    return kernels.lcs_length_ids(a_ids, b_ids)


def modified_precision(hyp, refs, n: int) -> tuple[int, int]:
    """Clipped n-gram matches and total hypothesis n-grams.

    ``refs`` may be a single token list or a list of token lists; with
    several references the clip is the maximum reference count per n-gram.
    """
    if n < 1:
        raise ValidationError(f"n-gram order must be >= 1, got {n}")
    hyp = list(hyp)
    refs = list(refs)
    if refs and isinstance(refs[0], str):
        refs = [refs]
    arrays = _to_id_arrays([hyp] + [list(r) for r in refs])
    return kernels.ngram_clip(arrays[0], arrays[1:], n)


def brevity_penalty(hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0:
        return 0.0
    if hyp_len > ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def bleu(hyp, ref, config: BleuConfig = BleuConfig()) -> float:
    """Sentence BLEU: geometric mean of modified precisions times the
    brevity penalty. Any zero precision (or an empty hypothesis) gives 0.

    Orders longer than the hypothesis contribute no n-grams and are
    excluded from the mean, so a short text still scores 1 against an
    identical reference.
    """
    hyp = list(hyp)
    ref = list(ref)
    if not hyp:
        return 0.0
    log_sum = 0.0
    orders = 0
    for n in range(1, config.max_order + 1):
        clipped, total = modified_precision(hyp, ref, n)
        if total == 0:
            break
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
        orders += 1
    geo_mean = math.exp(log_sum / orders)
    return brevity_penalty(len(hyp), len(ref)) * geo_mean


def corpus_bleu(pairs, config: BleuConfig = BleuConfig(), mode: str = "averaged") -> float:
    """BLEU over (hyp, ref) token-list pairs.

    ``averaged`` (default) is the mean of sentence scores, matching the
    per-distractor methodology; ``pooled`` accumulates clipped/total counts
    across the corpus before taking the geometric mean.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("corpus_bleu requires at least one pair")
    if mode == "averaged":
        return sum(bleu(h, r, config) for h, r in pairs) / len(pairs)
    if mode != "pooled":
        raise ValidationError(f"unknown corpus BLEU mode: {mode!r}")
    clipped = [0] * config.max_order
    totals = [0] * config.max_order
    hyp_len = 0
    ref_len = 0
    for hyp, ref in pairs:
        hyp = list(hyp)
        ref = list(ref)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, config.max_order + 1):
            c, t = modified_precision(hyp, ref, n)
            clipped[n - 1] += c
            totals[n - 1] += t
    if hyp_len == 0:
        return 0.0
    log_sum = 0.0
    orders = 0
    for c, t in zip(clipped, totals):
        if t == 0:
            break
        if c == 0:
            return 0.0
        log_sum += math.log(c / t)
        orders += 1
    return brevity_penalty(hyp_len, ref_len) * math.exp(log_sum / orders)


def rouge_l(hyp, ref) -> RougeLScore:
    """ROUGE-L from the LCS: recall = LCS/|ref|, precision = LCS/|hyp|."""
    hyp = list(hyp)
    ref = list(ref)
    if not hyp or not ref:
        return RougeLScore(0.0, 0.0, 0.0)
    lcs = lcs_length(hyp, ref)
    precision = lcs / len(hyp)
    recall = lcs / len(ref)
    if precision + recall == 0.0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return RougeLScore(precision, recall, f1)


_SLOT_FIELDS = ("bleu1", "bleu2", "bleu3", "bleu4", "rougeL_p", "rougeL_r", "rougeL_f1")


@dataclass(frozen=True)
class SlotScores:
    bleu1: float
    bleu2: float
    bleu3: float
    bleu4: float
    rougeL_p: float
    rougeL_r: float
    rougeL_f1: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in _SLOT_FIELDS}


def _mean_slots(slots: list[SlotScores]) -> SlotScores:
    return SlotScores(
        **{name: sum(getattr(s, name) for s in slots) / len(slots) for name in _SLOT_FIELDS}
    )


@dataclass(frozen=True)
class DistractorEvalReport:
    per_slot: list[SlotScores]
    averaged: SlotScores = field(init=False)

    def __post_init__(self):
        if len(self.per_slot) != 3:
            raise ValidationError(f"expected 3 slots, got {len(self.per_slot)}")
        object.__setattr__(self, "averaged", _mean_slots(list(self.per_slot)))

    def as_dict(self) -> dict:
        return {
            "per_slot": [s.as_dict() for s in self.per_slot],
            "averaged": self.averaged.as_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, ensure_ascii=False)


def _score_slot(hyp_tokens: list[str], ref_tokens: list[str]) -> SlotScores:
    rouge = rouge_l(hyp_tokens, ref_tokens)
    return SlotScores(
        bleu1=bleu(hyp_tokens, ref_tokens, BleuConfig(max_order=1)),
        bleu2=bleu(hyp_tokens, ref_tokens, BleuConfig(max_order=2)),
        bleu3=bleu(hyp_tokens, ref_tokens, BleuConfig(max_order=3)),
        bleu4=bleu(hyp_tokens, ref_tokens, BleuConfig(max_order=4)),
        rougeL_p=rouge.precision,
        rougeL_r=rouge.recall,
        rougeL_f1=rouge.f1,
    )


def evaluate_distractors(generated: list[str], references: list[str]) -> DistractorEvalReport:
    """Score generated distractor i against reference distractor i only."""
    if len(generated) != 3 or len(references) != 3:
        raise ValidationError(
            f"expected 3 generated and 3 reference distractors, "
            f"got {len(generated)} and {len(references)}"
        )
    slots = [
        _score_slot(metric_tokenize(g), metric_tokenize(r))
        for g, r in zip(generated, references)
    ]
    return DistractorEvalReport(per_slot=slots)


def aggregate_reports(reports: list[DistractorEvalReport]) -> DistractorEvalReport:
    """Corpus-level report: fieldwise mean of per-item reports, slot by slot."""
    if not reports:
        raise ValidationError("cannot aggregate zero reports")
    slots = [
        _mean_slots([report.per_slot[i] for report in reports]) for i in range(3)
    ]
    return DistractorEvalReport(per_slot=slots)


def render_report_table(rows: dict[str, SlotScores]) -> str:
    """Plain-text table with BLEU-1..4 and ROUGE-L columns, one row per
    labelled system. ROUGE-L shows recall (scores scaled to 0..100)."""
    headers = ["", "BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "ROUGE-L"]
    lines = [[label] + [
        f"{100.0 * v:.2f}"
        for v in (s.bleu1, s.bleu2, s.bleu3, s.bleu4, s.rougeL_r)
    ] for label, s in rows.items()]
    widths = [max(len(r[i]) for r in [headers] + lines) for i in range(6)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    out = [fmt.format(*headers).rstrip()]
    out.append("-" * len(out[0]))
    out.extend(fmt.format(*line).rstrip() for line in lines)
    return "\n".join(out)
