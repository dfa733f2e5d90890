"""Byte-level BPE tokenizer and the prompt layouts fed to the backends.

The vocabulary format matches the publicly distributed GPT-2 files: a JSON
object mapping token string to id, and a merges file of "tokA tokB" lines
in rank order (an optional "#..." header line is skipped). Token strings
use the GPT-2 printable byte alphabet, so loading the real GPT-2 files
yields the same ids a fine-tuned backend expects.

Segment markers are reserved special tokens: they are atomic (never split,
never produced by merges) and any fixed non-colliding strings work. The
canonical set is defined by ``SpecialTokens()``.
"""

import json
from dataclasses import dataclass, fields
from functools import lru_cache

import regex

from mcqforge.errors import (
    DecodeError,
    TokenizerError,
    ValidationError,
    VocabError,
)

# GPT-2 pre-split: contractions, letter runs, digit runs, other runs, spaces
_PRESPLIT = regex.compile(
    r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)


@lru_cache(maxsize=1)
def byte_to_unit() -> dict[int, str]:
    """Bijection raw byte -> printable unit (the GPT-2 byte alphabet)."""
    printable = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("\xa1"), ord("\xac") + 1))
        + list(range(ord("\xae"), ord("\xff") + 1))
    )
    mapping = {}
    shift = 0
    for b in range(256):
        if b in printable:
            mapping[b] = chr(b)
        else:
            mapping[b] = chr(256 + shift)
            shift += 1
    return mapping


@lru_cache(maxsize=1)
def unit_to_byte() -> dict[str, int]:
    return {u: b for b, u in byte_to_unit().items()}


@dataclass(frozen=True)
class SpecialTokens:
    context_marker: str = "<|context|>"
    question_marker: str = "<|question|>"
    answer_marker: str = "<|answer|>"
    distractor_marker: str = "<|distractor|>"
    end_marker: str = "<|endoftext|>"

    def markers(self) -> list[str]:
        return [getattr(self, f.name) for f in fields(self)]

    def __post_init__(self):
        markers = self.markers()
        if len(set(markers)) != len(markers):
            raise ValidationError("special marker strings must be distinct")
        for m in markers:
            if not m:
                raise ValidationError("special marker strings must be non-empty")


def load_vocab(vocab_path, merges_path) -> tuple[dict[str, int], list[tuple[str, str]]]:
    """Load a token->id JSON object and an ordered merges file."""
    with open(vocab_path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise VocabError(f"{vocab_path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise VocabError(f"{vocab_path}: expected a JSON object mapping token to id")
    vocab = {str(k): int(v) for k, v in raw.items()}
    if len(set(vocab.values())) != len(vocab):
        raise VocabError(f"{vocab_path}: duplicate token ids")

    merges: list[tuple[str, str]] = []
    with open(merges_path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if lineno == 1 and line.startswith("#"):
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise VocabError(f"{merges_path}:{lineno}: expected 'tokA tokB', got {line!r}")
            merges.append((parts[0], parts[1]))
    for a, b in merges:
        if a + b not in vocab:
            raise VocabError(f"merge result {a + b!r} is not in the vocabulary")
    return vocab, merges


class Tokenizer:
    """Immutable after construction; encode/decode are pure."""

    def __init__(
        self,
        vocab: dict[str, int],
        merges: list[tuple[str, str]],
        specials: SpecialTokens | None = None,
    ):
        self.specials = specials or SpecialTokens()
        self._token_ids = dict(vocab)
        self._ranks = {pair: i for i, pair in enumerate(merges)}
        self._cache: dict[str, list[str]] = {}

        next_id = max(vocab.values(), default=-1) + 1
        self.special_ids: dict[str, int] = {}
        for marker in self.specials.markers():
            if marker in self._token_ids:
                self.special_ids[marker] = self._token_ids[marker]
            else:
                self.special_ids[marker] = next_id
                next_id += 1
        self._id_specials = {i: m for m, i in self.special_ids.items()}
        self._id_tokens = {i: t for t, i in self._token_ids.items()}
        self.vocab_size = next_id

        escaped = sorted((regex.escape(m) for m in self.specials.markers()), key=len, reverse=True)
        self._marker_split = regex.compile("(" + "|".join(escaped) + ")")

    @classmethod
    def from_files(cls, vocab_path, merges_path, specials: SpecialTokens | None = None):
        vocab, merges = load_vocab(vocab_path, merges_path)
        return cls(vocab, merges, specials)

    def marker_id(self, marker: str) -> int:
        return self.special_ids[marker]

    @property
    def end_id(self) -> int:
        return self.special_ids[self.specials.end_marker]

    def _bpe(self, mapped: str) -> list[str]:
        cached = self._cache.get(mapped)
        if cached is not None:
            return cached
        word = list(mapped)
        while len(word) > 1:
            pairs = {(word[i], word[i + 1]) for i in range(len(word) - 1)}
            best = min(pairs, key=lambda p: self._ranks.get(p, float("inf")))
            if best not in self._ranks:
                break
            first, second = best
            merged = []
            i = 0
            while i < len(word):
                if i < len(word) - 1 and word[i] == first and word[i + 1] == second:
                    merged.append(first + second)
                    i += 2
                else:
                    merged.append(word[i])
                    i += 1
            word = merged
        self._cache[mapped] = word
        return word

    def _encode_plain(self, text: str, out: list[int]) -> None:
        b2u = byte_to_unit()
        for match in _PRESPLIT.finditer(text):
            mapped = "".join(b2u[b] for b in match.group().encode("utf-8"))
            for piece in self._bpe(mapped):
                token_id = self._token_ids.get(piece)
                if token_id is None:
                    raise TokenizerError(f"token {piece!r} is not in the vocabulary")
                out.append(token_id)

    def encode(self, text: str) -> list[int]:
        """Encode text to ids; marker substrings map to their reserved ids."""
        ids: list[int] = []
        for segment in self._marker_split.split(text):
            if not segment:
                continue
            special = self.special_ids.get(segment)
            if special is not None:
                ids.append(special)
            else:
                self._encode_plain(segment, ids)
        return ids

    def decode(self, ids) -> str:
        """Inverse of encode at the byte level; specials render as markers."""
        u2b = unit_to_byte()
        parts: list[str] = []
        pending: list[str] = []

        def flush():
            if pending:
                data = bytes(u2b[ch] for ch in "".join(pending))
                parts.append(data.decode("utf-8", errors="replace"))
                pending.clear()

        for i in ids:
            i = int(i)
            marker = self._id_specials.get(i)
            if marker is not None:
                flush()
                parts.append(marker)
                continue
            token = self._id_tokens.get(i)
            if token is None:
                raise DecodeError(f"unknown token id {i}")
            pending.append(token)
        flush()
        return "".join(parts)


def _check_segment(tok: Tokenizer, name: str, text: str) -> None:
    if not text or not text.strip():
        raise ValidationError(f"{name} must be non-empty")
    for marker in tok.specials.markers():
        if marker in text:
            raise ValidationError(f"{name} must not contain the marker {marker!r}")


def build_qg_prompt(tok: Tokenizer, context: str, answer: str) -> list[int]:
    """Question-generation prompt: context, answer, then the question
    marker the model continues after."""
    _check_segment(tok, "context", context)
    _check_segment(tok, "answer", answer)
    s = tok.specials
    return (
        [tok.marker_id(s.context_marker)]
        + tok.encode(context)
        + [tok.marker_id(s.answer_marker)]
        + tok.encode(answer)
        + [tok.marker_id(s.question_marker)]
    )


def build_dg_prompt(tok: Tokenizer, context: str, question: str, answer: str) -> list[int]:
    """Distractor-generation prompt: context, question, answer, then the
    distractor marker the model continues after."""
    _check_segment(tok, "context", context)
    _check_segment(tok, "question", question)
    _check_segment(tok, "answer", answer)
    s = tok.specials
    return (
        [tok.marker_id(s.context_marker)]
        + tok.encode(context)
        + [tok.marker_id(s.question_marker)]
        + tok.encode(question)
        + [tok.marker_id(s.answer_marker)]
        + tok.encode(answer)
        + [tok.marker_id(s.distractor_marker)]
    )


def build_qa_input(
    tok: Tokenizer,
    context: str,
    question: str,
    option: str,
    max_len: int | None = None,
) -> list[int]:
    """Scoring input for one answer option: context, question, option.

    When the sequence exceeds ``max_len``, tokens are dropped from the end
    of the context segment only (the question and option always survive).
    """
    _check_segment(tok, "context", context)
    _check_segment(tok, "question", question)
    _check_segment(tok, "option", option)
    s = tok.specials
    ctx_ids = tok.encode(context)
    tail = (
        [tok.marker_id(s.question_marker)]
        + tok.encode(question)
        + [tok.marker_id(s.answer_marker)]
        + tok.encode(option)
    )
    head = [tok.marker_id(s.context_marker)]
    if max_len is not None:
        budget = max_len - len(head) - len(tail)
        if budget < 0:
            raise ValidationError(
                f"max_len {max_len} too small even with an empty context "
                f"(markers + question + option need {len(head) + len(tail)})"
            )
        ctx_ids = ctx_ids[:budget]
    return head + ctx_ids + tail
