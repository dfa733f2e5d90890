"""Sampling-based decoding for question and distractor generation.

The repetition penalty follows the sign-aware form: a positive logit for
an already-generated token is divided by theta, a negative one is
multiplied by it, so the penalty always pushes re-use down regardless of
sign. Only tokens generated in the current continuation are penalized,
never the prompt.

Distractor decoding splits one continuation on the distractor marker,
drops empties and duplicates (case- and whitespace-insensitive, and
never equal to the gold answer), and keeps retrying with a fresh rng
stream until three survive or the retry budget runs out.
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from mcqforge.errors import (
    ConfigError,
    GenerationError,
    MaxRetriesExceeded,
    SamplingError,
)
from mcqforge.tokenizer import Tokenizer, build_dg_prompt, build_qg_prompt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationConfig:
    max_new_tokens: int = 64
    repetition_penalty: float = 1.2
    temperature: float = 1.0
    top_k: int | None = None
    top_p: float | None = 0.9
    seed: int = 0
    max_retries: int = 10

    def __post_init__(self):
        if self.max_new_tokens < 1:
            raise ConfigError(f"max_new_tokens must be >= 1, got {self.max_new_tokens}")
        if self.repetition_penalty < 1.0:
            raise ConfigError(
                f"repetition_penalty must be >= 1, got {self.repetition_penalty}"
            )
        if self.temperature < 0.0:
            raise ConfigError(f"temperature must be >= 0, got {self.temperature}")
        if self.top_k is not None and self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        if self.top_p is not None and not 0.0 < self.top_p <= 1.0:
            raise ConfigError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_retries < 1:
            raise ConfigError(f"max_retries must be >= 1, got {self.max_retries}")


def apply_repetition_penalty(logits: np.ndarray, generated_ids: Sequence[int],
                             theta: float) -> np.ndarray:
    """Penalize logits of already-generated ids; returns a new array."""
    out = np.array(logits, dtype=float, copy=True)
    if theta == 1.0 or len(generated_ids) == 0:
        return out
    idx = np.unique(np.asarray(generated_ids, dtype=np.intp))
    vals = out[idx]
    out[idx] = np.where(vals > 0, vals / theta, vals * theta)
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits)
    exps = np.exp(shifted)
    return exps / exps.sum()


def sample_next(logits: np.ndarray, config: GenerationConfig,
                rng: np.random.Generator) -> int:
    """One sampling step: temperature, then top-k, then top-p, then draw.

    Temperature 0 is greedy argmax with the lowest index winning ties.
    """
    logits = np.asarray(logits, dtype=float)
    if not np.any(np.isfinite(logits)):
        raise SamplingError("all logits are non-finite")
    if config.temperature == 0.0:
        return int(np.argmax(logits))
    scaled = logits / config.temperature
    # Stable order: descending value, ascending index on ties.
    order = np.argsort(-scaled, kind="stable")
    keep = np.ones(len(scaled), dtype=bool)
    if config.top_k is not None and config.top_k < len(scaled):
        keep[order[config.top_k:]] = False
    if config.top_p is not None and config.top_p < 1.0:
        probs = softmax(scaled)
        csum = np.cumsum(probs[order])
        # Smallest prefix whose mass reaches top_p; the boundary token stays.
        cutoff = int(np.searchsorted(csum, config.top_p)) + 1
        mask = np.zeros(len(scaled), dtype=bool)
        mask[order[:cutoff]] = True
        keep &= mask
    filtered = np.where(keep, scaled, -np.inf)
    if not np.any(np.isfinite(filtered)):
        raise SamplingError("no token survived top-k/top-p filtering")
    probs = softmax(filtered)
    return int(rng.choice(len(probs), p=probs))


def generate_sequence(backend, prompt_ids: Sequence[int], end_id: int,
                      config: GenerationConfig, rng: np.random.Generator) -> list[int]:
    """Generated continuation ids, excluding the prompt and the end id."""
    context = list(prompt_ids)
    generated: list[int] = []
    for _ in range(config.max_new_tokens):
        logits = backend.next_logits(context)
        logits = apply_repetition_penalty(logits, generated, config.repetition_penalty)
        token = sample_next(logits, config, rng)
        if token == end_id:
            break
        generated.append(token)
        context.append(token)
    return generated


def _attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng((seed, attempt))


def _first_segment(text: str, tokenizer: Tokenizer) -> str:
    """Text up to the first special marker, whitespace-normalized."""
    cut = len(text)
    for marker in tokenizer.specials.markers():
        pos = text.find(marker)
        if pos != -1:
            cut = min(cut, pos)
    return " ".join(text[:cut].split())


def generate_question(backend, tokenizer: Tokenizer, context: str, answer: str,
                      config: GenerationConfig) -> str:
    """One question for a context/answer pair, retrying on empty output."""
    prompt = build_qg_prompt(tokenizer, context, answer)
    end_id = tokenizer.end_id
    attempts = 1 + config.max_retries
    for attempt in range(attempts):
        rng = _attempt_rng(config.seed, attempt)
        ids = generate_sequence(backend, prompt, end_id, config, rng)
        question = _first_segment(tokenizer.decode(ids), tokenizer)
        if question:
            return question
    raise GenerationError(
        f"no non-empty question after {attempts} attempts"
    )


def normalize_option(text: str) -> str:
    """Dedup key: collapse whitespace, fold case."""
    return " ".join(text.split()).casefold()


@dataclass(frozen=True)
class DistractorSet:
    distractors: tuple[str, str, str]
    retries_used: int

    def __post_init__(self):
        keys = [normalize_option(d) for d in self.distractors]
        if len(set(keys)) != 3 or any(not k for k in keys):
            raise GenerationError(f"distractor set is degenerate: {self.distractors!r}")


def _split_distractors(text: str, tokenizer: Tokenizer) -> list[str]:
    marker = tokenizer.specials.distractor_marker
    # Any other sampled marker ends the candidate, same as for questions.
    return [_first_segment(part, tokenizer) for part in text.split(marker)]


def generate_distractors(backend, tokenizer: Tokenizer, context: str, question: str,
                         answer: str, config: GenerationConfig) -> DistractorSet:
    """Three distinct distractors, accumulated across retry attempts.

    Candidates surviving one attempt carry over to the next, so a lucky
    pair is not thrown away when the third fails to materialize.
    """
    prompt = build_dg_prompt(tokenizer, context, question, answer)
    end_id = tokenizer.end_id
    answer_key = normalize_option(answer)
    kept: list[str] = []
    seen: set[str] = {answer_key}
    attempts = 1 + config.max_retries
    for attempt in range(attempts):
        rng = _attempt_rng(config.seed, attempt)
        ids = generate_sequence(backend, prompt, end_id, config, rng)
        for candidate in _split_distractors(tokenizer.decode(ids), tokenizer):
            key = normalize_option(candidate)
            if not key or key in seen:
                continue
            seen.add(key)
            kept.append(candidate)
            if len(kept) == 3:
                return DistractorSet(tuple(kept), retries_used=attempt)
        logger.debug("attempt %d kept %d/3 distractors", attempt, len(kept))
    raise MaxRetriesExceeded(
        f"only {len(kept)}/3 distractors after {attempts} attempts", partial=list(kept)
    )
