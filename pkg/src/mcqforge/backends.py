"""Model-inference backends behind two small contracts.

A generator backend maps a token sequence to next-position logits; a
scorer backend maps a sequence to one scalar. The mock is hash-based and
bit-reproducible across platforms (SHA-256 in counter mode, no
platform-default RNG), the scripted backend replays canned outputs for
exact-value tests, and the HTTP client bridges to a real inference
service over a JSON wire protocol:

    POST /v1/logits {"ids": [int...]} -> {"logits": [float...]}
    POST /v1/score  {"ids": [int...]} -> {"score": float}

Errors come back as {"error": "..."} with a non-2xx status.
"""

import hashlib
import time
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np
import requests

from mcqforge.errors import (
    BackendProtocolError,
    BackendStatusError,
    BackendTimeout,
    ConfigError,
    ReplayError,
    ValidationError,
)

BACKEND_KINDS = ("mock", "scripted", "http")


@runtime_checkable
class GeneratorBackend(Protocol):
    vocab_size: int

    def next_logits(self, ids: Sequence[int]) -> np.ndarray: ...


@runtime_checkable
class ScorerBackend(Protocol):
    def score(self, ids: Sequence[int]) -> float: ...


@dataclass
class BackendConfig:
    kind: str = "mock"
    endpoint: str | None = None
    timeout_ms: int = 10000
    retries: int = 2
    seed: int = 0
    script: list | None = None
    vocab: str | None = None
    merges: str | None = None

    def __post_init__(self):
        if self.kind not in BACKEND_KINDS:
            raise ConfigError(f"unknown backend kind {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise ConfigError("http backend requires an endpoint url")
        if self.timeout_ms <= 0:
            raise ConfigError(f"timeout_ms must be positive, got {self.timeout_ms}")
        if self.retries < 0:
            raise ConfigError(f"retries must be >= 0, got {self.retries}")


# ---------------------------------------------------------------------------
# Hash-based mock


def _hash_unit_floats(key: bytes, n: int) -> np.ndarray:
    """n floats in [0, 1) from SHA-256 over key || counter."""
    blocks = []
    needed = (n * 8 + 31) // 32
    for counter in range(needed):
        blocks.append(hashlib.sha256(key + counter.to_bytes(4, "big")).digest())
    raw = np.frombuffer(b"".join(blocks), dtype=">u8")[:n]
    return raw / np.float64(2**64)


def _id_key(seed: int, ids: Sequence[int]) -> bytes:
    body = ",".join(str(int(i)) for i in ids)
    return f"{seed}|{body}".encode("ascii")


class MockGenerator:
    """Deterministic logits derived from a hash of the id sequence."""

    def __init__(self, vocab_size: int, seed: int = 0):
        if vocab_size < 1:
            raise ConfigError(f"vocab_size must be positive, got {vocab_size}")
        self.vocab_size = vocab_size
        self.seed = seed

    def next_logits(self, ids: Sequence[int]) -> np.ndarray:
        if len(ids) == 0:
            raise ValidationError("mock generator requires a non-empty id sequence")
        units = _hash_unit_floats(b"gen:" + _id_key(self.seed, ids), self.vocab_size)
        return (units - 0.5) * 8.0


class MockScorer:
    """Deterministic scalar score derived from a hash of the id sequence."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def score(self, ids: Sequence[int]) -> float:
        units = _hash_unit_floats(b"score:" + _id_key(self.seed, ids), 1)
        return float((units[0] - 0.5) * 8.0)


# ---------------------------------------------------------------------------
# Scripted replay


class ScriptedGenerator:
    """Replays canned continuations by peaking the scripted id each step.

    Each script entry is a list of token ids; after an entry is exhausted
    the end id is peaked, which terminates the generation loop. With
    ``loop=True`` the script repeats forever.
    """

    PEAK = 100.0

    def __init__(self, script: list[list[int]], vocab_size: int, end_id: int, loop: bool = False):
        if not script:
            raise ValidationError("script must be non-empty")
        self.script = [list(entry) for entry in script]
        self.vocab_size = vocab_size
        self.end_id = end_id
        self.loop = loop
        self._entry = 0
        self._pos = 0

    def next_logits(self, ids: Sequence[int]) -> np.ndarray:
        if self._entry >= len(self.script):
            if not self.loop:
                raise ReplayError(f"script exhausted after {len(self.script)} continuations")
            self._entry = 0
        entry = self.script[self._entry]
        if self._pos < len(entry):
            target = entry[self._pos]
            self._pos += 1
        else:
            target = self.end_id
            self._entry += 1
            self._pos = 0
        logits = np.zeros(self.vocab_size)
        logits[target] = self.PEAK
        return logits


class ScriptedScorer:
    """Replays canned scores, one per call, in order."""

    def __init__(self, scores: list[float]):
        if not scores:
            raise ValidationError("script must be non-empty")
        self.scores = [float(s) for s in scores]
        self._pos = 0

    def score(self, ids: Sequence[int]) -> float:
        if self._pos >= len(self.scores):
            raise ReplayError(f"score script exhausted after {len(self.scores)} calls")
        value = self.scores[self._pos]
        self._pos += 1
        return value


class OptionMapScorer:
    """Scores by looking the decoded option text up in per-item maps.

    ``maps`` is consumed one entry per item (4 calls each); pass a single
    map to reuse it for every item. Unlisted options get ``default``.
    """

    def __init__(self, tokenizer, maps, default: float = 0.0):
        self.tokenizer = tokenizer
        self.maps = [dict(maps)] if isinstance(maps, dict) else [dict(m) for m in maps]
        self.default = default
        self.single = isinstance(maps, dict)
        self._calls = 0

    def score(self, ids: Sequence[int]) -> float:
        text = self.tokenizer.decode(ids)
        marker = self.tokenizer.specials.answer_marker
        if marker not in text:
            raise ValidationError("scorer input has no answer segment")
        option = text.rsplit(marker, 1)[1].strip()
        index = 0 if self.single else self._calls // 4
        self._calls += 1
        if index >= len(self.maps):
            raise ReplayError(f"option-map script exhausted after {len(self.maps)} items")
        return float(self.maps[index].get(option, self.default))


# ---------------------------------------------------------------------------
# HTTP client


class _HttpClient:
    def __init__(self, endpoint: str, timeout_ms: int = 10000, retries: int = 2,
                 backoff_s: float = 0.05, session=None):
        if timeout_ms <= 0:
            raise ConfigError(f"timeout_ms must be positive, got {timeout_ms}")
        self.endpoint = endpoint.rstrip("/")
        self.timeout_s = timeout_ms / 1000.0
        self.retries = retries
        self.backoff_s = backoff_s
        self.session = session or requests.Session()

    def post(self, path: str, ids: Sequence[int]) -> dict:
        url = self.endpoint + path
        payload = {"ids": [int(i) for i in ids]}
        attempts = 0
        last: Exception | None = None
        while attempts <= self.retries:
            attempts += 1
            try:
                resp = self.session.post(url, json=payload, timeout=self.timeout_s)
            except requests.Timeout as e:
                last = BackendTimeout(f"{url}: timed out after {self.timeout_s}s", attempts)
                last.__cause__ = e
            except requests.ConnectionError as e:
                last = BackendTimeout(f"{url}: connection failed", attempts)
                last.__cause__ = e
            else:
                if 200 <= resp.status_code < 300:
                    try:
                        return resp.json()
                    except ValueError as e:
                        raise BackendProtocolError(
                            f"{url}: response body is not valid JSON", attempts
                        ) from e
                message = ""
                try:
                    message = resp.json().get("error", "")
                except ValueError:
                    pass
                err = BackendStatusError(
                    f"{url}: status {resp.status_code} {message}".rstrip(),
                    resp.status_code,
                    attempts,
                )
                if resp.status_code < 500:
                    raise err
                last = err
            if attempts <= self.retries:
                time.sleep(self.backoff_s * (2 ** (attempts - 1)))
        assert last is not None
        last.attempts = attempts
        raise last


class HttpGenerator:
    def __init__(self, endpoint: str, vocab_size: int, timeout_ms: int = 10000,
                 retries: int = 2, backoff_s: float = 0.05):
        self.vocab_size = vocab_size
        self._client = _HttpClient(endpoint, timeout_ms, retries, backoff_s)

    def next_logits(self, ids: Sequence[int]) -> np.ndarray:
        body = self._client.post("/v1/logits", ids)
        if "logits" not in body or not isinstance(body["logits"], list):
            raise BackendProtocolError("response has no 'logits' array")
        logits = np.asarray(body["logits"], dtype=float)
        if logits.shape != (self.vocab_size,):
            raise BackendProtocolError(
                f"expected {self.vocab_size} logits, got {logits.shape[0]}"
            )
        return logits


class HttpScorer:
    def __init__(self, endpoint: str, timeout_ms: int = 10000, retries: int = 2,
                 backoff_s: float = 0.05):
        self._client = _HttpClient(endpoint, timeout_ms, retries, backoff_s)

    def score(self, ids: Sequence[int]) -> float:
        body = self._client.post("/v1/score", ids)
        if "score" not in body or not isinstance(body["score"], (int, float)):
            raise BackendProtocolError("response has no numeric 'score'")
        return float(body["score"])
