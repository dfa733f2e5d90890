"""Pipeline configuration: one JSON file driving every CLI stage.

Resolution order for the config path: explicit --config flag, then the
MCQFORGE_CONFIG environment variable, then built-in defaults. Paths in
the file are resolved relative to the file itself, and referenced files
must exist at load time so a typo fails before hours of generation.
"""

import json
import os
from dataclasses import dataclass, field

from mcqforge.backends import (
    BackendConfig,
    HttpGenerator,
    HttpScorer,
    MockGenerator,
    MockScorer,
    ScriptedGenerator,
    ScriptedScorer,
)
from mcqforge.decoding import GenerationConfig
from mcqforge.errors import ConfigError

ENV_CONFIG = "MCQFORGE_CONFIG"
BACKEND_ROLES = ("qg", "dg", "qa")


@dataclass(frozen=True)
class HumanEvalParams:
    n_assessors: int = 4
    shared_n: int = 30
    unique_n: int = 70
    seed: int = 0

    def __post_init__(self):
        if self.n_assessors < 2:
            raise ConfigError(f"n_assessors must be >= 2, got {self.n_assessors}")
        if self.shared_n < 0 or self.unique_n < 0:
            raise ConfigError("shared_n and unique_n must be nonnegative")
        if self.shared_n + self.unique_n == 0:
            raise ConfigError("plan would contain no items")


@dataclass
class PipelineConfig:
    vocab_path: str | None = None
    merges_path: str | None = None
    out_dir: str = "out"
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    backends: dict = field(default_factory=dict)
    humaneval: HumanEvalParams = field(default_factory=HumanEvalParams)

    def backend_for(self, role: str) -> BackendConfig:
        if role not in BACKEND_ROLES:
            raise ConfigError(f"unknown backend role {role!r}")
        return self.backends.get(role) or BackendConfig()


def _resolve(base_dir: str, path: str | None) -> str | None:
    if path is None:
        return None
    if os.path.isabs(path):
        return path
    return os.path.normpath(os.path.join(base_dir, path))


def _require_exists(label: str, path: str | None):
    if path is not None and not os.path.exists(path):
        raise ConfigError(f"{label} does not exist: {path}")


def load_config(path: str | None = None) -> PipelineConfig:
    """Load config from path, else $MCQFORGE_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG) or None
    if path is None:
        return PipelineConfig()
    if not os.path.exists(path):
        raise ConfigError(f"config file does not exist: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    base_dir = os.path.dirname(os.path.abspath(path))

    known = {"vocab", "merges", "out_dir", "generation", "backends", "humaneval"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {sorted(unknown)}")

    vocab = _resolve(base_dir, raw.get("vocab"))
    merges = _resolve(base_dir, raw.get("merges"))
    _require_exists("vocab file", vocab)
    _require_exists("merges file", merges)

    try:
        generation = GenerationConfig(**raw.get("generation", {}))
    except TypeError as e:
        raise ConfigError(f"{path}: bad generation section: {e}") from e

    backends = {}
    for role, section in raw.get("backends", {}).items():
        if role not in BACKEND_ROLES:
            raise ConfigError(f"{path}: unknown backend role {role!r}")
        try:
            cfg = BackendConfig(**section)
        except TypeError as e:
            raise ConfigError(f"{path}: bad backend section {role!r}: {e}") from e
        cfg.vocab = _resolve(base_dir, cfg.vocab)
        cfg.merges = _resolve(base_dir, cfg.merges)
        _require_exists(f"backend {role} vocab", cfg.vocab)
        _require_exists(f"backend {role} merges", cfg.merges)
        backends[role] = cfg

    try:
        humaneval = HumanEvalParams(**raw.get("humaneval", {}))
    except TypeError as e:
        raise ConfigError(f"{path}: bad humaneval section: {e}") from e

    out_dir = _resolve(base_dir, raw.get("out_dir", "out"))
    return PipelineConfig(
        vocab_path=vocab,
        merges_path=merges,
        out_dir=out_dir,
        generation=generation,
        backends=backends,
        humaneval=humaneval,
    )


def build_generator(cfg: BackendConfig, vocab_size: int, end_id: int):
    if cfg.kind == "mock":
        return MockGenerator(vocab_size, seed=cfg.seed)
    if cfg.kind == "scripted":
        if not cfg.script:
            raise ConfigError("scripted generator requires a script")
        return ScriptedGenerator(cfg.script, vocab_size, end_id, loop=True)
    return HttpGenerator(cfg.endpoint, vocab_size, cfg.timeout_ms, cfg.retries)


def build_scorer(cfg: BackendConfig):
    if cfg.kind == "mock":
        return MockScorer(seed=cfg.seed)
    if cfg.kind == "scripted":
        if not cfg.script:
            raise ConfigError("scripted scorer requires a script")
        return ScriptedScorer(cfg.script)
    return HttpScorer(cfg.endpoint, cfg.timeout_ms, cfg.retries)
