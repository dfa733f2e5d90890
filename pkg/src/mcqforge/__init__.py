"""Multiple-choice question pipeline: corpus ingestion, prompt assembly,
decoding with repetition penalty, QA-based filtering, text-generation
metrics, and human-evaluation statistics."""

__version__ = "0.1.0"
