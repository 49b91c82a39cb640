"""Snippet embedding adapter.

Reads citing-snippet JSONL ({"codex", "article", "year", "doc_id",
"text"}), encodes each snippet with a pluggable multilingual sentence
encoder, and writes one vector line ({"codex", "article", "year",
"vector"}) per input line in the same order. A --fake mode emits
deterministic hash-seeded unit vectors so downstream drift analysis is
testable without model weights.
"""

__version__ = "0.1.0"

from .encoding import AdapterConfig, fake_vector

__all__ = ["__version__", "AdapterConfig", "fake_vector"]
