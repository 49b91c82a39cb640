"""Snippet encoding: a pluggable sentence encoder plus a fake mode."""

import hashlib
from dataclasses import dataclass

import numpy as np

# E5-style encoders distinguish query and passage inputs; snippets are
# documents, so the passage convention applies
PASSAGE_PREFIX = "passage: "

DEFAULT_MODEL = "intfloat/multilingual-e5-large"
FAKE_DIM = 32


@dataclass(frozen=True)
class AdapterConfig:
    model_name: str = DEFAULT_MODEL
    batch_size: int = 32
    max_chars: int = 1000
    device: str = "cpu"

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_chars < 1:
            raise ValueError("max_chars must be >= 1")


def fake_vector(text: str, seed: int, dim: int = FAKE_DIM) -> np.ndarray:
    """Deterministic unit vector depending only on (text, seed)."""
    digest = hashlib.sha256(f"{seed}:{text}".encode("utf-8")).digest()
    entropy = [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4)]
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    vec = rng.normal(size=dim)
    return vec / np.linalg.norm(vec)


class ModelEncoder:
    """Thin wrapper over a sentence-transformers encoder."""

    def __init__(self, config: AdapterConfig):
        from sentence_transformers import SentenceTransformer

        self.config = config
        self.model = SentenceTransformer(config.model_name, device=config.device)

    def encode(self, texts):
        prefixed = [PASSAGE_PREFIX + t[: self.config.max_chars] for t in texts]
        vectors = self.model.encode(
            prefixed,
            batch_size=self.config.batch_size,
            convert_to_numpy=True,
            show_progress_bar=False,
        )
        return np.asarray(vectors, dtype=np.float64)


class FakeEncoder:
    def __init__(self, config: AdapterConfig, seed: int, dim: int = FAKE_DIM):
        self.config = config
        self.seed = seed
        self.dim = dim

    def encode(self, texts):
        return np.stack(
            [fake_vector(t[: self.config.max_chars], self.seed, self.dim) for t in texts]
        )
