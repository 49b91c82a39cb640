"""Per-article semantic drift between two years: cosine distance between
centroids of citing-snippet embedding vectors.

Snippet text windows and embedding vectors cross a JSONL interface so the
encoder stays external; tests use synthetic vectors with planted geometry.

Snippet line schema:  {"codex", "article", "year", "doc_id", "text"}
Vector line schema:   {"codex", "article", "year", "vector"}
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataError,
    DimensionMismatch,
    EmptyBatch,
    NoOccurrences,
    ZeroCentroid,
)

ZERO_NORM_EPS = 1e-12
DEFAULT_SNIPPETS_PER_YEAR = 50
DEFAULT_WINDOW = 500


@dataclass(frozen=True)
class SnippetSet:
    article: tuple
    year: int
    snippets: tuple  # of (doc_id, text)


@dataclass(frozen=True)
class DriftRecord:
    article: tuple
    year_a: int
    year_b: int
    drift: float
    n_a: int
    n_b: int


class EmbeddingBatch:
    """Embedding vectors for one (article, year)."""

    def __init__(self, article, year, vectors):
        self.article = article
        self.year = year
        vecs = np.asarray(vectors, dtype=np.float64)
        if vecs.ndim != 2:
            raise DataError("vectors must form an (n, dim) array")
        if vecs.shape[1] < 2:
            raise DataError("vector dimension must be >= 2")
        if not np.all(np.isfinite(vecs)):
            raise DataError("vectors must be finite")
        self.vectors = vecs

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.vectors.shape[0]


def sample_snippets(
    corpus_texts,
    occurrences,
    article,
    year,
    n=DEFAULT_SNIPPETS_PER_YEAR,
    window=DEFAULT_WINDOW,
    seed=0,
) -> SnippetSet:
    """Up to n citing snippets (±window characters around the citation
    span), sampled uniformly without replacement over occurrences.

    ``occurrences`` yields (doc_id, year, codex, article_number, start, end).
    """
    hits = [
        (doc_id, start, end)
        for doc_id, occ_year, codex, number, start, end in occurrences
        if occ_year == year and (codex, number) == article
    ]
    hits.sort()
    if not hits:
        raise NoOccurrences(f"article {article} never cited in {year}")
    if len(hits) > n:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(hits), size=n, replace=False)
        hits = [hits[i] for i in sorted(pick)]
    snippets = []
    for doc_id, start, end in hits:
        text = corpus_texts[doc_id]
        lo = max(0, start - window)
        hi = min(len(text), end + window)
        snippets.append((doc_id, text[lo:hi]))
    return SnippetSet(article, year, tuple(snippets))


def centroid(batch: EmbeddingBatch) -> np.ndarray:
    """Arithmetic mean vector of the batch."""
    if len(batch) == 0:
        raise EmptyBatch("batch holds no vectors")
    return batch.vectors.mean(axis=0)


def is_zero_centroid(vector) -> bool:
    return float(np.linalg.norm(vector)) < ZERO_NORM_EPS


def drift(batch_a: EmbeddingBatch, batch_b: EmbeddingBatch) -> DriftRecord:
    """1 - cos(centroid_a, centroid_b), clipped into [0, 2]."""
    if batch_a.dim != batch_b.dim:
        raise DimensionMismatch(f"dims differ: {batch_a.dim} vs {batch_b.dim}")
    c_a = centroid(batch_a)
    c_b = centroid(batch_b)
    if is_zero_centroid(c_a) or is_zero_centroid(c_b):
        raise ZeroCentroid("centroid norm below 1e-12")
    cos = float(c_a @ c_b) / (float(np.linalg.norm(c_a)) * float(np.linalg.norm(c_b)))
    value = min(max(1.0 - cos, 0.0), 2.0)
    return DriftRecord(batch_a.article, batch_a.year, batch_b.year, value,
                       len(batch_a), len(batch_b))


def aggregate_drift(records, codex_of=None):
    """(overall mean drift, per-codex mean drift)."""
    records = list(records)
    if not records:
        raise EmptyBatch("no drift records")
    by_codex = {}
    for rec in records:
        codex = codex_of[rec.article] if codex_of is not None else rec.article[0]
        by_codex.setdefault(codex, []).append(rec.drift)
    overall = sum(r.drift for r in records) / len(records)
    return overall, {cx: sum(v) / len(v) for cx, v in sorted(by_codex.items())}


# ---------------------------------------------------------------------------
# JSONL interfaces
# ---------------------------------------------------------------------------

def write_snippets_jsonl(snippet_sets, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ss in snippet_sets:
            codex, number = ss.article
            for doc_id, text in ss.snippets:
                fh.write(
                    json.dumps(
                        {
                            "codex": codex,
                            "article": number,
                            "year": ss.year,
                            "doc_id": doc_id,
                            "text": text,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )


def read_vectors_jsonl(path):
    """{(article, year): EmbeddingBatch} from the vector interface file."""
    grouped = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                key = ((obj["codex"], int(obj["article"])), int(obj["year"]))
                grouped.setdefault(key, []).append(
                    [float(x) for x in obj["vector"]]
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad vector line") from exc
    return {
        (article, year): EmbeddingBatch(article, year, vecs)
        for (article, year), vecs in grouped.items()
    }
