"""Okapi BM25 retrieval from masked case text to statutory article texts.

Conventional Okapi defaults (k1 = 1.2, b = 0.75) and the +1-smoothed IDF;
the tokenizer lowercases and splits on Unicode letters/digits with no
stemming or stopwords. Evaluation mirrors the leave-one-out candidate
geometry so the co-citation comparison is paired.
"""

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .cocitation import METHOD_AA, build_cocitation
from .errors import DataError, EmptyStore, NoTextOverlap
from .evaluation import RankTable, evaluate_cases, sample_cases
from .parsing import strip_citations

METHOD_BM25 = "BM25"

_TOKEN_RX = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


def tokenize(text: str) -> list:
    return _TOKEN_RX.findall(text.lower())


class ArticleTextStore:
    """Article full texts keyed by (codex, article)."""

    def __init__(self, entries):
        self.entries = dict(entries)
        for aid, text in self.entries.items():
            if not text or not text.strip():
                raise DataError(f"empty article text for {aid}")

    def __len__(self):
        return len(self.entries)

    def __contains__(self, aid):
        return aid in self.entries

    @classmethod
    def from_jsonl(cls, path):
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    entries[(obj["codex"], int(obj["article"]))] = obj["text"]
                except (KeyError, ValueError) as exc:
                    raise DataError(f"{path}:{lineno}: bad article text line") from exc
        return cls(entries)


@dataclass
class Bm25Index:
    doc_ids: list
    doc_len: dict
    avg_len: float
    doc_freq: dict
    postings: dict
    n_docs: int
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B
    _tf: dict = field(default=None, repr=False)


def build_index(store: ArticleTextStore, k1=DEFAULT_K1, b=DEFAULT_B) -> Bm25Index:
    """Inverted index with term frequencies and document lengths."""
    if len(store) == 0:
        raise EmptyStore("article text store is empty")
    doc_ids = sorted(store.entries)
    doc_len = {}
    postings = {}
    tf_by_doc = {}
    for aid in doc_ids:
        tokens = tokenize(store.entries[aid])
        doc_len[aid] = len(tokens)
        tf = Counter(tokens)
        tf_by_doc[aid] = tf
        for tok, count in tf.items():
            postings.setdefault(tok, []).append((aid, count))
    doc_freq = {tok: len(plist) for tok, plist in postings.items()}
    avg_len = sum(doc_len.values()) / len(doc_ids)
    return Bm25Index(
        doc_ids, doc_len, avg_len, doc_freq, postings, len(doc_ids), k1, b, tf_by_doc
    )


def idf(index: Bm25Index, token: str) -> float:
    df = index.doc_freq.get(token, 0)
    return math.log(1.0 + (index.n_docs - df + 0.5) / (df + 0.5))


def bm25_scores(query_text: str, index: Bm25Index, candidates) -> dict:
    """Okapi scores for every candidate; sums over each query token
    occurrence (repeats count)."""
    cand = set(candidates)
    scores = {aid: 0.0 for aid in cand}
    for token in tokenize(query_text):
        df = index.doc_freq.get(token)
        if not df:
            continue
        token_idf = idf(index, token)
        for aid, tf in index.postings[token]:
            if aid not in cand:
                continue
            length = index.doc_len[aid]
            denom = tf + index.k1 * (1.0 - index.b + index.b * length / index.avg_len)
            scores[aid] += token_idf * tf * (index.k1 + 1.0) / denom
    return scores


def bm25_rank(query_text: str, index: Bm25Index, candidates) -> list:
    """Candidates sorted by descending score (ties by article id)."""
    scores = bm25_scores(query_text, index, candidates)
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def tie_averaged_rank(scores: dict, target) -> float:
    """Competition rank of the target with half-credit for ties."""
    ts = scores[target]
    gt = sum(1 for aid, s in scores.items() if aid != target and s > ts)
    eq = sum(1 for aid, s in scores.items() if aid != target and s == ts)
    return 1.0 + gt + 0.5 * eq, ts


def paired_text_eval(
    snapshot,
    store,
    corpus_texts,
    table,
    sample_n=2000,
    seed=0,
    k1=DEFAULT_K1,
    b=DEFAULT_B,
    jobs=1,
):
    """BM25 and target-restricted Adamic-Adar over the same predictions.

    Targets are the sampled cases' cited articles inside the intersection
    of the snapshot vocabulary and the text store. BM25 candidates are the
    intersection minus the case's other cited intersection articles; the
    AA run keeps its normal candidate geometry but only intersection
    targets are retained, so both record sets share (doc_id, target) keys.
    """
    inter = [a for a in snapshot.articles if a in store]
    if not inter:
        raise NoTextOverlap("no article has both snapshot frequency and text")
    inter_idx = {snapshot.article_index[a] for a in inter}
    index = build_index(
        ArticleTextStore({a: store.entries[a] for a in inter}), k1=k1, b=b
    )

    sampled = sample_cases(snapshot, sample_n, seed)
    cc = build_cocitation(snapshot.M)
    aa_table = evaluate_cases(
        snapshot, cc, sampled, methods=(METHOD_AA,), seed=seed, jobs=jobs
    )[METHOD_AA].filter_targets(inter_idx)

    doc_ids = []
    case_indices = []
    targets = []
    ctx_sizes = []
    ranks = []
    scores_out = []
    for ci in sampled:
        row = int(ci)
        doc = snapshot.cases[row]
        arts = snapshot.case_articles(row)
        cited_inter = [int(a) for a in arts if int(a) in inter_idx]
        if not cited_inter:
            continue
        text = corpus_texts.get(doc)
        if text is None:
            raise DataError(f"no text for case {doc}")
        query = strip_citations(text, table) if table is not None else text
        for t in cited_inter:
            others = {snapshot.articles[o] for o in cited_inter if o != t}
            candidates = [a for a in inter if a not in others]
            cand_scores = bm25_scores(query, index, candidates)
            rank, ts = tie_averaged_rank(cand_scores, snapshot.articles[t])
            doc_ids.append(doc)
            case_indices.append(row)
            targets.append(t)
            ctx_sizes.append(len(arts) - 1)
            ranks.append(rank)
            scores_out.append(ts)

    bm25_table = RankTable(
        METHOD_BM25,
        doc_ids,
        np.asarray(case_indices, dtype=np.int64),
        np.asarray(targets, dtype=np.int64),
        np.asarray(ctx_sizes, dtype=np.int64),
        np.asarray(ranks, dtype=np.float64),
        np.asarray(scores_out, dtype=np.float64),
        seed,
    )
    return bm25_table, aa_table, inter


def evaluate_bm25(snapshot, store, corpus_texts, table, sample_n=2000, seed=0,
                  k1=DEFAULT_K1, b=DEFAULT_B, jobs=1, bootstrap_b=1000):
    """BM25 metrics on the intersection targets (see paired_text_eval)."""
    from .evaluation import compute_metrics

    bm25_table, _, _ = paired_text_eval(
        snapshot, store, corpus_texts, table, sample_n, seed, k1, b, jobs
    )
    return compute_metrics(bm25_table, bootstrap_b=bootstrap_b, seed=seed)
