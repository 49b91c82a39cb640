"""Annual evaluation snapshots: year partitioning, article/case filters,
and the binary case-article incidence matrix."""

import csv
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DataError, EmptySnapshot

# ArticleId is a (codex_id, article_number) tuple; tuples sort
# lexicographically, which is the canonical order everywhere.

DEFAULT_MIN_CITATIONS = 50
DEFAULT_VOCAB_CAP = 5000
DEFAULT_CASE_MIN = 3
DEFAULT_CASE_MAX = 200


@dataclass(frozen=True)
class DecisionRecord:
    """One decision: deduplicated citation set plus raw occurrence counts.

    ``citations`` feeds the binary incidence matrix; ``counts`` (when
    present) carries within-decision citation multiplicity, which only
    matters for the article frequency filter.
    """

    doc_id: str
    year: int
    citations: frozenset
    counts: dict = field(default=None, compare=False)

    @classmethod
    def from_occurrences(cls, doc_id, year, occurrences):
        counts = Counter(occurrences)
        return cls(doc_id, year, frozenset(counts), dict(counts))

    def occurrence_counts(self):
        if self.counts is not None:
            return self.counts
        return {aid: 1 for aid in self.citations}


class Snapshot:
    """One evaluation year: vocabulary V, case set U, incidence matrix M."""

    def __init__(self, year, articles, cases, M, citation_counts):
        self.year = year
        self.articles = list(articles)
        self.cases = list(cases)
        self.M = M
        self.citation_counts = np.asarray(citation_counts, dtype=np.int64)
        self._article_index = None

    @property
    def n_articles(self):
        return len(self.articles)

    @property
    def n_cases(self):
        return len(self.cases)

    @property
    def article_index(self):
        if self._article_index is None:
            self._article_index = {a: i for i, a in enumerate(self.articles)}
        return self._article_index

    def case_articles(self, row):
        """Sorted vocabulary indices cited by one case."""
        sl = slice(self.M.indptr[row], self.M.indptr[row + 1])
        return self.M.indices[sl]

    def count_of(self, article_id):
        return int(self.citation_counts[self.article_index[article_id]])


def partition_by_year(corpus) -> dict:
    """Group decisions by their year field; every record lands in exactly
    one partition."""
    parts = {}
    for rec in corpus:
        parts.setdefault(rec.year, []).append(rec)
    return parts


def build_snapshot(
    decisions,
    year,
    min_citations=DEFAULT_MIN_CITATIONS,
    vocab_cap=DEFAULT_VOCAB_CAP,
    case_min=DEFAULT_CASE_MIN,
    case_max=DEFAULT_CASE_MAX,
) -> Snapshot:
    """Apply the article and case filters for one year and assemble M.

    Article occurrence totals are counted over all decisions of the year
    first; the case filter then runs once against that fixed vocabulary.
    Ties at the vocab_cap boundary break lexicographically so snapshots
    are reproducible regardless of input order.
    """
    decisions = list(decisions)
    totals = Counter()
    for rec in decisions:
        if rec.year != year:
            raise DataError(f"decision {rec.doc_id} has year {rec.year}, expected {year}")
        totals.update(rec.occurrence_counts())

    eligible = [aid for aid, c in totals.items() if c >= min_citations]
    eligible.sort(key=lambda aid: (-totals[aid], aid))
    articles = sorted(eligible[:vocab_cap])
    index = {aid: i for i, aid in enumerate(articles)}

    kept = []
    for rec in decisions:
        cited = sorted(index[a] for a in rec.citations if a in index)
        if case_min <= len(cited) <= case_max:
            kept.append((rec.doc_id, cited))
    if not kept:
        raise EmptySnapshot(f"no case survived the filters for year {year}")
    kept.sort(key=lambda t: t[0])
    doc_ids = [doc for doc, _ in kept]
    if len(set(doc_ids)) != len(doc_ids):
        raise DataError(f"duplicate doc_id among retained cases for year {year}")

    indptr = np.zeros(len(kept) + 1, dtype=np.int64)
    cols = []
    for i, (_, cited) in enumerate(kept):
        cols.extend(cited)
        indptr[i + 1] = len(cols)
    M = sp.csr_matrix(
        (np.ones(len(cols), dtype=np.int32), np.asarray(cols, dtype=np.int64), indptr),
        shape=(len(kept), len(articles)),
    )
    counts = np.array([totals[a] for a in articles], dtype=np.int64)
    return Snapshot(year, articles, doc_ids, M, counts)


# ---------------------------------------------------------------------------
# persistence: articles.csv / cases.csv / incidence.csv
# ---------------------------------------------------------------------------

def save_snapshot(snapshot, directory, header_lines=()):
    import os

    os.makedirs(directory, exist_ok=True)

    def _write(name, fieldnames, rows):
        path = os.path.join(directory, name)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            writer = csv.writer(fh)
            writer.writerow(fieldnames)
            writer.writerows(rows)
        os.replace(tmp, path)

    _write(
        "articles.csv",
        ["codex", "article", "citation_count"],
        [
            (codex, number, int(snapshot.citation_counts[i]))
            for i, (codex, number) in enumerate(snapshot.articles)
        ],
    )
    _write("cases.csv", ["doc_id"], [(doc,) for doc in snapshot.cases])
    coo = snapshot.M.tocoo()
    order = np.lexsort((coo.col, coo.row))
    _write(
        "incidence.csv",
        ["case_index", "article_index"],
        [(int(coo.row[k]), int(coo.col[k])) for k in order],
    )
    with open(os.path.join(directory, "snapshot.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"year={snapshot.year}\n")


def load_snapshot(directory) -> Snapshot:
    import os

    def _rows(name):
        with open(os.path.join(directory, name), encoding="utf-8", newline="") as fh:
            reader = csv.reader(line for line in fh if not line.startswith("#"))
            header = next(reader)
            return header, list(reader)

    _, article_rows = _rows("articles.csv")
    articles = [(codex, int(num)) for codex, num, _ in article_rows]
    counts = np.array([int(c) for _, _, c in article_rows], dtype=np.int64)
    _, case_rows = _rows("cases.csv")
    cases = [doc for (doc,) in case_rows]
    _, inc_rows = _rows("incidence.csv")
    rows = np.array([int(r) for r, _ in inc_rows], dtype=np.int64)
    cols = np.array([int(c) for _, c in inc_rows], dtype=np.int64)
    M = sp.csr_matrix(
        (np.ones(len(rows), dtype=np.int32), (rows, cols)),
        shape=(len(cases), len(articles)),
    )
    M.sort_indices()
    with open(os.path.join(directory, "snapshot.txt"), encoding="utf-8") as fh:
        year = int(fh.read().strip().split("=", 1)[1])
    return Snapshot(year, articles, cases, M, counts)
