"""Ablation controls: fixed-article vocabulary, temporal train/test split,
difficulty-bin stratification, and per-codex breakdowns."""

import warnings
from dataclasses import dataclass

import numpy as np

from .cocitation import METHOD_AA, build_cocitation
from .errors import DegenerateSplit, EmptyIntersectionWarning
from .evaluation import (
    DEFAULT_BOOTSTRAP_B,
    DEFAULT_SAMPLE_N,
    compute_metrics,
    evaluate_cases,
    sample_cases,
    sample_from,
)


@dataclass(frozen=True)
class DifficultyBins:
    """Citation-frequency strata; bins are half-open (lo, hi] intervals so
    an article with exactly 1,000 citations falls in Low, 10,000 in Mid."""

    boundaries: tuple = (
        ("Rare", 0, 100),
        ("Low", 100, 1_000),
        ("Mid", 1_000, 10_000),
        ("High", 10_000, 100_000),
        ("Hub", 100_000, None),
    )

    def __post_init__(self):
        prev_hi = None
        for i, (label, lo, hi) in enumerate(self.boundaries):
            if i == 0 and lo > 0:
                raise ValueError("first bin must start at or below 1 citation")
            if prev_hi is not None and lo != prev_hi:
                raise ValueError(f"gap or overlap before bin {label!r}")
            if hi is not None and hi <= lo:
                raise ValueError(f"bin {label!r} is empty")
            prev_hi = hi
        if prev_hi is not None:
            raise ValueError("last bin must be unbounded above")

    @property
    def labels(self):
        return [label for label, _, _ in self.boundaries]

    def bin_of(self, count):
        for label, lo, hi in self.boundaries:
            if count > lo and (hi is None or count <= hi):
                return label
        raise ValueError(f"count {count} falls in no bin")


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split by document-id order within a year."""

    train_fraction: float = 0.5
    order_key: str = "doc_id"

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if self.order_key != "doc_id":
            raise ValueError("only doc_id ordering is supported")


def fixed_vocab(snap_a, snap_b, min_citations=50):
    """Articles meeting the citation floor in both snapshots."""
    counts_a = {a: int(c) for a, c in zip(snap_a.articles, snap_a.citation_counts)}
    counts_b = {a: int(c) for a, c in zip(snap_b.articles, snap_b.citation_counts)}
    shared = {
        a
        for a in set(counts_a) & set(counts_b)
        if counts_a[a] >= min_citations and counts_b[a] >= min_citations
    }
    if not shared:
        warnings.warn(
            "fixed vocabulary intersection is empty", EmptyIntersectionWarning
        )
    return shared


def evaluate_fixed(
    snapshots,
    shared,
    method=METHOD_AA,
    sample_n=DEFAULT_SAMPLE_N,
    seed=0,
    jobs=1,
    bootstrap_b=DEFAULT_BOOTSTRAP_B,
):
    """Standard LOO per snapshot, but only predictions whose target lies in
    the shared set are retained. Contexts and candidates stay unrestricted,
    so the record multiset is a sub-multiset of the plain run's."""
    if not shared:
        raise ValueError("shared article set must be non-empty")
    out = {}
    for snap in snapshots:
        cc = build_cocitation(snap.M)
        tables = evaluate_cases(
            snap, cc, sample_cases(snap, sample_n, seed), methods=(method,),
            seed=seed, jobs=jobs,
        )
        keep = {snap.article_index[a] for a in shared if a in snap.article_index}
        out[snap.year] = compute_metrics(
            tables[method].filter_targets(keep), bootstrap_b=bootstrap_b, seed=seed
        )
    return out


def split_cases(snapshot, spec=SplitSpec()):
    """(train_rows, test_rows) by doc_id order; cases are already sorted."""
    n = snapshot.n_cases
    n_train = int(n * spec.train_fraction)
    if n_train == 0 or n_train == n:
        raise DegenerateSplit(f"split leaves an empty half (n={n})")
    rows = np.arange(n, dtype=np.int64)
    return rows[:n_train], rows[n_train:]


def temporal_split_eval(
    snapshot,
    spec=SplitSpec(),
    method=METHOD_AA,
    sample_n=DEFAULT_SAMPLE_N,
    seed=0,
    jobs=1,
    bootstrap_b=DEFAULT_BOOTSTRAP_B,
    return_table=False,
):
    """Rebuild C and d from the train half only, evaluate on test cases.

    Test contexts still come from each test case's own citations; only the
    co-citation statistics are restricted to the training half.
    """
    train_rows, test_rows = split_cases(snapshot, spec)
    cc_train = build_cocitation(snapshot.M[train_rows])
    sampled = sample_from(test_rows, sample_n, seed)
    tables = evaluate_cases(
        snapshot, cc_train, sampled, methods=(method,), seed=seed, jobs=jobs
    )
    report = compute_metrics(tables[method], bootstrap_b=bootstrap_b, seed=seed)
    if return_table:
        return report, tables[method]
    return report


def _group_reports(table, groups, bootstrap_b, seed):
    out = {}
    for label, keep_mask in groups:
        if not np.any(keep_mask):
            continue
        sub = np.asarray(table.ranks)[keep_mask]
        out[label] = compute_metrics(sub, bootstrap_b=bootstrap_b, seed=seed)
    return out


def stratify(records, snapshot, bins=DifficultyBins(), bootstrap_b=DEFAULT_BOOTSTRAP_B,
             seed=0):
    """Per-difficulty-bin metrics keyed by the target article's raw
    citation count in the snapshot."""
    table = records
    target_counts = snapshot.citation_counts[np.asarray(table.targets)]
    labels = np.array([bins.bin_of(int(c)) for c in target_counts])
    groups = [(label, labels == label) for label in bins.labels]
    return _group_reports(table, groups, bootstrap_b, seed)


def per_codex(records, snapshot, bootstrap_b=DEFAULT_BOOTSTRAP_B, seed=0):
    """Per-codex metrics grouped by the target article's codex."""
    table = records
    codices = np.array([snapshot.articles[t][0] for t in np.asarray(table.targets)])
    labels = sorted(set(codices.tolist()))
    groups = [(label, codices == label) for label in labels]
    return _group_reports(table, groups, bootstrap_b, seed)


def bin_article_counts(snapshot, bins=DifficultyBins()):
    """Number of vocabulary articles per difficulty bin."""
    counts = {label: 0 for label in bins.labels}
    for c in snapshot.citation_counts:
        counts[bins.bin_of(int(c))] += 1
    return counts
