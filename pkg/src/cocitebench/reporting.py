"""Benchmark-format output files and plot-ready data emission.

CSV is canonical; a parquet mirror with identical content is written when
a parquet engine is importable. Every file starts with a `# key=value`
metadata line (seed, config digest, tool version) so runs are traceable.
"""

import csv
import os

import numpy as np

from . import __version__
from .ablation import DifficultyBins, bin_article_counts
from .errors import NoReports

TEMPORAL_COLUMNS = [
    "year", "method", "n_predictions", "hit1", "hit5", "hit10", "hit20",
    "mrr", "ci_low", "ci_high",
]
STRAT_COLUMNS = ["bin", "articles", "predictions", "hit1", "hit5", "hit10", "hit20", "mrr"]
ARTICLE_COLUMNS = ["codex", "article", "n_predictions", "hit1", "hit5", "hit10", "hit20", "mrr"]
JACCARD_COLUMNS = ["codex_i", "article_i", "codex_j", "article_j", "cocitations", "jaccard"]


def metadata_line(seed, config_digest):
    return f"seed={seed} config_digest={config_digest} tool_version={__version__}"


def write_csv(path, columns, rows, meta=""):
    """Atomic CSV write (temp file + rename) with a comment header."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        if meta:
            fh.write(f"# {meta}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)
    os.replace(tmp, path)


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader)
        return header, list(reader)


def mirror_parquet(csv_path):
    """Optional columnar mirror; quietly skipped without an engine."""
    try:
        import pandas as pd

        header, rows = read_csv(csv_path)
        frame = pd.DataFrame(rows, columns=header)
        frame.to_parquet(csv_path.rsplit(".", 1)[0] + ".parquet")
        return True
    except Exception:
        return False


def report_row(year, method, report):
    return [
        year, method, report.n_predictions,
        repr(report.hit_at[1]), repr(report.hit_at[5]),
        repr(report.hit_at[10]), repr(report.hit_at[20]),
        repr(report.mrr), repr(report.ci_low), repr(report.ci_high),
    ]


def stratification_rows(per_bin_reports, snapshot, bins=DifficultyBins()):
    counts = bin_article_counts(snapshot, bins)
    rows = []
    for label in bins.labels:
        rep = per_bin_reports.get(label)
        if rep is None:
            continue
        rows.append([
            label, counts.get(label, 0), rep.n_predictions,
            repr(rep.hit_at[1]), repr(rep.hit_at[5]),
            repr(rep.hit_at[10]), repr(rep.hit_at[20]), repr(rep.mrr),
        ])
    return rows


def per_article_rows(table, snapshot):
    """Per-target-article aggregates of one method's rank table."""
    targets = np.asarray(table.targets)
    ranks = np.asarray(table.ranks)
    rows = []
    for t in np.unique(targets):
        sub = ranks[targets == t]
        codex, number = snapshot.articles[int(t)]
        rows.append([
            codex, number, len(sub),
            repr(float(np.mean(sub <= 1))), repr(float(np.mean(sub <= 5))),
            repr(float(np.mean(sub <= 10))), repr(float(np.mean(sub <= 20))),
            repr(float(np.mean(1.0 / sub))),
        ])
    return rows


def jaccard_rows(cc, articles, top_n=20):
    """J(i, j) = C_ij / (d_i + d_j - C_ij) over the top_n most-cited
    articles; diagonal omitted, each unordered pair emitted once."""
    d = cc.d
    order = sorted(range(len(articles)), key=lambda i: (-int(d[i]), articles[i]))
    chosen = sorted(order[:top_n])
    C = cc.C
    rows = []
    for pos_i, i in enumerate(chosen):
        for j in chosen[pos_i + 1 :]:
            cij = int(C[i, j])
            union = int(d[i]) + int(d[j]) - cij
            jac = cij / union if union else 0.0
            rows.append([
                articles[i][0], articles[i][1],
                articles[j][0], articles[j][1],
                cij, repr(jac),
            ])
    return rows


def emit_reports(
    out_dir,
    temporal_rows=None,
    strat_rows=None,
    article_rows=None,
    jaccard=None,
    meta="",
    parquet=False,
):
    """Write the benchmark-format files; at least one input must exist."""
    if not any(x for x in (temporal_rows, strat_rows, article_rows, jaccard)):
        raise NoReports("nothing to emit")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if temporal_rows:
        path = os.path.join(out_dir, "temporal_metrics.csv")
        write_csv(path, TEMPORAL_COLUMNS, temporal_rows, meta)
        if parquet:
            mirror_parquet(path)
        written.append(path)
    if strat_rows:
        path = os.path.join(out_dir, "difficulty_stratification.csv")
        write_csv(path, STRAT_COLUMNS, strat_rows, meta)
        written.append(path)
    if article_rows:
        path = os.path.join(out_dir, "article_retrieval_performance.csv")
        write_csv(path, ARTICLE_COLUMNS, article_rows, meta)
        if parquet:
            mirror_parquet(path)
        written.append(path)
    if jaccard:
        path = os.path.join(out_dir, "cocitation_jaccard.csv")
        write_csv(path, JACCARD_COLUMNS, jaccard, meta)
        written.append(path)
    return written
