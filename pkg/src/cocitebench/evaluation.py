"""Leave-one-out evaluation: case sampling, ranking, metrics, bootstrap
confidence intervals and paired significance."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cocitation import (
    ALL_METHODS,
    METHOD_AA,
    METHOD_CN,
    METHOD_DEGREE,
    METHOD_RANDOM,
)
from .errors import EmptyInput, InvalidCase, MisalignedInputs
from .kernels import rank_against_scores, rank_case_batch

HIT_KS = (1, 5, 10, 20)

# Returned by paired_z when the paired differences have zero spread but a
# nonzero mean; finite so reports stay JSON-serializable.
Z_SENTINEL = 1e12

DEFAULT_SAMPLE_N = 200_000
DEFAULT_BOOTSTRAP_B = 1000


@dataclass(frozen=True)
class PredictionRecord:
    """One masked-target ranking outcome."""

    doc_id: str
    target: int
    context_size: int
    method: str
    rank: float
    target_score: float


@dataclass(frozen=True)
class MetricsReport:
    n_predictions: int
    hit_at: dict
    mrr: float
    ci_low: float
    ci_high: float
    seed: int

    def __post_init__(self):
        ks = sorted(self.hit_at)
        vals = [self.hit_at[k] for k in ks]
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("hit@k must be monotone in k")
        if not (self.ci_low <= self.mrr <= self.ci_high):
            raise ValueError("CI must contain the point MRR")


def sample_cases(snapshot, n=DEFAULT_SAMPLE_N, seed=0):
    """min(n, |U|) distinct case indices, uniform without replacement,
    sorted ascending."""
    return sample_from(np.arange(snapshot.n_cases, dtype=np.int64), n, seed)


def sample_from(indices, n, seed):
    if n < 1:
        raise ValueError("n must be >= 1")
    indices = np.asarray(indices, dtype=np.int64)
    if n >= len(indices):
        return np.sort(indices)
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(indices), size=n, replace=False)
    return np.sort(indices[pick])


def _random_scores(base_seed, case_index, target):
    seq = np.random.SeedSequence([int(base_seed), int(case_index), int(target)])
    return np.random.default_rng(seq)


def _evaluate_chunk(snapshot, cc, case_indices, methods, seed):
    """Rank all targets of the given cases; returns per-method arrays."""
    arrays = cc.scoring_arrays()
    flat = []
    ptr = [0]
    rows = []
    for ci in case_indices:
        arts = snapshot.case_articles(int(ci))
        if len(arts) < 3:
            raise InvalidCase(
                f"case {snapshot.cases[int(ci)]} cites {len(arts)} vocabulary articles"
            )
        flat.extend(int(a) for a in arts)
        ptr.append(len(flat))
        rows.append(int(ci))
    cases_flat = np.asarray(flat, dtype=np.int64)
    case_ptr = np.asarray(ptr, dtype=np.int64)

    do_cn = METHOD_CN in methods
    do_aa = METHOD_AA in methods
    do_deg = METHOD_DEGREE in methods
    cn, aa, dg = (None, None, None)
    if do_cn or do_aa or do_deg:
        cn, aa, dg = rank_case_batch(
            arrays["indptr"], arrays["indices"], arrays["data"],
            arrays["data_aa"], arrays["dscore"],
            cases_flat, case_ptr, do_cn, do_aa, do_deg,
        )

    result = {}
    if do_cn:
        result[METHOD_CN] = cn
    if do_aa:
        result[METHOD_AA] = aa
    if do_deg:
        result[METHOD_DEGREE] = dg
    if METHOD_RANDOM in methods:
        n_out = len(cases_flat)
        ranks = np.empty(n_out, dtype=np.float64)
        scores = np.empty(n_out, dtype=np.float64)
        V = cc.n_articles
        for k, ci in enumerate(rows):
            lo, hi = int(case_ptr[k]), int(case_ptr[k + 1])
            S = cases_flat[lo:hi]
            for j in range(lo, hi):
                t = int(cases_flat[j])
                rng = _random_scores(seed, ci, t)
                vec = rng.random(V)
                context = S[S != t]
                ranks[j], scores[j] = rank_against_scores(vec, t, context)
        result[METHOD_RANDOM] = (ranks, scores)
    return rows, cases_flat, case_ptr, result


@dataclass
class RankTable:
    """Struct-of-arrays result of an evaluation run for one method."""

    method: str
    doc_ids: list
    case_indices: np.ndarray
    targets: np.ndarray
    context_sizes: np.ndarray
    ranks: np.ndarray
    scores: np.ndarray
    seed: int = 0

    def __len__(self):
        return len(self.ranks)

    def to_records(self):
        return [
            PredictionRecord(
                self.doc_ids[i],
                int(self.targets[i]),
                int(self.context_sizes[i]),
                self.method,
                float(self.ranks[i]),
                float(self.scores[i]),
            )
            for i in range(len(self.ranks))
        ]

    def filter_targets(self, keep_indices):
        """Sub-table with only targets in the given vocabulary index set."""
        keep = np.isin(self.targets, np.fromiter(keep_indices, dtype=np.int64))
        return RankTable(
            self.method,
            [d for d, k in zip(self.doc_ids, keep) if k],
            self.case_indices[keep],
            self.targets[keep],
            self.context_sizes[keep],
            self.ranks[keep],
            self.scores[keep],
            self.seed,
        )


def _chunk_worker(args):
    snapshot, cc, chunk, methods, seed = args
    return _evaluate_chunk(snapshot, cc, chunk, methods, seed)


def evaluate_cases(snapshot, cc, case_indices, methods=(METHOD_AA,), seed=0, jobs=1):
    """Evaluate sampled cases; returns {method: RankTable}.

    Work is data-parallel over case chunks; chunk results concatenate in
    submission order, so aggregates do not depend on the worker count.
    """
    for m in methods:
        if m not in ALL_METHODS:
            raise ValueError(f"unknown method {m!r}")
    case_indices = np.asarray(case_indices, dtype=np.int64)
    jobs = max(1, int(jobs))
    if jobs == 1 or len(case_indices) < 2 * jobs:
        parts = [_evaluate_chunk(snapshot, cc, case_indices, methods, seed)]
    else:
        chunks = np.array_split(case_indices, jobs)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(
                pool.map(_chunk_worker, [(snapshot, cc, ch, methods, seed) for ch in chunks])
            )

    tables = {}
    doc_ids = []
    case_col = []
    targets = []
    ctx_sizes = []
    for rows, cases_flat, case_ptr, _ in parts:
        for k, ci in enumerate(rows):
            lo, hi = int(case_ptr[k]), int(case_ptr[k + 1])
            size = hi - lo
            doc = snapshot.cases[ci]
            for j in range(lo, hi):
                doc_ids.append(doc)
                case_col.append(ci)
                targets.append(int(cases_flat[j]))
                ctx_sizes.append(size - 1)
    case_col = np.asarray(case_col, dtype=np.int64)
    targets_arr = np.asarray(targets, dtype=np.int64)
    ctx_arr = np.asarray(ctx_sizes, dtype=np.int64)
    for m in methods:
        ranks = np.concatenate([p[3][m][0] for p in parts])
        scores = np.concatenate([p[3][m][1] for p in parts])
        tables[m] = RankTable(m, doc_ids, case_col, targets_arr, ctx_arr, ranks, scores, seed)
    return tables


def evaluate_case(case, snapshot, cc, methods=(METHOD_AA,), seed=0):
    """LOO records for a single case (one record per target and method)."""
    tables = evaluate_cases(snapshot, cc, [case], methods=methods, seed=seed)
    records = []
    for m in methods:
        records.extend(tables[m].to_records())
    return records


def evaluate_snapshot(snapshot, cc, methods=(METHOD_AA,), sample_n=DEFAULT_SAMPLE_N,
                      seed=0, jobs=1):
    """Sample cases and evaluate them: the standard protocol for one year."""
    cases = sample_cases(snapshot, sample_n, seed)
    return evaluate_cases(snapshot, cc, cases, methods=methods, seed=seed, jobs=jobs)


# ---------------------------------------------------------------------------
# aggregates
# ---------------------------------------------------------------------------

def _ranks_of(records):
    if isinstance(records, RankTable):
        return records.ranks
    if len(records) and isinstance(records[0], PredictionRecord):
        methods = {r.method for r in records}
        if len(methods) > 1:
            raise ValueError(f"records mix methods: {sorted(methods)}")
        return np.asarray([r.rank for r in records], dtype=np.float64)
    return np.asarray(records, dtype=np.float64)


def compute_metrics(records, bootstrap_b=DEFAULT_BOOTSTRAP_B, level=0.95, seed=0):
    """Hit@k, MRR and a percentile-bootstrap CI over prediction records."""
    ranks = _ranks_of(records)
    if len(ranks) == 0:
        raise EmptyInput("no prediction records")
    hit_at = {k: float(np.mean(ranks <= k)) for k in HIT_KS}
    recip = 1.0 / ranks
    mrr = float(recip.mean())
    low, high = bootstrap_ci(ranks, B=bootstrap_b, level=level, seed=seed)
    # percentile bootstrap of a mean brackets the point estimate for any
    # non-degenerate B; guard anyway so the report invariant always holds
    low = min(low, mrr)
    high = max(high, mrr)
    return MetricsReport(len(ranks), hit_at, mrr, low, high, seed)


def bootstrap_ci(records, B=DEFAULT_BOOTSTRAP_B, level=0.95, seed=0):
    """Percentile bootstrap interval for the MRR."""
    ranks = _ranks_of(records)
    n = len(ranks)
    if n == 0:
        raise EmptyInput("no prediction records")
    recip = 1.0 / ranks
    rng = np.random.default_rng(seed)
    boots = np.empty(B, dtype=np.float64)
    for b in range(B):
        idx = rng.integers(0, n, size=n)
        boots[b] = recip[idx].mean()
    alpha = (1.0 - level) / 2.0
    low, high = np.percentile(boots, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return float(low), float(high)


def _key_map(records):
    if isinstance(records, RankTable):
        keys = list(zip(records.doc_ids, records.targets.tolist()))
        ranks = records.ranks
    else:
        keys = [(r.doc_id, r.target) for r in records]
        ranks = np.asarray([r.rank for r in records], dtype=np.float64)
    if len(set(keys)) != len(keys):
        raise MisalignedInputs("duplicate (doc_id, target) keys")
    return dict(zip(keys, ranks.tolist()))


def paired_z(records_a, records_b) -> float:
    """Paired z over reciprocal-rank differences aligned on (doc_id, target).

    Returns 0 when the differences are identically zero, and a signed
    Z_SENTINEL when they have zero spread but nonzero mean.
    """
    map_a = _key_map(records_a)
    map_b = _key_map(records_b)
    if set(map_a) != set(map_b):
        raise MisalignedInputs("record key sets differ")
    keys = sorted(map_a)
    deltas = np.array([1.0 / map_a[k] - 1.0 / map_b[k] for k in keys])
    n = len(deltas)
    mean = float(deltas.mean())
    sd = float(deltas.std(ddof=1)) if n > 1 else 0.0
    if sd == 0.0:
        return 0.0 if mean == 0.0 else math.copysign(Z_SENTINEL, mean)
    return mean / (sd / math.sqrt(n))
