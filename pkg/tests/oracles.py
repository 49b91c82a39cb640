"""Independent brute-force oracles used to freeze expected values.

Everything here is deliberately written with dense arrays and scalar
loops, separate from the library's sparse/optimized code paths. Oracles
only depend on numpy and the stdlib.
"""

import itertools
import math

import numpy as np


# ---------------------------------------------------------------------------
# co-citation / leave-one-out
# ---------------------------------------------------------------------------

def dense_cocitation(M_dense):
    """C = M^T M with zero diagonal, and per-article case counts."""
    M = np.asarray(M_dense, dtype=np.int64)
    C = M.T @ M
    np.fill_diagonal(C, 0)
    d = M.sum(axis=0)
    return C, d


def aa_weights(d):
    """max(ln d, 1) with d = 0 clamped to divisor 1."""
    w = np.ones(len(d), dtype=np.float64)
    for i, dv in enumerate(d):
        if dv >= 1:
            w[i] = max(math.log(dv), 1.0)
    return w


def dense_loo_ranks(M_dense, case_row, method, d_override=None, C_override=None):
    """Rank every target of one case against V \\ (S_u \\ {t}).

    Context accumulation runs in ascending article order so that
    floating-point sums are reproducible. Returns {target: (rank, score)}.
    """
    M = np.asarray(M_dense, dtype=np.int64)
    if C_override is not None:
        C = np.asarray(C_override, dtype=np.int64)
        d = np.asarray(d_override, dtype=np.int64)
    else:
        C, d = dense_cocitation(M)
    V = C.shape[0]
    w = aa_weights(d)
    S = [v for v in range(V) if M[case_row, v]]
    out = {}
    for t in S:
        context = [s for s in S if s != t]
        scores = np.zeros(V, dtype=np.float64)
        if method == "CN":
            for s in context:
                scores = scores + C[s].astype(np.float64)
        elif method == "AA":
            for s in context:
                scores = scores + C[s].astype(np.float64) / w[s]
        elif method == "Degree":
            scores = d.astype(np.float64)
        else:
            raise ValueError(method)
        t_score = scores[t]
        gt = eq = 0
        for v in range(V):
            if v == t or v in context:
                continue
            if scores[v] > t_score:
                gt += 1
            elif scores[v] == t_score:
                eq += 1
        out[t] = (1.0 + gt + 0.5 * eq, t_score)
    return out


# ---------------------------------------------------------------------------
# snapshot filters
# ---------------------------------------------------------------------------

def brute_filter(decisions, min_citations=50, vocab_cap=5000, case_min=3, case_max=200):
    """Reference implementation of the snapshot filters.

    ``decisions`` is a list of (doc_id, {article_id: occurrence_count}).
    Returns (vocabulary sorted lexicographically, retained doc_ids sorted).
    """
    totals = {}
    for _, counts in decisions:
        for aid, c in counts.items():
            totals[aid] = totals.get(aid, 0) + c
    eligible = [aid for aid, c in totals.items() if c >= min_citations]
    eligible.sort(key=lambda aid: (-totals[aid], aid))
    vocab = sorted(eligible[:vocab_cap])
    vset = set(vocab)
    kept = []
    for doc_id, counts in decisions:
        k = len(set(counts) & vset)
        if case_min <= k <= case_max:
            kept.append(doc_id)
    return vocab, sorted(kept)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def naive_metrics(ranks, ks=(1, 5, 10, 20)):
    """Two-pass scalar accumulation of hit@k and MRR."""
    n = len(ranks)
    hits = {k: 0 for k in ks}
    for r in ranks:
        for k in ks:
            if r <= k:
                hits[k] += 1
    total = 0.0
    for r in ranks:
        total += 1.0 / r
    return {k: hits[k] / n for k in ks}, total / n


def scalar_paired_z(rr_a, rr_b):
    """z statistic over paired reciprocal ranks, sample sd (ddof = 1)."""
    n = len(rr_a)
    deltas = [a - b for a, b in zip(rr_a, rr_b)]
    mean = sum(deltas) / n
    var = sum((dlt - mean) ** 2 for dlt in deltas) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        return 0.0 if mean == 0.0 else math.copysign(1e12, mean)
    return mean / (sd / math.sqrt(n))


# ---------------------------------------------------------------------------
# PELT
# ---------------------------------------------------------------------------

def gaussian_segment_cost(values, var_floor=1e-8):
    """Negative log-likelihood with segment-fitted mean and variance."""
    m = len(values)
    mean = sum(values) / m
    rss = sum((x - mean) ** 2 for x in values)
    var = max(rss / m, var_floor)
    return 0.5 * m * math.log(2.0 * math.pi * var) + rss / (2.0 * var)


def exhaustive_segmentation(values, penalty, min_segment=2, var_floor=1e-8):
    """Optimal penalized segmentation by enumerating every breakpoint set.

    Returns (breakpoint index list, total cost). Feasible only for tiny n.
    """
    n = len(values)
    positions = list(range(min_segment, n - min_segment + 1))
    best = (None, math.inf)
    for r in range(0, len(positions) + 1):
        for combo in itertools.combinations(positions, r):
            ok = True
            prev = 0
            for p in combo:
                if p - prev < min_segment:
                    ok = False
                    break
                prev = p
            if not ok or n - prev < min_segment:
                continue
            bounds = [0, *combo, n]
            cost = penalty * r
            for a, b in zip(bounds, bounds[1:]):
                cost += gaussian_segment_cost(values[a:b], var_floor)
            if cost < best[1]:
                best = (list(combo), cost)
    return best


# ---------------------------------------------------------------------------
# BM25
# ---------------------------------------------------------------------------

def naive_bm25_scores(query_tokens, doc_tokens, candidates, k1=1.2, b=0.75):
    """Full-scan Okapi BM25 over tokenized documents.

    ``doc_tokens`` maps doc id -> token list. Sums over every query token
    occurrence; IDF uses the +1-smoothed form.
    """
    N = len(doc_tokens)
    avg_len = sum(len(toks) for toks in doc_tokens.values()) / N
    df = {}
    for toks in doc_tokens.values():
        for t in set(toks):
            df[t] = df.get(t, 0) + 1
    scores = {}
    for doc in candidates:
        toks = doc_tokens[doc]
        length = len(toks)
        s = 0.0
        for q in query_tokens:
            tf = toks.count(q)
            if tf == 0:
                continue
            idf = math.log(1.0 + (N - df[q] + 0.5) / (df[q] + 0.5))
            s += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * length / avg_len))
        scores[doc] = s
    return scores


# ---------------------------------------------------------------------------
# misc
# ---------------------------------------------------------------------------

def scalar_mean_vector(vectors):
    """Arithmetic mean of a list of vectors, scalar loops."""
    n = len(vectors)
    dim = len(vectors[0])
    out = [0.0] * dim
    for vec in vectors:
        for i in range(dim):
            out[i] += vec[i]
    return [x / n for x in out]


def jaccard_from_case_sets(M_dense, i, j):
    """J(i, j) from explicit citing-case sets."""
    M = np.asarray(M_dense)
    ci = {u for u in range(M.shape[0]) if M[u, i]}
    cj = {u for u in range(M.shape[0]) if M[u, j]}
    union = ci | cj
    if not union:
        return 0.0
    return len(ci & cj) / len(union)
