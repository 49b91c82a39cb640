"""Pure-numpy leave-one-out ranking kernel.

Mirrors the compiled extension operation-for-operation (same accumulation
order, same subtraction trick, same near-tie recomputation), so both
implementations produce bitwise identical ranks and target scores.

AA row weighting is pre-divided into ``data_aa`` (one division per stored
entry, done once per run), so the hot loops are pure adds and compares.

The fast AA path (full-context sum minus the target's row) can flip exact
ties against direct summation through rounding. Candidates co-cited with
the target whose fast score lands within a rounding-error band of the
target score are recomputed by direct summation over the remaining
context, restoring exact direct-sum comparison semantics.
"""

import numpy as np

IMPL_NAME = "numpy"

# relative half-width of the ambiguity band around the target score;
# enormously larger than the accumulated rounding error, vastly smaller
# than genuine score gaps
_NEAR_TIE_REL = 1e-9


def _aa_direct(v, t, S, indptr, indices, data_aa):
    """Sum of C[s, v] / w[s] over the context, ascending s, skipping t."""
    acc = 0.0
    for s in S:
        s = int(s)
        if s == t:
            continue
        lo, hi = int(indptr[s]), int(indptr[s + 1])
        pos = lo + int(np.searchsorted(indices[lo:hi], v))
        if pos < hi and indices[pos] == v:
            acc += data_aa[pos]
    return acc


def rank_case_batch(indptr, indices, data, data_aa, dscore, cases_flat, case_ptr,
                    do_cn, do_aa, do_deg):
    """Tie-averaged competition ranks for every target of every case.

    For a case with cited set S, each target t is ranked within
    V \\ (S \\ {t}): the full-context score vector F is accumulated once,
    the target's own row is subtracted, and candidates in the remaining
    context are skipped. Returns one (ranks, target_scores) pair per
    method, or None for disabled methods.
    """
    V = len(dscore)
    n_out = int(case_ptr[-1])
    out = {}
    for name, enabled in (("cn", do_cn), ("aa", do_aa), ("deg", do_deg)):
        out[name] = (
            (np.empty(n_out, dtype=np.float64), np.empty(n_out, dtype=np.float64))
            if enabled
            else None
        )

    R = np.zeros(V, dtype=np.float64)
    R_aa = np.zeros(V, dtype=np.float64)
    for c in range(len(case_ptr) - 1):
        S = cases_flat[case_ptr[c] : case_ptr[c + 1]]
        cand = np.ones(V, dtype=bool)
        cand[S] = False

        F_cn = np.zeros(V, dtype=np.float64) if do_cn else None
        F_aa = np.zeros(V, dtype=np.float64) if do_aa else None
        for s in S:
            sl = slice(indptr[s], indptr[s + 1])
            if do_cn:
                F_cn[indices[sl]] += data[sl]
            if do_aa:
                F_aa[indices[sl]] += data_aa[sl]

        for j in range(len(S)):
            t = int(S[j])
            pos = int(case_ptr[c]) + j
            sl = slice(indptr[t], indptr[t + 1])
            row_idx = indices[sl]
            if do_cn:
                R[row_idx] = data[sl]
                # integer counts are exact in float64: plain subtraction
                g = F_cn - R
                ts = F_cn[t]
                gt = np.count_nonzero(cand & (g > ts))
                eq = np.count_nonzero(cand & (g == ts))
                out["cn"][0][pos] = 1.0 + gt + 0.5 * eq
                out["cn"][1][pos] = ts
                R[row_idx] = 0.0
            if do_aa:
                R_aa[row_idx] = data_aa[sl]
                g = F_aa - R_aa
                ts = F_aa[t]
                close = cand & (R_aa != 0.0) & (
                    np.abs(g - ts) <= _NEAR_TIE_REL * (F_aa + R_aa + ts)
                )
                gt = np.count_nonzero(cand & ~close & (g > ts))
                eq = np.count_nonzero(cand & ~close & (g == ts))
                for v in np.flatnonzero(close):
                    exact = _aa_direct(int(v), t, S, indptr, indices, data_aa)
                    if exact > ts:
                        gt += 1
                    elif exact == ts:
                        eq += 1
                out["aa"][0][pos] = 1.0 + gt + 0.5 * eq
                out["aa"][1][pos] = ts
                R_aa[row_idx] = 0.0
            if do_deg:
                ts = dscore[t]
                gt = np.count_nonzero(cand & (dscore > ts))
                eq = np.count_nonzero(cand & (dscore == ts))
                out["deg"][0][pos] = 1.0 + gt + 0.5 * eq
                out["deg"][1][pos] = ts

    return out["cn"], out["aa"], out["deg"]


def rank_against_scores(scores, target, context, ranks_all=False):
    """Rank one target within V \\ context for an arbitrary score vector.

    Used for the Random method and the BM25 baseline, which do not go
    through the co-citation accumulation path.
    """
    V = len(scores)
    cand = np.ones(V, dtype=bool)
    ctx = np.asarray(list(context), dtype=np.int64)
    if len(ctx):
        cand[ctx] = False
    cand[target] = False
    ts = scores[target]
    gt = np.count_nonzero(cand & (scores > ts))
    eq = np.count_nonzero(cand & (scores == ts))
    return 1.0 + gt + 0.5 * eq, ts
