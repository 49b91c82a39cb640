"""Sparse article co-citation matrix and the candidate scorers."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

METHOD_CN = "CN"
METHOD_AA = "AA"
METHOD_DEGREE = "Degree"
METHOD_RANDOM = "Random"
GRAPH_METHODS = (METHOD_CN, METHOD_AA, METHOD_DEGREE)
ALL_METHODS = (METHOD_CN, METHOD_AA, METHOD_DEGREE, METHOD_RANDOM)


def aa_divisors(d) -> np.ndarray:
    """Adamic-Adar divisors max(ln d, 1); d = 0 clamps to 1 as well."""
    d = np.asarray(d, dtype=np.float64)
    return np.maximum(np.log(np.maximum(d, 1.0)), 1.0)


@dataclass
class CoCitationMatrix:
    """C = M^T M with zero diagonal plus the per-article case counts d.

    d is the column sum of the same matrix that produced C; under the
    temporal split both must come from the training half only.
    """

    C: sp.csr_matrix
    d: np.ndarray
    _arrays: dict = field(default=None, repr=False, compare=False)

    @property
    def n_articles(self):
        return self.C.shape[0]

    def scoring_arrays(self):
        """Raw CSR arrays plus AA-weighted data for the kernels.

        data_aa holds data[p] / w[row(p)] computed once, so the kernels'
        hot loops never divide.
        """
        if self._arrays is None:
            indptr = self.C.indptr.astype(np.int64)
            data = self.C.data.astype(np.float64)
            w = aa_divisors(self.d)
            row_w = np.repeat(w, np.diff(indptr))
            self._arrays = {
                "indptr": indptr,
                "indices": self.C.indices.astype(np.int64),
                "data": data,
                "data_aa": data / row_w if len(data) else data.copy(),
                "w": w,
                "dscore": self.d.astype(np.float64),
            }
        return self._arrays


def build_cocitation(M) -> CoCitationMatrix:
    """Co-citation counts between articles plus per-article case counts."""
    M = M.tocsr()
    C = (M.T @ M).tocsr()
    C.setdiag(0)
    C.eliminate_zeros()
    C.sort_indices()
    C = C.astype(np.int64)
    d = np.asarray(M.sum(axis=0)).ravel().astype(np.int64)
    return CoCitationMatrix(C, d)


def _accumulate(context, arrays, weighted):
    """Sum of C rows over the context, ascending article order.

    Ascending-order accumulation keeps floating-point results identical
    across the sparse kernels and dense test oracles.
    """
    scores = np.zeros(len(arrays["dscore"]), dtype=np.float64)
    indptr, indices, data = arrays["indptr"], arrays["indices"], arrays["data"]
    for s in sorted(context):
        sl = slice(indptr[s], indptr[s + 1])
        if weighted:
            scores[indices[sl]] += data[sl] / arrays["w"][s]
        else:
            scores[indices[sl]] += data[sl]
    return scores


def score_cn(context, cc: CoCitationMatrix) -> np.ndarray:
    """Common-neighbors score of every article given a context set."""
    if not context:
        raise ValueError("context must be non-empty")
    return _accumulate(context, cc.scoring_arrays(), weighted=False)


def score_aa(context, cc: CoCitationMatrix) -> np.ndarray:
    """Adamic-Adar score: co-citation counts down-weighted by the context
    article's max(ln d, 1)."""
    if not context:
        raise ValueError("context must be non-empty")
    return _accumulate(context, cc.scoring_arrays(), weighted=True)


def score_degree(cc: CoCitationMatrix) -> np.ndarray:
    """Popularity-only score, independent of context."""
    return cc.d.astype(np.float64)


def score_random(v_count: int, seed: int) -> np.ndarray:
    """I.i.d. uniform(0, 1) scores from a seeded generator."""
    if v_count < 1:
        raise ValueError("v_count must be >= 1")
    return np.random.default_rng(seed).random(v_count)
