"""Selects the compiled ranking kernel, falling back to pure numpy.

Set COCITEBENCH_PURE=1 to force the numpy implementation (used by the
benchmark to compare both). Both implementations are bitwise equivalent.
"""

import os

from . import _rank_py

if os.environ.get("COCITEBENCH_PURE"):
    _impl = _rank_py
else:
    try:
        from . import _rank_ext as _impl
    except ImportError:
        _impl = _rank_py

rank_case_batch = _impl.rank_case_batch
rank_against_scores = _rank_py.rank_against_scores
IMPL_NAME = _impl.IMPL_NAME
HAVE_COMPILED = _impl.IMPL_NAME == "cython"
