"""Longitudinal co-citation retrieval evaluation toolkit.

Builds annual citation snapshots from court-decision corpora, scores
statute co-citation graphs under a leave-one-out protocol, and measures
how retrieval quality evolves over time (ablations, BM25 text baseline,
embedding drift, changepoint detection).
"""

__version__ = "0.1.0"

from .errors import (
    CocitebenchError,
    ConfigError,
    DataError,
    InvariantViolation,
)

__all__ = [
    "__version__",
    "CocitebenchError",
    "ConfigError",
    "DataError",
    "InvariantViolation",
]
