"""Exception and warning types shared across the toolkit."""


class CocitebenchError(Exception):
    """Base class for all toolkit errors."""


# -- configuration / input parsing -----------------------------------------

class ConfigError(CocitebenchError):
    """Bad run configuration or missing input path (CLI exit code 1)."""


class DataError(CocitebenchError):
    """Malformed input data (CLI exit code 2)."""


class InvariantViolation(CocitebenchError):
    """Internal consistency check failed (CLI exit code 3)."""


class ParseError(ConfigError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class PatternError(ConfigError):
    def __init__(self, codex_id: str, pattern: str, reason: str = ""):
        self.codex_id = codex_id
        self.pattern = pattern
        detail = f": {reason}" if reason else ""
        super().__init__(f"codex {codex_id!r}: bad pattern {pattern!r}{detail}")


class DuplicateIdError(ConfigError):
    def __init__(self, codex_id: str):
        self.codex_id = codex_id
        super().__init__(f"duplicate codex id {codex_id!r}")


# -- snapshots and evaluation ----------------------------------------------

class EmptySnapshot(DataError):
    """No case survived the snapshot filters."""


class InvalidCase(DataError):
    """Case cites fewer vocabulary articles than the protocol requires."""


class EmptyInput(DataError):
    """An aggregate was requested over zero records."""


class MisalignedInputs(DataError):
    """Paired statistics need identical (doc_id, target) key sets."""


class DegenerateSplit(DataError):
    """A train/test split left one half empty."""


# -- text baseline ----------------------------------------------------------

class EmptyStore(DataError):
    """Article text store holds no entries."""


class NoTextOverlap(DataError):
    """Snapshot vocabulary and text store share no article."""


# -- drift ------------------------------------------------------------------

class NoOccurrences(DataError):
    """Article has no citation occurrences in the requested year."""


class EmptyBatch(DataError):
    """Embedding batch holds no vectors."""


class ZeroCentroid(DataError):
    """Centroid norm below 1e-12; cosine distance undefined."""


class DimensionMismatch(DataError):
    """Embedding batches have different vector dimensions."""


# -- changepoint / reporting -------------------------------------------------

class TooShort(DataError):
    """Series too short for segmentation at the minimum segment length."""


class NoReports(DataError):
    """Report emission was requested with no metrics available."""


class EmptyIntersectionWarning(UserWarning):
    """Fixed-vocabulary intersection came out empty (not fatal)."""
