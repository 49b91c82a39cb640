"""Citation extraction from decision text via per-codex regex patterns.

The pattern table is loaded from a small block config (see
``load_pattern_table``). Article patterns may embed the ``{ABBR}``
placeholder, which is replaced at compile time with a non-capturing
alternation of the codex's abbreviation patterns, so match spans always
refer to the original text.

Spans are character offsets into the source string (Python slicing
semantics); the same offsets are used for stripping and for drift
snippet windows.
"""

import re
from dataclasses import dataclass, field

from .errors import DuplicateIdError, ParseError, PatternError

RANGE_SPAN_CAP = 50

KIND_CODEX_ARTICLE = "codex_article"
KIND_CASE_REFERENCE = "case_reference"
KIND_CONSTITUTIONAL = "constitutional"
KIND_LAW_BY_NUMBER = "law_by_number"

# Side tallies for non-promoted citation kinds; these are counted and
# dropped, never resolved.
_AUX_PATTERNS = {
    KIND_CASE_REFERENCE: re.compile(r"справ[аиі]\s*№\s*[\w/\\.–—-]+", re.IGNORECASE),
    KIND_CONSTITUTIONAL: re.compile(
        r"\bстат\w*\.?\s*\d+\s+Конституції\s+України", re.IGNORECASE
    ),
    KIND_LAW_BY_NUMBER: re.compile(
        r"\bЗакон\w*\s+України\s+№\s*[\w/–—-]+", re.IGNORECASE
    ),
}


@dataclass(frozen=True)
class CitationRef:
    """One well-formed (codex, article) reference with its source span."""

    codex_id: str
    article: int
    start: int
    end: int

    def __post_init__(self):
        if self.article < 1:
            raise ValueError(f"article must be >= 1, got {self.article}")
        if self.start >= self.end:
            raise ValueError(f"empty span ({self.start}, {self.end})")

    @property
    def span(self):
        return (self.start, self.end)


@dataclass(frozen=True)
class RawExtractionRecord:
    kind: str
    payload: str
    start: int
    end: int


@dataclass(frozen=True)
class CodexEntry:
    codex_id: str
    canonical_name: str
    abbreviation_patterns: tuple
    article_marker_patterns: tuple
    compiled: tuple = field(repr=False, default=())


class CodexPatternTable:
    """Immutable, compiled pattern table ordered by codex id."""

    def __init__(self, entries):
        entries = sorted(entries, key=lambda e: e.codex_id)
        seen = set()
        for e in entries:
            if e.codex_id in seen:
                raise DuplicateIdError(e.codex_id)
            seen.add(e.codex_id)
        self.entries = tuple(entries)
        self._by_id = {e.codex_id: e for e in entries}

    def __len__(self):
        return len(self.entries)

    def __contains__(self, codex_id):
        return codex_id in self._by_id

    def __getitem__(self, codex_id):
        return self._by_id[codex_id]

    def codex_ids(self):
        return [e.codex_id for e in self.entries]


def _compile_entry(codex_id, name, abbrevs, articles):
    for pat in abbrevs:
        try:
            re.compile(pat)
        except re.error as exc:
            raise PatternError(codex_id, pat, str(exc)) from exc
    alternation = "(?:" + "|".join(abbrevs) + ")"
    compiled = []
    for pat in articles:
        full = pat.replace("{ABBR}", alternation)
        try:
            rx = re.compile(full, re.IGNORECASE | re.UNICODE)
        except re.error as exc:
            raise PatternError(codex_id, pat, str(exc)) from exc
        if "a1" not in rx.groupindex:
            raise PatternError(codex_id, pat, "missing (?P<a1>...) group")
        compiled.append(rx)
    return CodexEntry(codex_id, name, tuple(abbrevs), tuple(articles), tuple(compiled))


def _parse_quoted_list(raw, lineno):
    """Parse ["a", "b"] with literal (non-escaped) string contents."""
    s = raw.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError(lineno, f"expected a [...] list, got {raw!r}")
    body = s[1:-1]
    items = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch in " \t,":
            i += 1
            continue
        if ch != '"':
            raise ParseError(lineno, f"expected quoted string at {body[i:]!r}")
        j = body.find('"', i + 1)
        if j < 0:
            raise ParseError(lineno, "unterminated string")
        items.append(body[i + 1 : j])
        i = j + 1
    return items


def _parse_quoted(raw, lineno):
    s = raw.strip()
    if len(s) < 2 or not (s.startswith('"') and s.endswith('"')):
        raise ParseError(lineno, f"expected a quoted string, got {raw!r}")
    return s[1:-1]


def load_pattern_table(config_text: str) -> CodexPatternTable:
    """Parse and compile a pattern config; fails atomically.

    Format: repeated ``[codex]`` blocks, each with ``id``, ``name``,
    ``abbrev = [...]`` and ``article = [...]`` keys. Quoted strings are
    taken literally, so regex backslashes need no doubling.
    """
    blocks = []
    current = None
    current_line = 0
    for lineno, line in enumerate(config_text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped == "[codex]":
            if current is not None:
                blocks.append((current_line, current))
            current = {}
            current_line = lineno
            continue
        if stripped.startswith("["):
            raise ParseError(lineno, f"unknown section {stripped!r}")
        if current is None:
            raise ParseError(lineno, "key outside of a [codex] block")
        if "=" not in stripped:
            raise ParseError(lineno, f"expected key = value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in ("id", "name"):
            current[key] = _parse_quoted(value, lineno)
        elif key in ("abbrev", "article"):
            current[key] = _parse_quoted_list(value, lineno)
        else:
            raise ParseError(lineno, f"unknown key {key!r}")
    if current is not None:
        blocks.append((current_line, current))

    entries = []
    ids = set()
    for lineno, block in blocks:
        for required in ("id", "name", "abbrev", "article"):
            if required not in block:
                raise ParseError(lineno, f"[codex] block missing {required!r}")
        if not block["abbrev"] or not block["article"]:
            raise ParseError(lineno, "abbrev/article lists must be non-empty")
        if block["id"] in ids:
            raise DuplicateIdError(block["id"])
        ids.add(block["id"])
        entries.append(
            _compile_entry(block["id"], block["name"], block["abbrev"], block["article"])
        )
    return CodexPatternTable(entries)


def load_pattern_table_file(path) -> CodexPatternTable:
    with open(path, encoding="utf-8") as fh:
        return load_pattern_table(fh.read())


def expand_range(start: int, end: int) -> list:
    """[start..end] inclusive, degrading to [start] for inverted or
    over-wide (span > 50) ranges."""
    if start < 1:
        raise ValueError(f"start must be >= 1, got {start}")
    if start <= end and (end - start) <= RANGE_SPAN_CAP:
        return list(range(start, end + 1))
    return [start]


class _Match:
    __slots__ = ("start", "end", "codex_id", "a1", "a2")

    def __init__(self, start, end, codex_id, a1, a2):
        self.start = start
        self.end = end
        self.codex_id = codex_id
        self.a1 = a1
        self.a2 = a2


def _find_matches(text, table):
    """All pattern matches with overlaps resolved (longest match wins)."""
    candidates = []
    for entry in table.entries:
        for rx in entry.compiled:
            for m in rx.finditer(text):
                a1 = int(m.group("a1"))
                a2 = m.group("a2") if "a2" in rx.groupindex else None
                candidates.append(
                    _Match(m.start(), m.end(), entry.codex_id, a1, int(a2) if a2 else None)
                )
    # Longest match wins across codices/patterns; ties broken by start
    # position then codex id for determinism.
    candidates.sort(key=lambda c: (-(c.end - c.start), c.start, c.codex_id))
    kept = []
    for cand in candidates:
        if all(cand.end <= k.start or cand.start >= k.end for k in kept):
            kept.append(cand)
    kept.sort(key=lambda c: c.start)
    return kept


def extract_citations(text: str, table: CodexPatternTable) -> list:
    """All well-formed codex-article citations in document order."""
    refs = []
    seen = set()
    for m in _find_matches(text, table):
        end_article = m.a2 if m.a2 is not None else m.a1
        for article in expand_range(m.a1, end_article):
            key = (m.codex_id, article, m.start, m.end)
            if key in seen:
                continue
            seen.add(key)
            refs.append(CitationRef(m.codex_id, article, m.start, m.end))
    return refs


def extract_raw_records(text: str, table: CodexPatternTable) -> list:
    """Typed extraction records across all kinds (only codex_article is
    ever promoted to CitationRef)."""
    records = [
        RawExtractionRecord(KIND_CODEX_ARTICLE, text[m.start : m.end], m.start, m.end)
        for m in _find_matches(text, table)
    ]
    for kind, rx in _AUX_PATTERNS.items():
        for m in rx.finditer(text):
            records.append(RawExtractionRecord(kind, m.group(0), m.start(), m.end()))
    records.sort(key=lambda r: (r.start, r.end))
    return records


def extract_with_stats(text: str, table: CodexPatternTable):
    """(refs, per-kind record counts); non-article kinds counted, dropped."""
    counts = {}
    for rec in extract_raw_records(text, table):
        counts[rec.kind] = counts.get(rec.kind, 0) + 1
    return extract_citations(text, table), counts


def strip_citations(text: str, table: CodexPatternTable) -> str:
    """Replace every citation span with a single space.

    Repeats until extraction finds nothing, so the result is idempotent
    even when overlap resolution uncovers a shorter secondary match.
    """
    for _ in range(16):
        matches = _find_matches(text, table)
        if not matches:
            return text
        pieces = []
        cursor = 0
        for m in matches:
            pieces.append(text[cursor : m.start])
            pieces.append(" ")
            cursor = m.end
        pieces.append(text[cursor:])
        text = "".join(pieces)
    raise RuntimeError("strip_citations did not converge")
