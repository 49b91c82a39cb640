import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cocitebench.parsing import load_pattern_table_file
from cocitebench.snapshots import Snapshot
from cocitebench.synth import random_incidence

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
REFERENCE_CONFIG = os.path.join(
    os.path.dirname(__file__), "..", "src", "cocitebench", "data", "uk_codices.cfg"
)


@pytest.fixture(scope="session")
def pattern_table():
    return load_pattern_table_file(REFERENCE_CONFIG)


@pytest.fixture(scope="session")
def snippet_fixtures():
    with open(os.path.join(FIXTURES, "citation_snippets.json"), encoding="utf-8") as fh:
        return json.load(fh)


def expand_fixture_refs(entry):
    """(codex, article, quote, occurrence) list from a fixture entry."""
    out = []
    for r in entry["refs"]:
        if "article" in r:
            out.append((r["codex"], r["article"], r["quote"], r.get("occ", 1)))
        else:
            for a in range(r["from"], r["to"] + 1):
                out.append((r["codex"], a, r["quote"], r.get("occ", 1)))
    return out


def locate_occurrence(text, quote, occ):
    start = -1
    for _ in range(occ):
        start = text.find(quote, start + 1)
        assert start >= 0, f"quote {quote!r} (occ {occ}) not in text"
    return start, start + len(quote)


def toy_snapshot(V, U, seed, row_range=(3, 8), year=2020, counts=None):
    """Snapshot wrapper around a random incidence matrix."""
    M = random_incidence(U, V, seed, row_range=(row_range[0], min(row_range[1], V)))
    articles = [("c1", i + 1) for i in range(V)]
    cases = [f"{year}-{u:06d}" for u in range(U)]
    if counts is None:
        counts = np.asarray(M.sum(axis=0)).ravel().astype(np.int64)
    return Snapshot(year, articles, cases, M, counts)
