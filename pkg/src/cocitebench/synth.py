"""Synthetic desk-scale corpora with controllable co-citation structure.

Cases are generated from citation templates (article sets that tend to be
cited together); noise parameters corrupt template membership to thin out
the co-citation signal, which is how the decay and leakage experiments
plant their effects.
"""

import numpy as np
import scipy.sparse as sp

from .snapshots import DecisionRecord

_SYNTH_ABBREV = {
    "ck": "ЦК України",
    "kk": "КК України",
    "kas": "КАС України",
}

_FILLER = (
    "суд розглянув матеріали справи та заслухав пояснення сторін "
    "щодо обставин спору і наданих доказів"
).split()


def make_templates(n_templates, template_size, n_articles, seed, codex="c1"):
    """Random article templates over a single-codex vocabulary."""
    rng = np.random.default_rng(seed)
    articles = [(codex, i + 1) for i in range(n_articles)]
    templates = []
    for _ in range(n_templates):
        pick = rng.choice(n_articles, size=template_size, replace=False)
        templates.append([articles[i] for i in sorted(pick)])
    return articles, templates


def template_corpus(
    year,
    n_cases,
    articles,
    templates,
    corruption=0.0,
    seed=0,
    doc_prefix=None,
    k_range=(3, 8),
    balanced=False,
):
    """Cases drawn from templates; each cited article is replaced by a
    uniform random article with probability ``corruption``.

    With ``balanced=True`` the template and citation-count assignment
    cycles deterministically over cases, which removes composition noise
    between corpora generated with different seeds (used by experiments
    that compare per-year curves).
    """
    rng = np.random.default_rng(seed)
    prefix = doc_prefix if doc_prefix is not None else f"{year}"
    decisions = []
    k_lo, k_hi = k_range
    for i in range(n_cases):
        if balanced:
            tpl = templates[i % len(templates)]
            k = k_lo + (i // len(templates)) % (min(k_hi, len(tpl)) - k_lo + 1)
        else:
            tpl = templates[rng.integers(0, len(templates))]
            k = int(rng.integers(k_lo, min(k_hi, len(tpl)) + 1))
        pick = rng.choice(len(tpl), size=k, replace=False)
        cited = []
        for p in sorted(pick):
            art = tpl[p]
            if corruption > 0.0 and rng.random() < corruption:
                art = articles[rng.integers(0, len(articles))]
            cited.append(art)
        # replacement can collide with an existing pick; keep the case only
        # if it still cites >= 3 distinct articles
        if len(set(cited)) < 3:
            cited = list(tpl[:3])
        decisions.append(
            DecisionRecord.from_occurrences(f"{prefix}-{i:06d}", year, cited)
        )
    return decisions


def diffusion_years(
    n_years,
    epsilon,
    n_cases_per_year=800,
    n_articles=64,
    n_templates=8,
    template_size=8,
    seed=0,
    start_year=2001,
    k_range=(3, 8),
    balanced=False,
):
    """Per-year corpora where per-case template corruption grows linearly
    with the year index (p_y = epsilon * (y - 1))."""
    articles, templates = make_templates(n_templates, template_size, n_articles, seed)
    corpora = {}
    for y in range(n_years):
        year = start_year + y
        corpora[year] = template_corpus(
            year,
            n_cases_per_year,
            articles,
            templates,
            corruption=min(epsilon * y, 0.95),
            seed=seed * 10_007 + y + 1,
            k_range=k_range,
            balanced=balanced,
        )
    return corpora


def drift_templates(templates, articles, shift, seed):
    """Independent resampling of each template slot with probability shift."""
    rng = np.random.default_rng(seed)
    out = []
    for tpl in templates:
        new = []
        for art in tpl:
            if rng.random() < shift:
                art = articles[rng.integers(0, len(articles))]
            new.append(art)
        out.append(sorted(set(new)) or list(tpl))
    return out


def shifted_halves_corpus(
    year,
    n_cases,
    shift,
    seed,
    n_articles=64,
    n_templates=8,
    template_size=8,
):
    """Single-year corpus whose second half (by doc_id) draws from shifted
    templates, planting a distribution change across the temporal split."""
    articles, templates_a = make_templates(n_templates, template_size, n_articles, seed)
    templates_b = drift_templates(templates_a, articles, shift, seed + 1)
    half = n_cases // 2
    first = template_corpus(
        year, half, articles, templates_a, seed=seed + 2, doc_prefix=f"{year}-a"
    )
    second = template_corpus(
        year, n_cases - half, articles, templates_b, seed=seed + 3,
        doc_prefix=f"{year}-b",
    )
    return first + second


def hub_tail_corpus(year, n_cases, seed, n_hub=3, n_tail=40, hub_multiplicity=30):
    """Every case cites the dense hub template plus random tail articles;
    hub occurrence counts are pumped so they land in a higher bin."""
    rng = np.random.default_rng(seed)
    hubs = [("c1", i + 1) for i in range(n_hub)]
    tails = [("c1", 100 + i) for i in range(n_tail)]
    decisions = []
    for i in range(n_cases):
        occurrences = []
        for h in hubs:
            occurrences.extend([h] * hub_multiplicity)
        k = int(rng.integers(2, 5))
        pick = rng.choice(n_tail, size=k, replace=False)
        occurrences.extend(tails[p] for p in sorted(pick))
        decisions.append(
            DecisionRecord.from_occurrences(f"{year}-{i:06d}", year, occurrences)
        )
    return decisions


def two_codex_corpus(year, n_cases, seed, n_per_codex=24, template_size=6):
    """Codex 'st' cases follow stable templates; codex 'sh' citations are
    uniform random, so 'st' targets stay predictable and 'sh' do not."""
    rng = np.random.default_rng(seed)
    stable_articles, stable_templates = make_templates(
        4, template_size, n_per_codex, seed, codex="st"
    )
    shuffled_articles = [("sh", i + 1) for i in range(n_per_codex)]
    decisions = []
    for i in range(n_cases):
        if i % 2 == 0:
            tpl = stable_templates[rng.integers(0, len(stable_templates))]
            pick = rng.choice(len(tpl), size=4, replace=False)
            cited = [tpl[p] for p in sorted(pick)]
        else:
            pick = rng.choice(n_per_codex, size=4, replace=False)
            cited = [shuffled_articles[p] for p in sorted(pick)]
        decisions.append(
            DecisionRecord.from_occurrences(f"{year}-{i:06d}", year, cited)
        )
    return decisions


def random_incidence(n_cases, n_articles, seed, row_range=(3, 12)):
    """Random binary incidence matrix with row sums in the given range.

    Per-row articles are drawn with a small oversample + dedupe, which is
    much cheaper than permutation-based sampling when n_articles is large.
    """
    rng = np.random.default_rng(seed)
    lo, hi = row_range
    hi = min(hi, n_articles)
    indptr = np.zeros(n_cases + 1, dtype=np.int64)
    chunks = []
    total = 0
    for u in range(n_cases):
        k = int(rng.integers(lo, hi + 1))
        uniq = np.unique(rng.integers(0, n_articles, size=k + 8))
        while len(uniq) < k:
            uniq = np.unique(rng.integers(0, n_articles, size=2 * k + 16))
        # subset chosen by permutation so low indices are not favoured
        pick = np.sort(rng.permutation(uniq)[:k])
        chunks.append(pick.astype(np.int64))
        total += k
        indptr[u + 1] = total
    M = sp.csr_matrix(
        (np.ones(total, dtype=np.int32), np.concatenate(chunks), indptr),
        shape=(n_cases, n_articles),
    )
    M.sort_indices()
    return M


# ---------------------------------------------------------------------------
# text corpora for the end-to-end pipeline (extraction + BM25)
# ---------------------------------------------------------------------------

def _topic_tokens(codex, number):
    return [f"ознака{codex}{number}", f"критерій{codex}{number}", f"умова{codex}{number}"]


def text_article_universe(per_codex=14, codices=("ck", "kk", "kas")):
    return [(cx, 100 + i) for cx in codices for i in range(per_codex)]


def article_text(codex, number):
    words = _topic_tokens(codex, number) * 3 + _FILLER[:4]
    return f"Стаття {number}. " + " ".join(words) + "."


def case_text(cited, rng):
    """Decision text embedding one parseable citation per cited article."""
    sentences = []
    for codex, number in cited:
        abbr = _SYNTH_ABBREV[codex]
        topics = _topic_tokens(codex, number)
        t1 = topics[int(rng.integers(0, len(topics)))]
        t2 = topics[int(rng.integers(0, len(topics)))]
        sentences.append(f"Суд застосував ст. {number} {abbr}, врахувавши {t1} та {t2}.")
    filler = " ".join(_FILLER[int(rng.integers(0, 4)) :])
    sentences.append(filler.capitalize() + ".")
    return " ".join(sentences)


def text_corpus(years, cases_per_year, seed, per_codex=14):
    """JSONL-ready decisions with parseable citations plus article texts.

    Returns (decision dicts, article text dicts). Citation structure is
    template-driven per codex so co-citation methods have signal.
    """
    articles = text_article_universe(per_codex)
    rng = np.random.default_rng(seed)
    by_codex = {}
    for art in articles:
        by_codex.setdefault(art[0], []).append(art)
    templates = []
    for arts in by_codex.values():
        for start in range(0, len(arts) - 5, 4):
            templates.append(arts[start : start + 6])
    decisions = []
    for year in years:
        for i in range(cases_per_year):
            tpl = templates[int(rng.integers(0, len(templates)))]
            k = int(rng.integers(3, min(6, len(tpl)) + 1))
            pick = rng.choice(len(tpl), size=k, replace=False)
            cited = [tpl[p] for p in sorted(pick)]
            decisions.append(
                {
                    "doc_id": f"{year}-{i:06d}",
                    "year": year,
                    "text": case_text(cited, rng),
                }
            )
    article_texts = [
        {"codex": cx, "article": num, "text": article_text(cx, num)}
        for cx, num in articles
    ]
    return decisions, article_texts
