"""Command-line orchestration: extract, snapshot, eval, ablate, bm25,
drift, changepoint, report (plus synth for desk-scale demo corpora).

Config resolution order: built-in defaults < --config file (TOML) <
COCITEBENCH_* environment variables < command-line flags. Every output
file carries (seed, config digest, tool version) in a comment header, and
a run manifest is written even on failure.
"""

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .ablation import (
    DifficultyBins,
    SplitSpec,
    evaluate_fixed,
    fixed_vocab,
    per_codex,
    stratify,
    temporal_split_eval,
)
from .bm25 import ArticleTextStore, paired_text_eval
from .cocitation import ALL_METHODS, METHOD_AA, build_cocitation
from .drift import (
    aggregate_drift,
    drift as drift_pair,
    read_vectors_jsonl,
    sample_snippets,
    write_snippets_jsonl,
)
from .errors import (
    CocitebenchError,
    ConfigError,
    DataError,
    InvariantViolation,
    NoOccurrences,
)
from .evaluation import compute_metrics, evaluate_snapshot
from .parsing import extract_with_stats, load_pattern_table_file
from .pelt import MetricSeries, default_penalty, pelt_detect, penalty_sweep
from .reporting import (
    TEMPORAL_COLUMNS,
    emit_reports,
    jaccard_rows,
    metadata_line,
    per_article_rows,
    read_csv,
    report_row,
    stratification_rows,
    write_csv,
)
from .snapshots import (
    DecisionRecord,
    build_snapshot,
    load_snapshot,
    partition_by_year,
    save_snapshot,
)

ENV_PREFIX = "COCITEBENCH_"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


@dataclasses.dataclass
class RunConfig:
    corpus: str = ""
    patterns: str = ""
    refs: str = ""
    article_texts: str = ""
    vectors: str = ""
    metrics_file: str = ""
    snippets: str = ""
    years: tuple = ()
    fixed_years: tuple = ()
    seed: int = 0
    sample_n: int = 200_000
    min_citations: int = 50
    vocab_cap: int = 5000
    case_min: int = 3
    case_max: int = 200
    methods: tuple = ("AA", "CN", "Degree")
    ablations: tuple = ("original", "fixed", "split")
    output_dir: str = "out"
    jobs: int = 1
    bootstrap_b: int = 1000
    penalty: float = 0.0  # 0 means the BIC default
    sweep: bool = False
    exclude_years: tuple = ()
    top_n: int = 20
    bm25_sample_n: int = 500
    snippets_per_year: int = 50
    window: int = 500
    cases_per_year: int = 500
    parquet: bool = False

    # filesystem locations and execution knobs are excluded from the digest
    # so identical runs in different directories or at different --jobs
    # produce identical file headers; input contents are hashed separately
    # in the manifest
    _PATH_FIELDS = (
        "corpus", "patterns", "refs", "article_texts", "vectors",
        "metrics_file", "snippets", "output_dir", "jobs", "parquet",
    )

    def digest(self) -> str:
        payload = {
            k: v
            for k, v in dataclasses.asdict(self).items()
            if k not in self._PATH_FIELDS
        }
        blob = json.dumps(payload, sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def meta(self) -> str:
        return metadata_line(self.seed, self.digest())


def _parse_typed(field, raw):
    if field.type in ("int", int):
        return int(raw)
    if field.type in ("float", float):
        return float(raw)
    if field.type in ("bool", bool):
        return raw.lower() in ("1", "true", "yes")
    if field.type in ("tuple", tuple):
        items = [x for x in raw.replace(",", " ").split() if x]
        try:
            return tuple(int(x) for x in items)
        except ValueError:
            return tuple(items)
    return raw


def load_config(path=None, env=None, overrides=None) -> RunConfig:
    cfg = RunConfig()
    values = {}
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            try:
                loaded = tomllib.load(fh)
            except Exception as exc:
                raise ConfigError(f"bad config file {path}: {exc}") from exc
        values.update(loaded)
    env = os.environ if env is None else env
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    for name, field in fields.items():
        env_name = ENV_PREFIX + name.upper()
        if env_name in env:
            values[name] = _parse_typed(field, env[env_name])
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    for name, value in values.items():
        if name not in fields:
            raise ConfigError(f"unknown config key {name!r}")
        if isinstance(value, list):
            value = tuple(value)
        setattr(cfg, name, value)
    return cfg


def _require_file(path, what) -> str:
    if not path:
        raise ConfigError(f"{what} path is required")
    if not os.path.exists(path):
        raise ConfigError(f"{what} not found: {path}")
    return path


def _pattern_table(cfg):
    if cfg.patterns:
        return load_pattern_table_file(_require_file(cfg.patterns, "pattern table"))
    from importlib.resources import files

    return load_pattern_table_file(str(files("cocitebench").joinpath("data/uk_codices.cfg")))


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Run metadata written even when a stage fails."""

    def __init__(self, cfg, command):
        self.cfg = cfg
        self.command = command
        self.stages = {}
        self.inputs = {}
        self.status = "running"

    def add_input(self, path):
        if path and os.path.exists(path):
            self.inputs[path] = _sha256(path)

    def write(self):
        os.makedirs(self.cfg.output_dir, exist_ok=True)
        payload = {
            "command": self.command,
            "tool_version": __version__,
            "config": dataclasses.asdict(self.cfg),
            "config_digest": self.cfg.digest(),
            "stage_seconds": self.stages,
            "input_digests": self.inputs,
            "status": self.status,
        }
        path = os.path.join(self.cfg.output_dir, "manifest.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=list)
            fh.write("\n")
        os.replace(tmp, path)


class _timed:
    def __init__(self, manifest, name):
        self.manifest = manifest
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.manifest.stages[self.name] = round(time.perf_counter() - self.t0, 6)
        return False


def _atomic_jsonl(path, objects):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    os.replace(tmp, path)


def _read_corpus(path):
    decisions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                decisions.append((obj["doc_id"], int(obj["year"]), obj["text"]))
            except (KeyError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad corpus line") from exc
    return decisions


def _read_refs(path):
    refs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                refs.append(
                    (obj["doc_id"], obj["codex"], int(obj["article"]),
                     int(obj["start"]), int(obj["end"]))
                )
            except (KeyError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad citation line") from exc
    return refs


def _decisions_from(corpus, refs):
    by_doc = {}
    for doc_id, codex, article, _, _ in refs:
        by_doc.setdefault(doc_id, []).append((codex, article))
    records = []
    for doc_id, year, _ in corpus:
        records.append(
            DecisionRecord.from_occurrences(doc_id, year, by_doc.get(doc_id, []))
        )
    return records


def _snapshot_dir(cfg, year):
    return os.path.join(cfg.output_dir, f"snapshot_{year}")


def _load_year_snapshot(cfg, year):
    directory = _snapshot_dir(cfg, year)
    if not os.path.isdir(directory):
        raise ConfigError(f"snapshot directory not found: {directory}")
    return load_snapshot(directory)


def _extract_refs(cfg, manifest):
    table = _pattern_table(cfg)
    corpus = _read_corpus(_require_file(cfg.corpus, "corpus"))
    manifest.add_input(cfg.corpus)
    out = []
    kind_totals = {}
    for doc_id, _, text in corpus:
        refs, kinds = extract_with_stats(text, table)
        for k, v in kinds.items():
            kind_totals[k] = kind_totals.get(k, 0) + v
        for ref in refs:
            out.append(
                {
                    "doc_id": doc_id,
                    "codex": ref.codex_id,
                    "article": ref.article,
                    "start": ref.start,
                    "end": ref.end,
                }
            )
    return corpus, out, kind_totals


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_extract(cfg, manifest):
    with _timed(manifest, "extract"):
        _, refs, kind_totals = _extract_refs(cfg, manifest)
        os.makedirs(cfg.output_dir, exist_ok=True)
        _atomic_jsonl(os.path.join(cfg.output_dir, "citations.jsonl"), refs)
        with open(os.path.join(cfg.output_dir, "extract_stats.json.tmp"), "w") as fh:
            json.dump({"kinds": kind_totals, "promoted": len(refs)}, fh, sort_keys=True)
            fh.write("\n")
        os.replace(
            os.path.join(cfg.output_dir, "extract_stats.json.tmp"),
            os.path.join(cfg.output_dir, "extract_stats.json"),
        )
    print(f"extracted {len(refs)} citations -> {cfg.output_dir}/citations.jsonl")
    return EXIT_OK


def cmd_snapshot(cfg, manifest):
    with _timed(manifest, "snapshot"):
        corpus = _read_corpus(_require_file(cfg.corpus, "corpus"))
        manifest.add_input(cfg.corpus)
        if cfg.refs:
            refs = _read_refs(_require_file(cfg.refs, "citations file"))
            manifest.add_input(cfg.refs)
        else:
            _, raw, _ = _extract_refs(cfg, manifest)
            refs = [(r["doc_id"], r["codex"], r["article"], r["start"], r["end"]) for r in raw]
        decisions = _decisions_from(corpus, refs)
        parts = partition_by_year(decisions)
        years = cfg.years or tuple(sorted(parts))
        for year in years:
            if year not in parts:
                raise DataError(f"no decisions for year {year}")
            snap = build_snapshot(
                parts[year], year,
                min_citations=cfg.min_citations, vocab_cap=cfg.vocab_cap,
                case_min=cfg.case_min, case_max=cfg.case_max,
            )
            save_snapshot(snap, _snapshot_dir(cfg, year), header_lines=[cfg.meta()])
            print(
                f"snapshot {year}: {snap.n_cases} cases x {snap.n_articles} articles"
            )
    return EXIT_OK


def _records_path(cfg, year):
    return os.path.join(cfg.output_dir, f"records_{year}.csv")


def cmd_eval(cfg, manifest):
    if not cfg.years:
        raise ConfigError("eval needs --years")
    for m in cfg.methods:
        if m not in ALL_METHODS:
            raise ConfigError(f"unknown method {m!r}")
    metric_rows = []
    for year in cfg.years:
        snap = _load_year_snapshot(cfg, year)
        cc = build_cocitation(snap.M)
        with _timed(manifest, f"eval_{year}"):
            tables = evaluate_snapshot(
                snap, cc, methods=tuple(cfg.methods),
                sample_n=cfg.sample_n, seed=cfg.seed, jobs=cfg.jobs,
            )
        rows = []
        for method in cfg.methods:
            table = tables[method]
            for i in range(len(table)):
                codex, number = snap.articles[int(table.targets[i])]
                rows.append([
                    table.doc_ids[i], codex, number, method,
                    repr(float(table.ranks[i])), repr(float(table.scores[i])),
                ])
            report = compute_metrics(table, bootstrap_b=cfg.bootstrap_b, seed=cfg.seed)
            metric_rows.append(report_row(year, method, report))
            print(
                f"eval {year} {method}: n={report.n_predictions} "
                f"mrr={report.mrr:.4f} hit@10={report.hit_at[10]:.4f}"
            )
        write_csv(
            _records_path(cfg, year),
            ["doc_id", "target_codex", "target_article", "method", "rank", "score"],
            rows, cfg.meta(),
        )
    write_csv(
        os.path.join(cfg.output_dir, "eval_metrics.csv"),
        TEMPORAL_COLUMNS, metric_rows, cfg.meta(),
    )
    return EXIT_OK


def cmd_ablate(cfg, manifest):
    if not cfg.years:
        raise ConfigError("ablate needs --years")
    snaps = {year: _load_year_snapshot(cfg, year) for year in cfg.years}
    rows = []
    shared = None
    if "fixed" in cfg.ablations:
        fy = cfg.fixed_years or (min(cfg.years), max(cfg.years))
        for y in fy:
            if y not in snaps:
                snaps[y] = _load_year_snapshot(cfg, y)
        shared = fixed_vocab(snaps[fy[0]], snaps[fy[1]], cfg.min_citations)
        if not shared:
            raise DataError(f"fixed vocabulary for years {fy} is empty")
    for year in cfg.years:
        snap = snaps[year]
        if "original" in cfg.ablations:
            with _timed(manifest, f"ablate_original_{year}"):
                cc = build_cocitation(snap.M)
                tables = evaluate_snapshot(
                    snap, cc, methods=(METHOD_AA,), sample_n=cfg.sample_n,
                    seed=cfg.seed, jobs=cfg.jobs,
                )
                rep = compute_metrics(
                    tables[METHOD_AA], bootstrap_b=cfg.bootstrap_b, seed=cfg.seed
                )
            rows.append([year, "original", *report_row(year, METHOD_AA, rep)[2:]])
        if "fixed" in cfg.ablations:
            with _timed(manifest, f"ablate_fixed_{year}"):
                rep = evaluate_fixed(
                    [snap], shared, method=METHOD_AA, sample_n=cfg.sample_n,
                    seed=cfg.seed, jobs=cfg.jobs, bootstrap_b=cfg.bootstrap_b,
                )[year]
            rows.append([year, "fixed", *report_row(year, METHOD_AA, rep)[2:]])
        if "split" in cfg.ablations:
            with _timed(manifest, f"ablate_split_{year}"):
                rep = temporal_split_eval(
                    snap, SplitSpec(), method=METHOD_AA, sample_n=cfg.sample_n,
                    seed=cfg.seed, jobs=cfg.jobs, bootstrap_b=cfg.bootstrap_b,
                )
            rows.append([year, "split", *report_row(year, METHOD_AA, rep)[2:]])
    write_csv(
        os.path.join(cfg.output_dir, "ablation.csv"),
        ["year", "arm", *TEMPORAL_COLUMNS[2:]], rows, cfg.meta(),
    )
    for row in rows:
        print(f"ablate {row[0]} {row[1]}: mrr={row[9]}")
    return EXIT_OK


def cmd_bm25(cfg, manifest):
    if not cfg.years:
        raise ConfigError("bm25 needs --years")
    table = _pattern_table(cfg)
    store = ArticleTextStore.from_jsonl(_require_file(cfg.article_texts, "article texts"))
    manifest.add_input(cfg.article_texts)
    corpus = _read_corpus(_require_file(cfg.corpus, "corpus"))
    manifest.add_input(cfg.corpus)
    texts = {doc_id: text for doc_id, _, text in corpus}
    rows = []
    for year in cfg.years:
        snap = _load_year_snapshot(cfg, year)
        with _timed(manifest, f"bm25_{year}"):
            bm25_table, aa_table, inter = paired_text_eval(
                snap, store, texts, table,
                sample_n=cfg.bm25_sample_n, seed=cfg.seed, jobs=cfg.jobs,
            )
            rep_bm = compute_metrics(bm25_table, bootstrap_b=cfg.bootstrap_b, seed=cfg.seed)
            rep_aa = compute_metrics(aa_table, bootstrap_b=cfg.bootstrap_b, seed=cfg.seed)
        rows.append([year, len(inter), "AA", *report_row(year, "AA", rep_aa)[2:]])
        rows.append([year, len(inter), "BM25", *report_row(year, "BM25", rep_bm)[2:]])
        print(
            f"bm25 {year}: intersection={len(inter)} "
            f"aa_mrr={rep_aa.mrr:.4f} bm25_mrr={rep_bm.mrr:.4f}"
        )
    write_csv(
        os.path.join(cfg.output_dir, "bm25.csv"),
        ["year", "intersection_articles", "method", *TEMPORAL_COLUMNS[2:]],
        rows, cfg.meta(),
    )
    return EXIT_OK


def cmd_drift(cfg, manifest):
    os.makedirs(cfg.output_dir, exist_ok=True)
    if cfg.snippets:
        # snippet production mode: corpus + refs -> snippet JSONL
        if len(cfg.years) != 2:
            raise ConfigError("drift snippet mode needs exactly two --years")
        corpus = _read_corpus(_require_file(cfg.corpus, "corpus"))
        refs = _read_refs(_require_file(cfg.refs, "citations file"))
        manifest.add_input(cfg.corpus)
        manifest.add_input(cfg.refs)
        year_of = {doc_id: year for doc_id, year, _ in corpus}
        texts = {doc_id: text for doc_id, _, text in corpus}
        occurrences = [
            (doc_id, year_of.get(doc_id), codex, article, start, end)
            for doc_id, codex, article, start, end in refs
        ]
        articles = sorted({(codex, article) for _, codex, article, _, _ in refs})
        sets = []
        with _timed(manifest, "snippets"):
            for article in articles:
                for year in cfg.years:
                    try:
                        sets.append(
                            sample_snippets(
                                texts, occurrences, article, year,
                                n=cfg.snippets_per_year, window=cfg.window,
                                seed=cfg.seed,
                            )
                        )
                    except NoOccurrences:
                        continue
        write_snippets_jsonl(sets, cfg.snippets)
        print(f"wrote snippet sets for {len(articles)} articles -> {cfg.snippets}")
        return EXIT_OK

    batches = read_vectors_jsonl(_require_file(cfg.vectors, "vectors file"))
    manifest.add_input(cfg.vectors)
    years = cfg.years or tuple(sorted({year for _, year in batches}))
    if len(years) != 2:
        raise ConfigError("drift needs exactly two years of vectors")
    year_a, year_b = years
    records = []
    with _timed(manifest, "drift"):
        for (article, year), batch in sorted(batches.items()):
            if year != year_a:
                continue
            other = batches.get((article, year_b))
            if other is None:
                continue
            records.append(drift_pair(batch, other))
    if not records:
        raise DataError("no article has vectors in both years")
    overall, by_codex = aggregate_drift(records)
    write_csv(
        os.path.join(cfg.output_dir, "drift.csv"),
        ["codex", "article", "year_a", "year_b", "drift", "n_a", "n_b"],
        [
            [r.article[0], r.article[1], r.year_a, r.year_b, repr(r.drift), r.n_a, r.n_b]
            for r in records
        ],
        cfg.meta(),
    )
    write_csv(
        os.path.join(cfg.output_dir, "drift_by_codex.csv"),
        ["codex", "mean_drift", "articles"],
        [
            [cx, repr(mean), sum(1 for r in records if r.article[0] == cx)]
            for cx, mean in by_codex.items()
        ],
        cfg.meta(),
    )
    print(f"drift: {len(records)} articles, overall mean {overall:.4f}")
    return EXIT_OK


def cmd_changepoint(cfg, manifest):
    path = _require_file(cfg.metrics_file, "temporal metrics file")
    manifest.add_input(path)
    header, rows = read_csv(path)
    col = {name: i for i, name in enumerate(header)}
    method = cfg.methods[0] if cfg.methods else METHOD_AA
    points = [
        (int(r[col["year"]]), float(r[col["mrr"]]))
        for r in rows
        if r[col["method"]] == method
    ]
    if not points:
        raise DataError(f"no rows for method {method!r} in {path}")
    series = MetricSeries.from_points(points)
    if cfg.exclude_years:
        series = series.drop_years(cfg.exclude_years)
    with _timed(manifest, "changepoint"):
        penalty = cfg.penalty if cfg.penalty > 0 else None
        result = pelt_detect(series, penalty=penalty)
        sweep = penalty_sweep(series) if cfg.sweep else []
    payload = {
        "method": method,
        "years": list(series.years),
        "breakpoints": list(result.breakpoints),
        "penalty": result.penalty,
        "default_penalty": default_penalty(len(series)),
        "segments": [
            {"mean": m, "variance": v} for m, v in result.segment_params
        ],
        "sweep": [
            {"penalty": pen, "breakpoints": list(res.breakpoints)}
            for pen, res in sweep
        ],
        "meta": cfg.meta(),
    }
    out = os.path.join(cfg.output_dir, "changepoints.json")
    tmp = out + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, out)
    print(f"changepoints ({method}): {list(result.breakpoints)} penalty={result.penalty:.3f}")
    return EXIT_OK


def _table_from_rows(method, rows, col, snap, seed):
    from .evaluation import RankTable

    idx = snap.article_index
    return RankTable(
        method,
        [r[col["doc_id"]] for r in rows],
        np.zeros(len(rows), dtype=np.int64),
        np.asarray(
            [idx[(r[col["target_codex"]], int(r[col["target_article"]]))] for r in rows],
            dtype=np.int64,
        ),
        np.zeros(len(rows), dtype=np.int64),
        np.asarray([float(r[col["rank"]]) for r in rows], dtype=np.float64),
        np.asarray([float(r[col["score"]]) for r in rows], dtype=np.float64),
        seed,
    )


def cmd_report(cfg, manifest):
    if not cfg.years:
        raise ConfigError("report needs --years")
    temporal = []
    strat_rows = []
    article_rows = []
    jaccard = []
    codex_rows = []
    with _timed(manifest, "report"):
        for year in cfg.years:
            snap = _load_year_snapshot(cfg, year)
            path = _records_path(cfg, year)
            if not os.path.exists(path):
                raise ConfigError(f"records file not found: {path}")
            header, rows = read_csv(path)
            col = {name: i for i, name in enumerate(header)}
            by_method = {}
            for r in rows:
                by_method.setdefault(r[col["method"]], []).append(r)
            for method in sorted(by_method):
                table = _table_from_rows(method, by_method[method], col, snap, cfg.seed)
                report = compute_metrics(table, bootstrap_b=cfg.bootstrap_b, seed=cfg.seed)
                temporal.append(report_row(year, method, report))
                if method == METHOD_AA:
                    # per-codex trajectory data, one row per (year, codex)
                    groups = per_codex(
                        table, snap, bootstrap_b=cfg.bootstrap_b, seed=cfg.seed
                    )
                    for codex, rep in groups.items():
                        codex_rows.append(
                            [year, codex, *report_row(year, method, rep)[2:8]]
                        )
                if year == cfg.years[-1] and method == METHOD_AA:
                    bins = DifficultyBins()
                    strat_rows = stratification_rows(
                        stratify(table, snap, bins, bootstrap_b=cfg.bootstrap_b, seed=cfg.seed),
                        snap, bins,
                    )
                    article_rows = per_article_rows(table, snap)
            if year == cfg.years[-1]:
                cc = build_cocitation(snap.M)
                jaccard = jaccard_rows(cc, snap.articles, top_n=cfg.top_n)
    written = emit_reports(
        cfg.output_dir,
        temporal_rows=temporal,
        strat_rows=strat_rows,
        article_rows=article_rows,
        jaccard=jaccard,
        meta=cfg.meta(),
        parquet=cfg.parquet,
    )
    if codex_rows:
        path = os.path.join(cfg.output_dir, "per_codex_metrics.csv")
        write_csv(
            path,
            ["year", "codex", "n_predictions", "hit1", "hit5", "hit10", "hit20", "mrr"],
            codex_rows, cfg.meta(),
        )
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_synth(cfg, manifest):
    from .synth import text_corpus

    years = cfg.years or (2011, 2012)
    with _timed(manifest, "synth"):
        decisions, article_texts = text_corpus(years, cfg.cases_per_year, cfg.seed)
        os.makedirs(cfg.output_dir, exist_ok=True)
        _atomic_jsonl(os.path.join(cfg.output_dir, "corpus.jsonl"), decisions)
        _atomic_jsonl(os.path.join(cfg.output_dir, "article_texts.jsonl"), article_texts)
    print(
        f"synth corpus: {len(decisions)} decisions over years {list(years)} "
        f"-> {cfg.output_dir}/corpus.jsonl"
    )
    return EXIT_OK


COMMANDS = {
    "extract": cmd_extract,
    "snapshot": cmd_snapshot,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "bm25": cmd_bm25,
    "drift": cmd_drift,
    "changepoint": cmd_changepoint,
    "report": cmd_report,
    "synth": cmd_synth,
}

# inputs each command must be able to open before doing any work
_DRY_RUN_REQUIREMENTS = {
    "extract": ("corpus",),
    "snapshot": ("corpus",),
    "bm25": ("corpus", "article_texts"),
    "changepoint": ("metrics_file",),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="cocitebench", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="TOML config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--dry-run", action="store_true")
        p.add_argument("--output-dir", default=None)
        p.add_argument("--corpus", default=None)
        p.add_argument("--patterns", default=None)
        p.add_argument("--refs", default=None)
        p.add_argument("--article-texts", dest="article_texts", default=None)
        p.add_argument("--vectors", default=None)
        p.add_argument("--snippets", default=None)
        p.add_argument("--metrics-file", dest="metrics_file", default=None)
        p.add_argument("--years", default=None, help="comma-separated years")
        p.add_argument("--fixed-years", dest="fixed_years", default=None)
        p.add_argument("--methods", default=None, help="comma-separated methods")
        p.add_argument("--ablations", default=None)
        p.add_argument("--sample-n", dest="sample_n", type=int, default=None)
        p.add_argument("--bm25-sample-n", dest="bm25_sample_n", type=int, default=None)
        p.add_argument("--min-citations", dest="min_citations", type=int, default=None)
        p.add_argument("--vocab-cap", dest="vocab_cap", type=int, default=None)
        p.add_argument("--case-min", dest="case_min", type=int, default=None)
        p.add_argument("--case-max", dest="case_max", type=int, default=None)
        p.add_argument("--bootstrap-b", dest="bootstrap_b", type=int, default=None)
        p.add_argument("--penalty", type=float, default=None)
        p.add_argument("--sweep", action="store_true", default=None)
        p.add_argument("--exclude-years", dest="exclude_years", default=None)
        p.add_argument("--top-n", dest="top_n", type=int, default=None)
        p.add_argument("--cases-per-year", dest="cases_per_year", type=int, default=None)
        p.add_argument("--parquet", action="store_true", default=None)
    return parser


def _int_tuple(raw):
    if raw is None:
        return None
    return tuple(int(x) for x in raw.replace(",", " ").split() if x)


def _str_tuple(raw):
    if raw is None:
        return None
    return tuple(x for x in raw.replace(",", " ").split() if x)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {
            "seed": args.seed,
            "jobs": args.jobs,
            "output_dir": args.output_dir,
            "corpus": args.corpus,
            "patterns": args.patterns,
            "refs": args.refs,
            "article_texts": args.article_texts,
            "vectors": args.vectors,
            "snippets": args.snippets,
            "metrics_file": args.metrics_file,
            "years": _int_tuple(args.years),
            "fixed_years": _int_tuple(args.fixed_years),
            "methods": _str_tuple(args.methods),
            "ablations": _str_tuple(args.ablations),
            "sample_n": args.sample_n,
            "bm25_sample_n": args.bm25_sample_n,
            "min_citations": args.min_citations,
            "vocab_cap": args.vocab_cap,
            "case_min": args.case_min,
            "case_max": args.case_max,
            "bootstrap_b": args.bootstrap_b,
            "penalty": args.penalty,
            "sweep": args.sweep,
            "exclude_years": _int_tuple(args.exclude_years),
            "top_n": args.top_n,
            "cases_per_year": args.cases_per_year,
            "parquet": args.parquet,
        }
        cfg = load_config(args.config, overrides=overrides)
        if args.dry_run:
            for key in _DRY_RUN_REQUIREMENTS.get(args.command, ()):
                _require_file(getattr(cfg, key), key)
            if args.command in ("eval", "ablate", "report") and not cfg.years:
                raise ConfigError(f"{args.command} needs --years")
            print("config ok (dry run)")
            return EXIT_OK
        os.makedirs(cfg.output_dir, exist_ok=True)
        manifest = Manifest(cfg, args.command)
        try:
            code = COMMANDS[args.command](cfg, manifest)
            manifest.status = "ok" if code == EXIT_OK else f"exit {code}"
            return code
        except BaseException as exc:
            manifest.status = f"failed: {exc}"
            raise
        finally:
            manifest.write()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except CocitebenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
