"""CLI: embed --in snippets.jsonl --out vectors.jsonl [--fake --seed N].

Exit codes: 0 ok, 1 model load failure, 2 malformed input line.
"""

import argparse
import json
import os
import sys

from . import __version__
from .encoding import DEFAULT_MODEL, FAKE_DIM, AdapterConfig, FakeEncoder, ModelEncoder

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_INPUT = 2


class InputError(Exception):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


def read_snippets(path):
    """[(codex, article, year, text)] in file order."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(lineno, f"invalid JSON: {exc.msg}") from exc
            try:
                rows.append(
                    (obj["codex"], int(obj["article"]), int(obj["year"]),
                     str(obj["text"]))
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(lineno, f"bad snippet object: {exc}") from exc
    return rows


def write_vectors(path, rows, vectors):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for (codex, article, year, _), vec in zip(rows, vectors):
            fh.write(
                json.dumps(
                    {
                        "codex": codex,
                        "article": article,
                        "year": year,
                        "vector": [float(x) for x in vec],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    os.replace(tmp, path)


def write_metadata(path, payload):
    meta_path = path + ".meta.json"
    tmp = meta_path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, meta_path)


def embed_snippets(in_path, out_path, config, fake=False, seed=0,
                   fake_dim=FAKE_DIM):
    rows = read_snippets(in_path)
    if fake:
        encoder = FakeEncoder(config, seed, fake_dim)
        mode = "fake"
    else:
        encoder = ModelEncoder(config)
        mode = "model"
    vectors = []
    for start in range(0, len(rows), config.batch_size):
        batch = rows[start : start + config.batch_size]
        vectors.extend(encoder.encode([text for _, _, _, text in batch]))
    write_vectors(out_path, rows, vectors)
    write_metadata(
        out_path,
        {
            "tool_version": __version__,
            "mode": mode,
            "model": None if fake else config.model_name,
            "input_prefix": None if fake else "passage",
            "pooling": None if fake else "encoder default",
            "dimension": int(vectors[0].shape[0]) if vectors else 0,
            "seed": seed if fake else None,
            "max_chars": config.max_chars,
            "lines": len(rows),
        },
    )
    return len(rows)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="embed", description=__doc__)
    parser.add_argument("--in", dest="in_path", required=True)
    parser.add_argument("--out", dest="out_path", required=True)
    parser.add_argument("--fake", action="store_true",
                        help="hash-seeded unit vectors, no model needed")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--fake-dim", type=int, default=FAKE_DIM)
    parser.add_argument("--model", default=DEFAULT_MODEL)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--max-chars", type=int, default=1000)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)

    if not os.path.exists(args.in_path):
        print(f"input not found: {args.in_path}", file=sys.stderr)
        return EXIT_INPUT
    config = AdapterConfig(args.model, args.batch_size, args.max_chars, args.device)
    try:
        n = embed_snippets(
            args.in_path, args.out_path, config,
            fake=args.fake, seed=args.seed, fake_dim=args.fake_dim,
        )
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # model download/load/encode failures
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    print(f"embedded {n} snippets -> {args.out_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
