#!/usr/bin/env python3
"""Train the reference byte-level BPE artifact (vocab.json + merges.txt).

The committed files under data/tokenizer/gpt2/ were produced by this script.
Regeneration needs the `tokenizers` package and a corpus directory; the exact
token inventory depends on the corpus, so treat regeneration as producing a
*new* reference artifact, not a byte-identical copy of the committed one.

Corpus shaping rules (these keep the compiler's delimiter table valid):
  * every "->" / "-->" run is rewritten to " to ", so the two-character ASCII
    arrow never becomes a single merged token
  * the compact delimiter glyphs the table emits are injected often enough to
    merge into single tokens
  * a frequency-weighted English word list is injected so long common words
    merge into one token each
"""

import argparse
import os
import re
import sys

ARROW_RUN = re.compile(r"-+>")

# Glyphs the delimiter table may emit. Each must end up as one token, both
# immediately after a word and at line start.
GLYPHS = ["→", "⇒", "⇔", "≠", "≥", "≤", "∈", "≜", ":="]

# Long, common words seeded so the trained vocab contains them whole. The
# token-count witness search and the fixture corpus lean on these.
SEED_WORDS = [
    "understanding", "implementation", "configuration", "international",
    "communication", "representation", "documentation", "initialization",
    "authentication", "authorization", "specification", "functionality",
    "compatibility", "optimization", "serialization", "notification",
    "subscription", "transformation", "infrastructure", "administrator",
    "environment", "development", "application", "information",
    "description", "parameters", "repository", "directory", "available",
    "response", "request", "search", "files", "query", "path", "string",
    "content", "pattern", "filename", "project", "object", "integer",
    "number", "boolean", "array", "required", "optional", "tool", "tools",
]


def engineered_blob() -> str:
    lines = []
    for glyph in GLYPHS:
        for _ in range(400):
            lines.append(f"alpha{glyph} beta")
            lines.append(f"{glyph} gamma")
            lines.append(f"left{glyph}right")
    for word in SEED_WORDS:
        for _ in range(600):
            lines.append(f"{word} and the {word} of a {word}.")
            lines.append(f"{word}")
    return "\n".join(lines)


def iter_corpus_files(roots, suffixes, cap_bytes):
    total = 0
    for root in roots:
        for dirpath, dirnames, filenames in os.walk(root):
            dirnames.sort()
            for name in sorted(filenames):
                if not name.endswith(suffixes):
                    continue
                path = os.path.join(dirpath, name)
                try:
                    size = os.path.getsize(path)
                except OSError:
                    continue
                if size > 4 * 1024 * 1024:
                    continue
                yield path
                total += size
                if total >= cap_bytes:
                    return


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--corpus", nargs="+", required=True,
                    help="directories scanned for .py/.md/.txt/.rst sources")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--vocab-size", type=int, default=50000)
    ap.add_argument("--cap-mb", type=int, default=160,
                    help="stop reading corpus after this many megabytes")
    args = ap.parse_args()

    os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")
    os.environ.setdefault("RAYON_NUM_THREADS", "1")

    from tokenizers import Tokenizer, models, pre_tokenizers, decoders, trainers

    suffixes = (".py", ".md", ".txt", ".rst")
    cap = args.cap_mb * 1024 * 1024

    def chunks():
        yield engineered_blob()
        for path in iter_corpus_files(args.corpus, suffixes, cap):
            try:
                with open(path, "r", encoding="utf-8", errors="ignore") as fh:
                    yield ARROW_RUN.sub(" to ", fh.read())
            except OSError:
                continue
        # repeat the engineered text so glyph pair counts survive a large corpus
        for _ in range(20):
            yield engineered_blob()

    tok = Tokenizer(models.BPE())
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tok.decoder = decoders.ByteLevel()
    trainer = trainers.BpeTrainer(
        vocab_size=args.vocab_size,
        min_frequency=2,
        show_progress=True,
        special_tokens=[],
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
    )
    tok.train_from_iterator(chunks(), trainer=trainer)

    os.makedirs(args.out, exist_ok=True)
    tok.model.save(args.out)

    merges = sum(1 for line in open(os.path.join(args.out, "merges.txt"))
                 if line.strip() and not line.startswith("#"))
    print(f"saved {args.out}: {tok.get_vocab_size()} vocab entries, {merges} merges")
    if merges < 45000:
        print("warning: corpus too small for a production-scale merge list",
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
