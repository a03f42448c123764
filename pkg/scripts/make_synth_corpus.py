#!/usr/bin/env python
"""Generate a topic-structured synthetic corpus and write it as JSONL."""

import argparse
import sys
from pathlib import Path

from prosearch.simharness import synth_corpus
from prosearch.storage import write_documents


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--topics", type=int, default=5)
    parser.add_argument("--docs-per-topic", type=int, default=40)
    parser.add_argument("--vocab-size", type=int, default=500)
    parser.add_argument("--doc-length", type=int, default=60)
    parser.add_argument("--topic-share", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="JSONL file to write")
    args = parser.parse_args(argv)

    docs = synth_corpus(
        n_topics=args.topics,
        docs_per_topic=args.docs_per_topic,
        vocab_size=args.vocab_size,
        doc_length=args.doc_length,
        topic_share=args.topic_share,
        seed=args.seed,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_documents(docs, out)
    print(f"wrote {len(docs)} documents to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
