"""On-disk formats for corpus artifacts and trained models.

A corpus directory groups everything the other commands need:

    docs.jsonl   one document per line, normalized key order
    vocab.txt    versioned header, then one word per line in id order
    stats.json   document frequencies keyed by word
    index.json   postings and per-document norms

Language models are single files: a JSON container for count-based models,
an .npz archive for the neural one. ``load_model`` sniffs the leading bytes
so callers only ever hand over a path.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .corpus import Document, Vocabulary, CorpusStats, UNK, EOS
from .index import InvertedIndex
from .lm.base import NextWordModel
from .lm.ngram import NGramModel
from .lm.lstm import LstmConfig, LstmModel

VOCAB_HEADER = "prosearch-vocab v1"
STATS_VERSION = "prosearch-stats v1"
INDEX_VERSION = "prosearch-index v1"
NGRAM_VERSION = "prosearch-ngram v1"
LSTM_VERSION = "prosearch-lstm v1"

DOCS_FILE = "docs.jsonl"
VOCAB_FILE = "vocab.txt"
STATS_FILE = "stats.json"
INDEX_FILE = "index.json"


def read_documents(path: str | Path) -> list[Document]:
    """Parse a JSON-lines corpus; blank lines are allowed and skipped."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(raw, dict):
                raise ValueError(f"{path}:{lineno}: expected an object per line")
            try:
                docs.append(Document(
                    id=str(raw["id"]),
                    title=str(raw.get("title", "")),
                    text=str(raw["text"]),
                    topics=frozenset(str(t) for t in raw.get("topics", [])),
                ))
            except KeyError as exc:
                raise ValueError(f"{path}:{lineno}: missing field {exc}") from exc
    seen = set()
    for doc in docs:
        if doc.id in seen:
            raise ValueError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
    return docs


def write_documents(docs: list[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps({
                "id": doc.id,
                "title": doc.title,
                "text": doc.text,
                "topics": sorted(doc.topics),
            }, sort_keys=True) + "\n")


def write_vocab(vocab: Vocabulary, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(VOCAB_HEADER + "\n")
        for word in vocab.words:
            fh.write(word + "\n")


def read_vocab(path: str | Path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != VOCAB_HEADER:
            raise ValueError(f"{path}: not a vocabulary file (header {header!r})")
        words = [line.rstrip("\n") for line in fh if line.rstrip("\n")]
    if words[:2] != [UNK, EOS]:
        raise ValueError(f"{path}: reserved tokens missing or out of order")
    return Vocabulary(words)


def write_stats(stats: CorpusStats, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({
            "version": STATS_VERSION,
            "n_docs": stats.n_docs,
            "doc_freq": dict(sorted(stats.doc_freq.items())),
        }, fh, sort_keys=True)
        fh.write("\n")


def read_stats(path: str | Path) -> CorpusStats:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if raw.get("version") != STATS_VERSION:
        raise ValueError(f"{path}: unsupported stats format")
    doc_freq = {str(w): int(c) for w, c in raw["doc_freq"].items()}
    n_docs = int(raw["n_docs"])
    idf = {w: n_docs / c for w, c in doc_freq.items() if c > 0}
    return CorpusStats(n_docs=n_docs, doc_freq=doc_freq, idf=idf)


def write_index(index: InvertedIndex, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({
            "version": INDEX_VERSION,
            "n_docs": index.n_docs,
            "postings": {
                term: [[doc_id, tf] for doc_id, tf in plist]
                for term, plist in sorted(index.postings.items())
            },
            "doc_norm": dict(sorted(index.doc_norm.items())),
            "idf": dict(sorted(index.idf.items())),
        }, fh, sort_keys=True)
        fh.write("\n")


def read_index(path: str | Path, vocab: Vocabulary, stats: CorpusStats) -> InvertedIndex:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if raw.get("version") != INDEX_VERSION:
        raise ValueError(f"{path}: unsupported index format")
    if int(raw["n_docs"]) != stats.n_docs:
        raise ValueError(f"{path}: index and stats disagree on corpus size")
    postings = {
        str(term): [(str(doc_id), int(tf)) for doc_id, tf in plist]
        for term, plist in raw["postings"].items()
    }
    return InvertedIndex(
        vocab=vocab,
        postings=postings,
        doc_norm={str(d): float(v) for d, v in raw["doc_norm"].items()},
        stats=stats,
    )


def save_corpus_dir(
    docs: list[Document],
    vocab: Vocabulary,
    stats: CorpusStats,
    index: InvertedIndex,
    out_dir: str | Path,
) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_documents(docs, out / DOCS_FILE)
    write_vocab(vocab, out / VOCAB_FILE)
    write_stats(stats, out / STATS_FILE)
    write_index(index, out / INDEX_FILE)
    return out


class CorpusBundle:
    """Everything loaded back from a corpus directory."""

    def __init__(self, docs, vocab, stats, index):
        self.docs = docs
        self.by_id = {d.id: d for d in docs}
        self.vocab = vocab
        self.stats = stats
        self.index = index


def load_corpus_dir(corpus_dir: str | Path) -> CorpusBundle:
    root = Path(corpus_dir)
    for name in (DOCS_FILE, VOCAB_FILE, STATS_FILE, INDEX_FILE):
        if not (root / name).is_file():
            raise FileNotFoundError(f"{root}: missing {name}; run ingest first")
    docs = read_documents(root / DOCS_FILE)
    vocab = read_vocab(root / VOCAB_FILE)
    stats = read_stats(root / STATS_FILE)
    index = read_index(root / INDEX_FILE, vocab, stats)
    return CorpusBundle(docs, vocab, stats, index)


def save_ngram(model: NGramModel, path: str | Path) -> None:
    # context tuples become space-joined keys; words never contain spaces
    counts = []
    for table in model.counts:
        counts.append({
            " ".join(ctx): dict(sorted(counter.items()))
            for ctx, counter in sorted(table.items())
        })
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({
            "version": NGRAM_VERSION,
            "order": model.order,
            "alpha": model.alpha,
            "vocab": list(model.vocab.words),
            "counts": counts,
        }, fh, sort_keys=True)
        fh.write("\n")


def _load_ngram(raw: dict, path) -> NGramModel:
    vocab = Vocabulary(list(raw["vocab"]))
    counts = []
    for table in raw["counts"]:
        parsed: dict[tuple, dict] = {}
        for key, counter in table.items():
            ctx = tuple(key.split(" ")) if key else ()
            parsed[ctx] = {str(w): int(c) for w, c in counter.items()}
        counts.append(parsed)
    return NGramModel(vocab=vocab, counts=counts, order=int(raw["order"]),
                      alpha=float(raw["alpha"]))


def save_lstm(model: LstmModel, path: str | Path) -> None:
    meta = {
        "version": LSTM_VERSION,
        "vocab": list(model.vocab.words),
        "config": {
            "layers": model.config.layers,
            "hidden": model.config.hidden,
            "embed": model.config.embed,
            "unroll": model.config.unroll,
            "init_scale": model.config.init_scale,
            "seed": model.config.seed,
        },
    }
    arrays = {f"param_{name}": value for name, value in model.params.items()}
    # write through a handle so numpy cannot append its own extension
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
                 **arrays)


def _load_lstm(path: str | Path) -> LstmModel:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta.get("version") != LSTM_VERSION:
            raise ValueError(f"{path}: unsupported model format")
        vocab = Vocabulary(list(meta["vocab"]))
        cfg = LstmConfig(**meta["config"])
        model = LstmModel(vocab, cfg)
        for name in model.params:
            model.params[name] = np.asarray(data[f"param_{name}"], dtype=np.float64)
    return model


def load_model(path: str | Path) -> NextWordModel:
    """Open a saved model, dispatching on the file's leading bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head[:2] == b"PK":  # npz archives are zip files
        return _load_lstm(path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    version = raw.get("version")
    if version == NGRAM_VERSION:
        return _load_ngram(raw, path)
    raise ValueError(f"{path}: unrecognized model file (version {version!r})")
