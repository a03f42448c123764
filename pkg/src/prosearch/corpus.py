"""Document corpus: tokenization, vocabulary and per-corpus term statistics.

Everything built here is immutable after construction and shared read-only
by the index, the predictive models and the intent model.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

UNK = "<unk>"
EOS = "<eos>"

_WORD_RE = re.compile(r"[0-9a-z]+")
_SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")


@dataclass(frozen=True)
class Document:
    """A retrieval unit: unique id, title, raw text and its topic labels."""

    id: str
    title: str
    text: str
    topics: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be nonempty")
        if not isinstance(self.topics, frozenset):
            object.__setattr__(self, "topics", frozenset(self.topics))


def tokenize(text: str) -> list[str]:
    """Lowercase and split into alphanumeric word tokens, dropping punctuation."""
    return _WORD_RE.findall(text.lower())


def sentences(text: str) -> list[list[str]]:
    """Split on sentence-ending punctuation, then tokenize each piece.

    Empty pieces are dropped; text without terminators is one sentence.
    """
    out = []
    for piece in _SENTENCE_SPLIT_RE.split(text):
        toks = tokenize(piece)
        if toks:
            out.append(toks)
    return out


class Vocabulary:
    """Bijection between words and dense indices, with reserved UNK and EOS.

    Index 0 is UNK (out-of-vocabulary words), index 1 is EOS (sentence
    boundary). Corpus words follow, most frequent first.
    """

    def __init__(self, words: list[str]):
        if words[:2] != [UNK, EOS]:
            words = [UNK, EOS] + [w for w in words if w not in (UNK, EOS)]
        self.words: tuple[str, ...] = tuple(words)
        self.index: dict[str, int] = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("vocabulary words must be unique")

    @property
    def size(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def id_of(self, word: str) -> int:
        """Index of `word`, or the UNK index when out of vocabulary."""
        return self.index.get(word, 0)

    def normalize(self, word: str) -> str:
        """`word` itself when in vocabulary, else the UNK token."""
        return word if word in self.index else UNK


def build_vocab(docs: list[Document], max_size: int = 10000) -> Vocabulary:
    """Keep the `max_size - 2` most frequent tokens plus UNK and EOS.

    Frequency ties are broken lexicographically. Tokens not kept map to UNK
    downstream.
    """
    if max_size < 3:
        raise ValueError(f"max_size must be at least 3, got {max_size}")
    if not docs:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    freq = Counter()
    for doc in docs:
        freq.update(tokenize(doc.text))
    ranked = sorted(freq, key=lambda w: (-freq[w], w))
    return Vocabulary([UNK, EOS] + ranked[: max_size - 2])


@dataclass(frozen=True)
class CorpusStats:
    """Document count, per-word document frequencies and idf = N / N_w.

    idf uses the raw ratio, not a logarithm, so every indexed word has
    idf >= 1 and idf(w) * doc_freq(w) == N exactly.
    """

    n_docs: int
    doc_freq: dict[str, int]
    idf: dict[str, float]

    def idf_of(self, word: str) -> float | None:
        return self.idf.get(word)


def compute_stats(docs: list[Document], vocab: Vocabulary) -> CorpusStats:
    """Count, per vocabulary word, the number of distinct documents containing it."""
    doc_freq: Counter = Counter()
    for doc in docs:
        seen = {t for t in tokenize(doc.text) if t in vocab}
        doc_freq.update(seen)
    n = len(docs)
    idf = {w: n / nw for w, nw in doc_freq.items()}
    return CorpusStats(n_docs=n, doc_freq=dict(doc_freq), idf=idf)


def doc_token_stream(doc: Document, vocab: Vocabulary) -> list[str]:
    """Vocabulary-normalized token stream of one document, EOS after each sentence."""
    stream = []
    for sent in sentences(doc.text):
        stream.extend(vocab.normalize(t) for t in sent)
        stream.append(EOS)
    return stream
