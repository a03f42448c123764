"""Inverted index with tf-idf cosine ranking.

Document vectors use raw term frequency times the corpus idf (N / N_w).
Query vectors are the caller-supplied weight maps, used as-is: a query equal
to a document's own tf-idf vector scores 1.0 against that document.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from .corpus import CorpusStats, Document, Vocabulary, tokenize

# A query is a term -> weight map with nonnegative weights.
WeightedQuery = dict[str, float]


@dataclass(frozen=True)
class SearchResult:
    """Ranked (doc id, cosine score) pairs, scores non-increasing."""

    hits: tuple[tuple[str, float], ...]

    def __len__(self) -> int:
        return len(self.hits)

    def __iter__(self):
        return iter(self.hits)

    def doc_ids(self) -> list[str]:
        return [doc_id for doc_id, _ in self.hits]


class InvertedIndex:
    """Term -> postings map plus per-document vector norms.

    Immutable after build; lookups are pure and safe for concurrent readers.
    Tokens outside the vocabulary are not indexed (rare words are dropped
    rather than pooled into UNK, which would create spurious matches).
    """

    def __init__(
        self,
        vocab: Vocabulary,
        postings: dict[str, list[tuple[str, int]]],
        doc_norm: dict[str, float],
        stats: CorpusStats,
    ):
        self.vocab = vocab
        self.postings = postings
        self.doc_norm = doc_norm
        self.n_docs = stats.n_docs
        self.idf = stats.idf


def build_index(docs: list[Document], vocab: Vocabulary, stats: CorpusStats) -> InvertedIndex:
    """Build postings (sorted by doc id) and tf-idf vector norms."""
    if not docs:
        raise ValueError("cannot index an empty corpus")
    postings: dict[str, list[tuple[str, int]]] = defaultdict(list)
    sq_norm: dict[str, float] = {}
    for doc in sorted(docs, key=lambda d: d.id):
        tf = Counter(t for t in tokenize(doc.text) if t in stats.idf)
        if not tf:
            continue
        acc = 0.0
        for term in sorted(tf):
            count = tf[term]
            postings[term].append((doc.id, count))
            acc += (count * stats.idf[term]) ** 2
        sq_norm[doc.id] = acc
    doc_norm = {doc_id: math.sqrt(v) for doc_id, v in sq_norm.items()}
    return InvertedIndex(vocab=vocab, postings=dict(postings), doc_norm=doc_norm, stats=stats)


def search(index: InvertedIndex, query: WeightedQuery, top_k: int = 10) -> SearchResult:
    """Cosine-rank documents against `query`.

    score(d) = (q . v_d) / (|q| |v_d|) with v_d the document tf-idf vector.
    Query terms unknown to the index contribute to |q| but match nothing.
    Ties break by ascending doc id; an all-zero query yields an empty result.
    """
    if top_k < 1:
        raise ValueError(f"top_k must be at least 1, got {top_k}")
    q_norm = math.sqrt(sum(w * w for w in query.values()))
    if q_norm == 0.0:
        return SearchResult(hits=())
    dots: dict[str, float] = defaultdict(float)
    for term, weight in query.items():
        if weight <= 0.0:
            continue
        idf = index.idf.get(term)
        if idf is None:
            continue
        for doc_id, tf in index.postings.get(term, ()):
            dots[doc_id] += weight * tf * idf
    scored = [
        (doc_id, dot / (q_norm * index.doc_norm[doc_id]))
        for doc_id, dot in dots.items()
        if dot > 0.0
    ]
    scored.sort(key=lambda hit: (-hit[1], hit[0]))
    return SearchResult(hits=tuple(scored[:top_k]))
