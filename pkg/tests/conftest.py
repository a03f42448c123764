from __future__ import annotations

import pytest

from prosearch.corpus import Document, build_vocab, compute_stats
from prosearch.index import build_index
from prosearch.lm.ngram import ngram_train
from prosearch.simharness import synth_corpus
from prosearch.storage import CorpusBundle


@pytest.fixture
def tiny_docs():
    return [
        Document(
            id="doc-ml",
            title="Learning machines",
            text="Machine learning is fun. Machine learning systems learn patterns.",
            topics=frozenset({"ml"}),
        ),
        Document(
            id="doc-nn",
            title="Networks",
            text="Deep networks learn layered representations of patterns.",
            topics=frozenset({"ml"}),
        ),
        Document(
            id="doc-food",
            title="Pasta night",
            text="Cooking pasta is fun. Fresh basil makes dinner shine.",
            topics=frozenset({"food"}),
        ),
        Document(
            id="doc-sky",
            title="Evening sky",
            text="The evening sky turns orange. Clouds drift over the town.",
            topics=frozenset({"weather"}),
        ),
    ]


@pytest.fixture
def tiny_vocab(tiny_docs):
    return build_vocab(tiny_docs)


@pytest.fixture
def tiny_stats(tiny_docs, tiny_vocab):
    return compute_stats(tiny_docs, tiny_vocab)


@pytest.fixture
def tiny_index(tiny_docs, tiny_vocab, tiny_stats):
    return build_index(tiny_docs, tiny_vocab, tiny_stats)


@pytest.fixture(scope="session")
def small_synth_docs():
    return synth_corpus(n_topics=3, docs_per_topic=6, vocab_size=90,
                        doc_length=30, seed=11)


@pytest.fixture(scope="session")
def small_synth_bundle(small_synth_docs):
    docs = small_synth_docs
    vocab = build_vocab(docs)
    stats = compute_stats(docs, vocab)
    index = build_index(docs, vocab, stats)
    return CorpusBundle(docs, vocab, stats, index)


@pytest.fixture(scope="session")
def small_synth_ngram(small_synth_bundle):
    return ngram_train(small_synth_bundle.docs, small_synth_bundle.vocab)
