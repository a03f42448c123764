"""Synthetic topic-labeled corpus for desk-scale simulation runs.

Each topic owns a block of vocabulary words it samples with elevated
probability; the remaining words form a tail shared by every topic. Word
draws are i.i.d. within a document, so topic identity is carried purely by
unigram statistics.
"""

from __future__ import annotations

import numpy as np

from ..corpus import Document


def synth_corpus(
    n_topics: int = 5,
    docs_per_topic: int = 40,
    vocab_size: int = 500,
    doc_length: int = 60,
    seed: int = 0,
    topic_share: float = 0.5,
    block_fraction: float = 0.5,
) -> list[Document]:
    """Sample a corpus of n_topics * docs_per_topic single-topic documents.

    A fraction `block_fraction` of the vocabulary is split evenly into
    per-topic blocks; each word of a document comes from its topic's block
    with probability `topic_share`, else uniformly from the shared tail.
    Deterministic under `seed`.
    """
    if min(n_topics, docs_per_topic, vocab_size, doc_length) < 1:
        raise ValueError("all corpus dimensions must be at least 1")
    if not 0.0 <= topic_share <= 1.0:
        raise ValueError(f"topic_share must lie in [0, 1], got {topic_share}")
    block = max(1, int(vocab_size * block_fraction) // n_topics)
    if block * n_topics >= vocab_size:
        raise ValueError(
            f"vocab_size {vocab_size} too small for {n_topics} topic blocks of {block}"
        )
    width = len(str(vocab_size - 1))
    words = [f"w{i:0{width}d}" for i in range(vocab_size)]
    tail = words[block * n_topics :]
    rng = np.random.default_rng(seed)
    docs = []
    for topic_idx in range(n_topics):
        topic = f"topic{topic_idx:02d}"
        block_words = words[topic_idx * block : (topic_idx + 1) * block]
        for doc_idx in range(docs_per_topic):
            from_block = rng.random(doc_length) < topic_share
            block_picks = rng.integers(0, len(block_words), size=doc_length)
            tail_picks = rng.integers(0, len(tail), size=doc_length)
            text = " ".join(
                block_words[block_picks[i]] if from_block[i] else tail[tail_picks[i]]
                for i in range(doc_length)
            )
            ident = topic_idx * docs_per_topic + doc_idx
            docs.append(
                Document(
                    id=f"doc{ident:04d}",
                    title=f"{topic} sample {doc_idx}",
                    text=text,
                    topics=frozenset({topic}),
                )
            )
    return docs
