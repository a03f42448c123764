"""Backoff n-gram model with add-alpha smoothing.

Deterministic by construction, which makes it the reference realization of
the next-word contract for oracle-style tests of the beam expansion.
"""

from __future__ import annotations

from collections import Counter, deque

import numpy as np

from ..corpus import Document, Vocabulary, doc_token_stream
from .base import NextWordModel, PredictionSession


class NGramModel(NextWordModel):
    """Counts for context lengths 0 .. order-1, with add-alpha smoothing.

    Prediction uses the longest context that was observed in training and
    backs off one word at a time, terminating at the unigram. Given a
    context with total count C, p(w) = (count(w) + alpha) / (C + alpha * V).
    """

    def __init__(
        self,
        vocab: Vocabulary,
        counts: list[dict[tuple[str, ...], Counter]],
        order: int,
        alpha: float,
    ):
        self.vocab = vocab
        self.order = order
        self.alpha = alpha
        self.counts = counts
        self.totals = [
            {ctx: sum(c.values()) for ctx, c in level.items()} for level in counts
        ]

    def open_session(self) -> "NGramSession":
        return NGramSession(self)

    def distribution_for(self, history: tuple[str, ...]) -> np.ndarray:
        """Next-word distribution after the (already normalized) history."""
        v = self.vocab.size
        for ctx_len in range(min(self.order - 1, len(history)), -1, -1):
            ctx = history[len(history) - ctx_len :]
            total = self.totals[ctx_len].get(ctx, 0)
            denom = total + self.alpha * v
            if denom <= 0.0:
                continue
            dist = np.full(v, self.alpha / denom)
            for word, count in self.counts[ctx_len].get(ctx, {}).items():
                dist[self.vocab.index[word]] += count / denom
            return dist
        raise ValueError("model has no counts; was it trained on an empty corpus?")


class NGramSession(PredictionSession):
    def __init__(self, model: NGramModel, history: deque | None = None):
        self.model = model
        self.history: deque = history if history is not None else deque(maxlen=max(model.order - 1, 1))

    def reset(self) -> None:
        self.history.clear()

    def feed(self, word: str) -> None:
        self.history.append(self.model.vocab.normalize(word))

    def next_distribution(self) -> np.ndarray:
        return self.model.distribution_for(tuple(self.history))

    def fork(self) -> "NGramSession":
        return NGramSession(self.model, history=self.history.copy())


def ngram_train(
    docs: list[Document],
    vocab: Vocabulary,
    order: int = 3,
    alpha: float = 0.1,
) -> NGramModel:
    """Count n-grams of orders 1..order over the corpus.

    The per-document token stream includes EOS at sentence boundaries and
    maps out-of-vocabulary tokens to UNK; contexts never cross document
    boundaries.
    """
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if not docs:
        raise ValueError("cannot train on an empty corpus")
    counts: list[dict[tuple[str, ...], Counter]] = [{} for _ in range(order)]
    total_tokens = 0
    for doc in docs:
        stream = doc_token_stream(doc, vocab)
        total_tokens += len(stream)
        for i, word in enumerate(stream):
            for ctx_len in range(min(order - 1, i) + 1):
                ctx = tuple(stream[i - ctx_len : i])
                level = counts[ctx_len]
                if ctx not in level:
                    level[ctx] = Counter()
                level[ctx][word] += 1
    if total_tokens == 0:
        raise ValueError("corpus contains no tokens")
    return NGramModel(vocab=vocab, counts=counts, order=order, alpha=alpha)
