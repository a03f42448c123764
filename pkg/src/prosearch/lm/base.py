"""Next-word model contract shared by the n-gram and LSTM realizations.

A model is immutable once trained; prediction state lives in sessions. A
session is single-owner mutable state: one session must not be driven from
two concurrent callers, but any number of sessions over one model may run
concurrently.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from ..corpus import Vocabulary


class PredictionSession(ABC):
    """Stateful handle over one model: feed words, read the next-word distribution.

    The distribution depends on the entire fed history, not only the latest
    word.
    """

    @abstractmethod
    def reset(self) -> None:
        """Forget all fed history."""

    @abstractmethod
    def feed(self, word: str) -> None:
        """Consume one word (out-of-vocabulary words are treated as UNK)."""

    @abstractmethod
    def next_distribution(self) -> np.ndarray:
        """Probability vector over the vocabulary; entries >= 0, sum 1."""

    @abstractmethod
    def fork(self) -> "PredictionSession":
        """Independent copy of this session's state, over the same model."""


class NextWordModel(ABC):
    """A trained predictive model able to open prediction sessions."""

    vocab: Vocabulary

    @abstractmethod
    def open_session(self) -> PredictionSession: ...


def top_candidates(
    dist: np.ndarray,
    vocab: Vocabulary,
    b: int,
    exclude: frozenset[str] = frozenset(),
) -> list[tuple[str, float]]:
    """The `b` highest-probability words with their raw probabilities.

    Probability ties break lexicographically. Zero-probability words are
    never candidates, so fewer than `b` pairs come back when the support is
    small. `b` larger than the vocabulary is clamped.
    """
    if b < 1:
        raise ValueError(f"b must be at least 1, got {b}")
    b = min(b, vocab.size)
    p = dist
    if exclude:
        p = dist.copy()
        for word in exclude:
            idx = vocab.index.get(word)
            if idx is not None:
                p[idx] = 0.0
    if b < p.size:
        part = np.argpartition(p, p.size - b)[p.size - b :]
        threshold = p[part].min()
    else:
        threshold = 0.0
    above = np.flatnonzero(p > max(threshold, 0.0))
    picked = [(float(p[i]), vocab.words[i]) for i in above]
    picked.sort(key=lambda t: (-t[0], t[1]))
    if len(picked) < b:
        at = np.flatnonzero(p == threshold) if threshold > 0.0 else np.empty(0, dtype=int)
        ties = sorted(vocab.words[i] for i in at)
        picked.extend((float(threshold), w) for w in ties[: b - len(picked)])
    return [(w, prob) for prob, w in picked[:b]]
