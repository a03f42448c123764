"""Proactive query construction: sliding context window plus expansion words.

There is no explicit user query; the window of recently written words is
weighted by in-window count and the chosen expander contributes up to n_exp
extra words. A failing expander degrades to the baseline query with a
warning rather than an error.
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .beam import beam_expand, score_candidates, select_expansion
from .corpus import CorpusStats
from .index import InvertedIndex, SearchResult, WeightedQuery, search
from .intent import IntentModel, RelevanceState, linrel_expand
from .lm.base import NextWordModel

log = logging.getLogger(__name__)

BASELINE = "baseline"
LM_BEAM = "lm-beam"
INTENT_LINREL = "intent-linrel"
EXPANDER_CHOICES = (BASELINE, LM_BEAM, INTENT_LINREL)


class Expander(Protocol):
    name: str

    def expand(self, window_words: Sequence[str], n_exp: int) -> list[tuple[str, float]]:
        """Up to n_exp (word, score) suggestions for the current window."""


class BaselineExpander:
    """No expansion; the query is the window alone."""

    name = BASELINE

    def expand(self, window_words, n_exp):
        return []


@dataclass
class BeamExpander:
    """Continuation-tree expansion scored by idf * probability."""

    model: NextWordModel
    stats: CorpusStats
    stopwords: frozenset[str]
    b: int = 10
    k: int = 80
    d: int = 3
    name: str = LM_BEAM

    def expand(self, window_words, n_exp):
        if not window_words or n_exp == 0:
            return []
        tree = beam_expand(self.model, window_words, b=self.b, k=self.k, d=self.d)
        terms = score_candidates(tree, self.stats, self.stopwords)
        chosen = select_expansion(terms, n_exp)
        by_word = {t.word: t.score for t in terms}
        return [(w, by_word[w]) for w in chosen]


@dataclass
class IntentExpander:
    """UCB word selection over the term-document matrix, with decaying relevance.

    Holds per-writing-session relevance state: one instance per trial or per
    service session, updated once per query window.
    """

    intent: IntentModel
    c: float = 1.0
    tau: float = 0.1
    state: RelevanceState = field(default=None)  # type: ignore[assignment]
    name: str = INTENT_LINREL

    def __post_init__(self):
        if self.state is None:
            self.state = RelevanceState(tau=self.tau)

    def expand(self, window_words, n_exp):
        matrix = self.intent.matrix
        self.state.update([w for w in window_words if matrix.word_row(w) is not None])
        if n_exp == 0:
            return []
        y = self.state.vector(matrix.words)
        solution = self.intent.solve(y)
        return linrel_expand(solution, matrix.words, window_words, n_exp=n_exp, c=self.c)


class ContextWindow:
    """The n most recent input words, in writing order."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"window size must be at least 1, got {n}")
        self.n = n
        self._words: deque[str] = deque(maxlen=n)

    def push(self, word: str) -> None:
        self._words.append(word)

    def words(self) -> tuple[str, ...]:
        return tuple(self._words)

    def __len__(self) -> int:
        return len(self._words)


@dataclass(frozen=True)
class QueryBuild:
    query: WeightedQuery
    expansion: tuple[tuple[str, float], ...]
    fallback: bool  # True when the expander failed and the baseline query was used


def make_query(
    window_words: Sequence[str],
    expander: Expander,
    n_exp: int = 10,
    score_weights: bool = False,
) -> QueryBuild:
    """Window words weighted by in-window count, expansion words appended.

    Expansion words get weight 1.0 unless `score_weights` asks for their
    expansion scores instead.
    """
    if not window_words:
        raise ValueError("window must be nonempty")
    query: WeightedQuery = dict(Counter(window_words))
    query = {w: float(c) for w, c in query.items()}
    fallback = False
    expansion: list[tuple[str, float]] = []
    try:
        expansion = expander.expand(window_words, n_exp)
    except Exception:
        log.warning("expander %s failed; falling back to the baseline query",
                    getattr(expander, "name", "?"), exc_info=True)
        fallback = True
        expansion = []
    for word, score in expansion:
        if word not in query:
            query[word] = float(score) if score_weights else 1.0
    return QueryBuild(query=query, expansion=tuple(expansion), fallback=fallback)


def recommend(index: InvertedIndex, query: WeightedQuery, top_k: int = 10) -> SearchResult:
    """Retrieve the top_k documents for the assembled query."""
    return search(index, query, top_k=top_k)
