"""Beam-search expansion of the written context into a pruned prediction tree.

The latest input word is the tree root. Each level holds at most k surviving
nodes; every node carries the product of word probabilities along its path
(the root contributes a factor of 1). Surviving words are scored by
idf * probability and the best become query expansion terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .corpus import UNK, CorpusStats
from .lm.base import NextWordModel, top_candidates


@dataclass
class BeamNode:
    word: str
    level: int
    prob: float
    parent: Optional["BeamNode"]
    score: float  # product of probabilities on the path from the root

    def path(self) -> tuple[str, ...]:
        """Words from the root to this node, root first."""
        words = []
        node: Optional[BeamNode] = self
        while node is not None:
            words.append(node.word)
            node = node.parent
        return tuple(reversed(words))


@dataclass
class BeamTree:
    context: tuple[str, ...]
    b: int
    k: int
    d: int
    levels: list[list[BeamNode]] = field(default_factory=list)

    @property
    def root_word(self) -> str:
        return self.context[-1]

    def nodes(self):
        for level in self.levels:
            yield from level


@dataclass(frozen=True)
class ExpansionTerm:
    word: str
    score: float  # idf * probability
    prob: float
    path_score: float  # probability product along the node's path
    idf: float
    level: int
    path: tuple[str, ...]


def beam_expand(
    model: NextWordModel,
    context: Sequence[str],
    b: int = 10,
    k: int = 80,
    d: int = 3,
) -> BeamTree:
    """Grow and prune the continuation tree for the given context.

    The model session is reset and fed the whole context in order, so every
    prediction conditions on all input words. Level 1 holds the top-b
    successors of the context; each later level grows from the k survivors
    of the previous one. Pruning keeps the k highest path scores, ties
    broken by higher node probability then lexicographic word. UNK and
    zero-probability words never enter the tree.
    """
    if not context:
        raise ValueError("context must be nonempty")
    if b < 1 or k < 1:
        raise ValueError(f"b and k must be at least 1, got b={b} k={k}")
    if d < 0:
        raise ValueError(f"d must be nonnegative, got {d}")
    tree = BeamTree(context=tuple(context), b=b, k=k, d=d)
    session = model.open_session()
    session.reset()
    for word in context:
        session.feed(word)
    frontier = [(None, session)]  # (parent node, session fed with context+path)
    exclude = frozenset({UNK})
    for level in range(1, d + 1):
        candidates = []
        for parent, sess in frontier:
            dist = sess.next_distribution()
            parent_score = 1.0 if parent is None else parent.score
            for word, prob in top_candidates(dist, model.vocab, b, exclude=exclude):
                candidates.append(
                    BeamNode(word=word, level=level, prob=prob, parent=parent,
                             score=parent_score * prob)
                )
        candidates.sort(key=lambda n: (-n.score, -n.prob, n.word))
        survivors = candidates[:k]
        if not survivors:
            break
        tree.levels.append(survivors)
        if level == d:
            break
        next_frontier = []
        for node in survivors:
            sess = _session_of(node, frontier).fork()
            sess.feed(node.word)
            next_frontier.append((node, sess))
        frontier = next_frontier
    return tree


def _session_of(node: BeamNode, frontier):
    for parent, sess in frontier:
        if parent is node.parent:
            return sess
    raise RuntimeError("beam frontier lost a parent session")


def score_candidates(
    tree: BeamTree,
    stats: CorpusStats,
    stopwords: frozenset[str],
) -> list[ExpansionTerm]:
    """Score every surviving word by idf * probability.

    Stop words, reserved tokens, words already in the input context, and
    words without an idf value are dropped. A word surviving at several
    nodes keeps its highest-scoring occurrence. Sorted by descending score,
    ties lexicographic.
    """
    context_words = set(tree.context)
    best: dict[str, ExpansionTerm] = {}
    for node in tree.nodes():
        word = node.word
        if word in stopwords or word in context_words:
            continue
        idf = stats.idf_of(word)
        if idf is None:  # reserved tokens and words absent from the corpus
            continue
        score = idf * node.prob
        kept = best.get(word)
        if kept is None or score > kept.score:
            best[word] = ExpansionTerm(
                word=word, score=score, prob=node.prob, path_score=node.score,
                idf=idf, level=node.level, path=node.path(),
            )
    return sorted(best.values(), key=lambda t: (-t.score, t.word))


def select_expansion(terms: Sequence[ExpansionTerm], n_exp: int = 10) -> list[str]:
    """The n_exp highest-scoring words; fewer when fewer candidates survive."""
    if n_exp < 0:
        raise ValueError(f"n_exp must be nonnegative, got {n_exp}")
    ranked = sorted(terms, key=lambda t: (-t.score, t.word))
    return [t.word for t in ranked[:n_exp]]
