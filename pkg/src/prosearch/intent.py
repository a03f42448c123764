"""User intent model: ridge-regularized relevance estimation with UCB selection.

A term-document tf-idf matrix X (rows: non-stop-word vocabulary, columns:
training documents) links a decaying word-relevance vector y to an intent
estimate over documents. Solving the regularized system gives relevance
estimates y_hat for every word plus a per-word confidence width, and words
are picked by the upper confidence bound y_hat + c * width.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .corpus import CorpusStats, Document, tokenize
from .errors import NumericFailure

DEFAULT_MU = 1.0
DEFAULT_C = 1.0
DEFAULT_TAU = 0.1
DEFAULT_SAMPLE = 2000


@dataclass(frozen=True)
class TermDocMatrix:
    """tf-idf matrix over the sampled training documents.

    Rows are the lexicographically sorted words occurring in the sample
    (stop words excluded); columns follow the sampled documents in corpus
    order. The sampled ids are kept as a manifest for reproducibility.
    """

    words: tuple[str, ...]
    doc_ids: tuple[str, ...]
    x: np.ndarray  # shape (len(words), len(doc_ids))

    def word_row(self, word: str) -> int | None:
        i = np.searchsorted(self.words, word)
        if i < len(self.words) and self.words[i] == word:
            return int(i)
        return None


def build_term_doc_matrix(
    docs: Sequence[Document],
    stats: CorpusStats,
    stopwords: frozenset[str],
    sample_size: int = DEFAULT_SAMPLE,
    seed: int = 0,
) -> TermDocMatrix:
    """Sample up to `sample_size` documents (seeded, without replacement).

    The column-count cap keeps the cubic-cost solve tractable; tf-idf values
    use raw term frequency times the corpus idf, matching the index.
    """
    if not docs:
        raise ValueError("cannot build a term-document matrix from an empty corpus")
    if sample_size < 1:
        raise ValueError(f"sample_size must be at least 1, got {sample_size}")
    if sample_size < len(docs):
        rng = np.random.default_rng(seed)
        chosen = sorted(rng.choice(len(docs), size=sample_size, replace=False))
        sample = [docs[i] for i in chosen]
    else:
        sample = list(docs)
    doc_terms = []
    vocab_words = set()
    for doc in sample:
        counts: dict[str, int] = {}
        for tok in tokenize(doc.text):
            if tok in stopwords or tok not in stats.idf:
                continue
            counts[tok] = counts.get(tok, 0) + 1
        doc_terms.append(counts)
        vocab_words.update(counts)
    words = tuple(sorted(vocab_words))
    row = {w: i for i, w in enumerate(words)}
    x = np.zeros((len(words), len(sample)))
    for j, counts in enumerate(doc_terms):
        for word, tf in counts.items():
            x[row[word], j] = tf * stats.idf[word]
    return TermDocMatrix(words=words, doc_ids=tuple(d.id for d in sample), x=x)


class RelevanceState:
    """Decaying word-relevance vector driven by successive input windows.

    A word seen in the current window has relevance 1. Each window without
    the word increments its age counter n, giving relevance 1/n, which is
    cut to zero once it falls strictly below the threshold tau.
    """

    def __init__(self, tau: float = DEFAULT_TAU):
        if not 0.0 < tau <= 1.0:
            raise ValueError(f"tau must lie in (0, 1], got {tau}")
        self.tau = tau
        self.age: dict[str, int] = {}

    def update(self, window_words: Sequence[str]) -> None:
        """Advance one window: reset seen words, age the rest."""
        for word in list(self.age):
            self.age[word] += 1
            if 1.0 / self.age[word] < self.tau:
                del self.age[word]
        for word in window_words:
            self.age[word] = 1

    def relevance(self, word: str) -> float:
        n = self.age.get(word)
        return 0.0 if n is None else 1.0 / n

    def vector(self, words: Sequence[str]) -> np.ndarray:
        """Relevance vector aligned with `words`; untracked words are 0."""
        return np.array([self.relevance(w) for w in words])


@dataclass(frozen=True)
class LinRelSolution:
    """Intent weights over documents plus per-word estimates and widths."""

    w_hat: np.ndarray  # document weights, length M
    y_hat: np.ndarray  # relevance estimates, length V'
    sigma_hat: np.ndarray  # confidence widths (squared row norms), length V'

    def ucb(self, c: float) -> np.ndarray:
        return self.y_hat + c * self.sigma_hat


def linrel_solve(x: np.ndarray, y: np.ndarray, mu: float = DEFAULT_MU) -> LinRelSolution:
    """Solve the regularized system (X^T X + mu I) w = X^T y.

    Uses a symmetric positive-definite factorization, never an explicit
    inverse. y_hat = X w and sigma_hat_i is the squared Euclidean norm of
    row i of A = X (X^T X + mu I)^-1 X^T, computed through the factorization.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ValueError(f"shape mismatch: X is {x.shape}, y is {y.shape}")
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    m = x.shape[1]
    gram = x.T @ x + mu * np.eye(m)
    try:
        factor = cho_factor(gram)
    except LinAlgError as exc:
        raise NumericFailure(
            f"regularized system is not positive definite (mu={mu}); "
            "increase mu for a rank-deficient matrix"
        ) from exc
    w_hat = cho_solve(factor, x.T @ y)
    y_hat = x @ w_hat
    # row_i(A) = x_i^T G^-1 X^T, so |row_i(A)|^2 = x_i^T (G^-1 X^T X G^-1) x_i.
    inner = cho_solve(factor, cho_solve(factor, x.T @ x).T)
    sigma_hat = np.einsum("ij,ij->i", x @ inner, x)
    return LinRelSolution(w_hat=w_hat, y_hat=y_hat, sigma_hat=np.maximum(sigma_hat, 0.0))


def linrel_expand(
    solution: LinRelSolution,
    words: Sequence[str],
    window_words: Sequence[str],
    n_exp: int = 10,
    c: float = DEFAULT_C,
) -> list[tuple[str, float]]:
    """Top n_exp words by upper confidence bound, window words excluded.

    `words` aligns positions of the solution vectors with word strings (stop
    words were already excluded from the matrix rows). Ties break
    lexicographically.
    """
    if n_exp < 0:
        raise ValueError(f"n_exp must be nonnegative, got {n_exp}")
    if c < 0:
        raise ValueError(f"c must be nonnegative, got {c}")
    v = solution.ucb(c)
    skip = set(window_words)
    ranked = sorted(
        ((word, float(v[i])) for i, word in enumerate(words) if word not in skip),
        key=lambda t: (-t[1], t[0]),
    )
    return ranked[:n_exp]


class IntentModel:
    """Factored solver bound to one term-document matrix.

    The Gram factorization and the (y-independent) confidence widths are
    computed once; each window then costs only two matrix-vector products.
    Results match `linrel_solve` on the same inputs.
    """

    def __init__(self, matrix: TermDocMatrix, mu: float = DEFAULT_MU):
        self.matrix = matrix
        self.mu = mu
        x = matrix.x
        m = x.shape[1]
        gram = x.T @ x + mu * np.eye(m)
        try:
            self._factor = cho_factor(gram)
        except LinAlgError as exc:
            raise NumericFailure(
                f"regularized system is not positive definite (mu={mu})"
            ) from exc
        inner = cho_solve(self._factor, cho_solve(self._factor, x.T @ x).T)
        self.sigma_hat = np.maximum(np.einsum("ij,ij->i", x @ inner, x), 0.0)

    def solve(self, y: np.ndarray) -> LinRelSolution:
        if y.shape != (self.matrix.x.shape[0],):
            raise ValueError(f"y has shape {y.shape}, expected ({self.matrix.x.shape[0]},)")
        w_hat = cho_solve(self._factor, self.matrix.x.T @ y)
        return LinRelSolution(
            w_hat=w_hat, y_hat=self.matrix.x @ w_hat, sigma_hat=self.sigma_hat
        )
