"""Independent oracles and adversarial models used across the test suite.

Everything here recomputes results from definitions, avoiding the code paths
under test: dense cosine scoring instead of the inverted index, explicit
matrix inverses instead of Cholesky solves, fresh re-fed sessions instead of
forked beam frontiers, scalar loops instead of vectorized cell math.
"""

from __future__ import annotations

import math

import numpy as np

from prosearch.corpus import Document, Vocabulary, CorpusStats, UNK, tokenize
from prosearch.lm.base import NextWordModel, PredictionSession


# ---------------------------------------------------------------- retrieval

def dense_ranking(docs, stats, query, top_k):
    """Cosine ranking computed from dicts, no postings or norms caching."""
    vectors = {}
    for doc in docs:
        vec = {}
        for tok in tokenize(doc.text):
            idf = stats.idf.get(tok)
            if idf is not None:
                vec[tok] = vec.get(tok, 0.0) + idf
        vectors[doc.id] = vec
    q_norm = math.sqrt(sum(w * w for w in query.values()))
    if q_norm == 0.0:
        return []
    scored = []
    for doc_id, vec in vectors.items():
        dot = sum(w * vec.get(t, 0.0) for t, w in query.items())
        d_norm = math.sqrt(sum(v * v for v in vec.values()))
        if dot > 0.0 and d_norm > 0.0:
            scored.append((dot / (q_norm * d_norm), doc_id))
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    return [(doc_id, score) for score, doc_id in scored[:top_k]]


# ------------------------------------------------------------ beam expansion

class HashSession(PredictionSession):
    def __init__(self, model):
        self.model = model
        self.history: list[str] = []

    def reset(self):
        self.history = []

    def feed(self, word):
        self.history.append(self.model.vocab.normalize(word))

    def next_distribution(self):
        return self.model.distribution_for(tuple(self.history))

    def fork(self):
        child = HashSession(self.model)
        child.history = list(self.history)
        return child


class HashModel(NextWordModel):
    """Next-word model whose distribution depends on the entire history.

    The full history seeds an RNG, so any mix-up in session forking or
    context feeding changes the distribution and gets caught. A configurable
    fraction of words is zeroed to exercise zero-probability exclusion.
    """

    def __init__(self, vocab: Vocabulary, seed: int = 0, zero_fraction: float = 0.0):
        self.vocab = vocab
        self.seed = seed
        self.zero_fraction = zero_fraction

    def open_session(self):
        return HashSession(self)

    def distribution_for(self, history: tuple[str, ...]) -> np.ndarray:
        ids = [self.vocab.id_of(w) for w in history]
        rng = np.random.default_rng([self.seed, len(ids)] + ids)
        probs = rng.random(self.vocab.size) + 1e-3
        if self.zero_fraction > 0.0:
            mask = rng.random(self.vocab.size) < self.zero_fraction
            # never zero everything
            mask[int(rng.integers(self.vocab.size))] = False
            probs[mask] = 0.0
        return probs / probs.sum()


def oracle_top_b(dist, vocab, b, exclude=frozenset()):
    """Top-b words by (probability desc, word asc), zeros and excluded out."""
    pairs = [
        (float(p), w)
        for w, p in zip(vocab.words, dist)
        if p > 0.0 and w not in exclude
    ]
    pairs.sort(key=lambda t: (-t[0], t[1]))
    return [(w, p) for p, w in pairs[:b]]


def oracle_beam_levels(model, context, b, k, d):
    """Re-derive the pruned tree from an exhaustive enumeration.

    First materializes the whole b-ary continuation tree (every node's top-b
    children regardless of pruning), with a fresh session re-fed from
    scratch for each path prefix, path products multiplied out explicitly.
    Then selects per level the top-k among nodes whose parent survived the
    previous level. Independent of the fork-based incremental traversal it
    checks. Returns one list per level of (word, prob, path_score, path).
    """

    def dist_after(prefix):
        session = model.open_session()
        session.reset()
        for word in list(context) + list(prefix):
            session.feed(word)
        return session.next_distribution()

    def product(probs):
        total = 1.0
        for p in probs:
            total = total * p
        return total

    all_levels = []
    prob_along = {(): []}
    frontier_paths = [()]
    for _level in range(1, d + 1):
        nodes = []
        for path in frontier_paths:
            for word, prob in oracle_top_b(dist_after(path), model.vocab, b,
                                           exclude=frozenset({UNK})):
                new_path = path + (word,)
                prob_along[new_path] = prob_along[path] + [float(prob)]
                nodes.append((word, float(prob), product(prob_along[new_path]),
                              new_path, path))
        if not nodes:
            break
        all_levels.append(nodes)
        frontier_paths = [n[3] for n in nodes]

    levels = []
    alive = {()}
    for nodes in all_levels:
        reachable = [n for n in nodes if n[4] in alive]
        reachable.sort(key=lambda n: (-n[2], -n[1], n[0]))
        survivors = reachable[:k]
        if not survivors:
            break
        levels.append([(n[0], n[1], n[2], n[3]) for n in survivors])
        alive = {n[3] for n in survivors}
    return levels


# ------------------------------------------------------------------- linrel

def explicit_linrel(x, y, mu):
    """LinRel quantities via an explicit inverse: the textbook formulas."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = x.shape[1]
    gram_inv = np.linalg.inv(x.T @ x + mu * np.eye(m))
    w_hat = gram_inv @ x.T @ y
    y_hat = x @ w_hat
    a = x @ gram_inv @ x.T
    sigma_hat = (a * a).sum(axis=1)
    return w_hat, y_hat, sigma_hat


# --------------------------------------------------------------------- lstm

def scalar_lstm_step(model, state, word_id):
    """One cell step written with python loops over scalar gate equations.

    State layout mirrors the implementation: (list of h per layer,
    list of c per layer).
    """

    def sigmoid(v):
        return 1.0 / (1.0 + math.exp(-v))

    cfg = model.config
    h_dim = cfg.hidden
    x = [float(v) for v in model.params["embedding"][word_id]]
    hs, cs = state
    new_hs, new_cs = [], []
    for layer in range(cfg.layers):
        w_x = model.params[f"w_x_{layer}"]
        w_h = model.params[f"w_h_{layer}"]
        b = model.params[f"b_{layer}"]
        h_prev, c_prev = hs[layer], cs[layer]
        gates = []
        for j in range(4 * h_dim):
            total = b[j]
            for i_in, x_v in enumerate(x):
                total += x_v * w_x[i_in, j]
            for i_h in range(h_dim):
                total += float(h_prev[i_h]) * w_h[i_h, j]
            gates.append(total)
        h_new, c_new = [], []
        for j in range(h_dim):
            i_g = sigmoid(gates[j])
            f_g = sigmoid(gates[h_dim + j])
            g_g = math.tanh(gates[2 * h_dim + j])
            o_g = sigmoid(gates[3 * h_dim + j])
            c_j = f_g * float(c_prev[j]) + i_g * g_g
            h_j = o_g * math.tanh(c_j)
            c_new.append(c_j)
            h_new.append(h_j)
        new_hs.append(np.array(h_new))
        new_cs.append(np.array(c_new))
        x = h_new
    new_state = (new_hs, new_cs)
    logits = []
    w_out = model.params["w_out"]
    b_out = model.params["b_out"]
    for v in range(model.vocab.size):
        total = float(b_out[v])
        for j in range(h_dim):
            total += x[j] * float(w_out[j, v])
        logits.append(total)
    peak = max(logits)
    exps = [math.exp(v - peak) for v in logits]
    denom = sum(exps)
    return new_state, np.array([e / denom for e in exps])


def numeric_gradients(model, inputs, targets, eps=1e-5):
    """Central finite differences of the summed window loss, per parameter."""
    from prosearch.lm.lstm import window_forward

    grads = {}
    for name, value in model.params.items():
        grad = np.zeros_like(value)
        flat = value.ravel()
        grad_flat = grad.ravel()
        for idx in range(flat.size):
            saved = flat[idx]
            flat[idx] = saved + eps
            up, _, _ = window_forward(model, model.zero_state(), inputs, targets)
            flat[idx] = saved - eps
            down, _, _ = window_forward(model, model.zero_state(), inputs, targets)
            flat[idx] = saved
            grad_flat[idx] = (up - down) / (2.0 * eps)
        grads[name] = grad
    return grads


# ------------------------------------------------------------------ corpora

def word_soup_corpus(n_docs, vocab_words, doc_len, rng):
    """Uniform random documents over an arbitrary word list."""
    docs = []
    for i in range(n_docs):
        words = [vocab_words[int(rng.integers(len(vocab_words)))]
                 for _ in range(doc_len)]
        docs.append(Document(
            id=f"d{i:03d}",
            title=f"doc {i}",
            text=" ".join(words),
            topics=frozenset({f"t{int(rng.integers(3))}"}),
        ))
    return docs


def make_stats(docs, vocab):
    from prosearch.corpus import compute_stats
    return compute_stats(docs, vocab)
