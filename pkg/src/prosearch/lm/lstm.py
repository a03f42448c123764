"""Word-level LSTM next-word model, implemented directly on numpy arrays.

The default shape follows the common two-layer recurrent setup (gates i, f,
g, o; sigmoid gates, tanh candidate) with a configurable hidden size kept
small enough for CPU training. Training is truncated backpropagation through
time with plain SGD and global-norm gradient clipping; correctness rests on
finite-difference checks rather than corpus-scale perplexity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit as sigmoid

from ..corpus import Vocabulary
from ..errors import NumericFailure
from .base import NextWordModel, PredictionSession

GRAD_CLIP_NORM = 5.0


@dataclass(frozen=True)
class LstmConfig:
    layers: int = 2
    hidden: int = 64
    embed: int | None = None  # defaults to hidden
    unroll: int = 35
    init_scale: float = 0.08
    seed: int = 0

    @property
    def embed_dim(self) -> int:
        return self.hidden if self.embed is None else self.embed

    def validate(self) -> None:
        if self.layers < 1 or self.hidden < 1 or self.embed_dim < 1 or self.unroll < 1:
            raise ValueError("layers, hidden, embed and unroll must all be positive")


def _softmax(logits: np.ndarray) -> np.ndarray:
    # non-finite logits propagate as nan and are caught by the callers
    with np.errstate(invalid="ignore"):
        shifted = logits - logits.max()
        e = np.exp(shifted)
        return e / e.sum()


class LstmModel(NextWordModel):
    """Parameter container plus the single-step cell evaluation.

    Parameters live in a flat name -> array dict (embedding, per-layer gate
    weights w_x_l / w_h_l / b_l with gate order i, f, g, o along the last
    axis, and the output projection w_out / b_out), which keeps SGD updates
    and finite-difference checks uniform.
    """

    def __init__(self, vocab: Vocabulary, config: LstmConfig = LstmConfig()):
        config.validate()
        self.vocab = vocab
        self.config = config
        rng = np.random.default_rng(config.seed)
        s = config.init_scale
        h, e, v = config.hidden, config.embed_dim, vocab.size
        self.params: dict[str, np.ndarray] = {
            "embedding": rng.uniform(-s, s, size=(v, e)),
            "w_out": rng.uniform(-s, s, size=(h, v)),
            "b_out": np.zeros(v),
        }
        for layer in range(config.layers):
            in_dim = e if layer == 0 else h
            self.params[f"w_x_{layer}"] = rng.uniform(-s, s, size=(in_dim, 4 * h))
            self.params[f"w_h_{layer}"] = rng.uniform(-s, s, size=(h, 4 * h))
            self.params[f"b_{layer}"] = np.zeros(4 * h)

    def open_session(self) -> "LstmSession":
        return LstmSession(self)

    def zero_state(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        h = self.config.hidden
        return (
            [np.zeros(h) for _ in range(self.config.layers)],
            [np.zeros(h) for _ in range(self.config.layers)],
        )

    def step(self, state, word_id: int):
        """Advance one word; returns (new_state, cache) without the softmax."""
        h_dim = self.config.hidden
        h_prev, c_prev = state
        x = self.params["embedding"][word_id]
        h_new, c_new = [], []
        layer_caches = []
        for layer in range(self.config.layers):
            z = (
                x @ self.params[f"w_x_{layer}"]
                + h_prev[layer] @ self.params[f"w_h_{layer}"]
                + self.params[f"b_{layer}"]
            )
            i = sigmoid(z[:h_dim])
            f = sigmoid(z[h_dim : 2 * h_dim])
            g = np.tanh(z[2 * h_dim : 3 * h_dim])
            o = sigmoid(z[3 * h_dim :])
            c = f * c_prev[layer] + i * g
            tanh_c = np.tanh(c)
            h = o * tanh_c
            layer_caches.append(
                {"x": x, "h_prev": h_prev[layer], "c_prev": c_prev[layer],
                 "i": i, "f": f, "g": g, "o": o, "c": c, "tanh_c": tanh_c}
            )
            x = h
            h_new.append(h)
            c_new.append(c)
        return (h_new, c_new), {"word_id": word_id, "layers": layer_caches, "h_top": x}

    def logits(self, h_top: np.ndarray) -> np.ndarray:
        return h_top @ self.params["w_out"] + self.params["b_out"]


class LstmSession(PredictionSession):
    def __init__(self, model: LstmModel, state=None):
        self.model = model
        self.state = state if state is not None else model.zero_state()

    def reset(self) -> None:
        self.state = self.model.zero_state()

    def feed(self, word: str) -> None:
        wid = self.model.vocab.id_of(word)
        self.state, _ = self.model.step(self.state, wid)
        h, c = self.state
        if not all(np.isfinite(v).all() for v in h + c):
            raise NumericFailure("hidden state became non-finite")

    def next_distribution(self) -> np.ndarray:
        h_top = self.state[0][-1]
        return _softmax(self.model.logits(h_top))

    def fork(self) -> "LstmSession":
        h, c = self.state
        return LstmSession(self.model, state=([v.copy() for v in h], [v.copy() for v in c]))


def window_forward(model: LstmModel, state, inputs: list[int], targets: list[int]):
    """Run one unrolled window; returns (sum cross-entropy, caches, end state)."""
    caches = []
    loss = 0.0
    for wid, target in zip(inputs, targets):
        state, cache = model.step(state, wid)
        probs = _softmax(model.logits(cache["h_top"]))
        cache["probs"] = probs
        cache["target"] = target
        loss -= float(np.log(probs[target] + 1e-300))
        caches.append(cache)
    return loss, caches, state


def window_gradients(model: LstmModel, caches) -> dict[str, np.ndarray]:
    """Gradients of the summed window loss for every parameter array.

    Backpropagation runs through the window only; the state entering the
    window is treated as a constant (truncation boundary).
    """
    cfg = model.config
    grads = {name: np.zeros_like(p) for name, p in model.params.items()}
    dh_next = [np.zeros(cfg.hidden) for _ in range(cfg.layers)]
    dc_next = [np.zeros(cfg.hidden) for _ in range(cfg.layers)]
    for cache in reversed(caches):
        dlogits = cache["probs"].copy()
        dlogits[cache["target"]] -= 1.0
        h_top = cache["h_top"]
        grads["w_out"] += np.outer(h_top, dlogits)
        grads["b_out"] += dlogits
        d_from_above = model.params["w_out"] @ dlogits
        for layer in range(cfg.layers - 1, -1, -1):
            lc = cache["layers"][layer]
            dh = d_from_above + dh_next[layer]
            do = dh * lc["tanh_c"]
            dc = dh * lc["o"] * (1.0 - lc["tanh_c"] ** 2) + dc_next[layer]
            di = dc * lc["g"]
            df = dc * lc["c_prev"]
            dg = dc * lc["i"]
            dc_next[layer] = dc * lc["f"]
            dz = np.concatenate(
                [
                    di * lc["i"] * (1.0 - lc["i"]),
                    df * lc["f"] * (1.0 - lc["f"]),
                    dg * (1.0 - lc["g"] ** 2),
                    do * lc["o"] * (1.0 - lc["o"]),
                ]
            )
            grads[f"w_x_{layer}"] += np.outer(lc["x"], dz)
            grads[f"w_h_{layer}"] += np.outer(lc["h_prev"], dz)
            grads[f"b_{layer}"] += dz
            dh_next[layer] = model.params[f"w_h_{layer}"] @ dz
            d_from_above = model.params[f"w_x_{layer}"] @ dz
        grads["embedding"][cache["word_id"]] += d_from_above
    return grads


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float = GRAD_CLIP_NORM) -> float:
    """Scale all gradients in place to a global norm of at most `max_norm`."""
    total = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        for g in grads.values():
            g *= scale
    return total

def lstm_train(
    model: LstmModel,
    token_ids: list[int],
    epochs: int,
    learning_rate: float,
    unroll: int | None = None,
) -> list[float]:
    """SGD over truncated-backprop windows; returns per-epoch training perplexity.

    The recurrent state is carried across windows within an epoch (without
    gradient flow) and reset at each epoch start. Perplexity is
    exp(mean cross-entropy) over the positions visited during the epoch.
    """
    t_window = unroll if unroll is not None else model.config.unroll
    if t_window < 1:
        raise ValueError(f"unroll must be at least 1, got {t_window}")
    if len(token_ids) <= t_window:
        raise ValueError(
            f"token stream of length {len(token_ids)} is too short for unroll {t_window}"
        )
    if epochs < 0:
        raise ValueError(f"epochs must be nonnegative, got {epochs}")
    perplexities = []
    for epoch in range(epochs):
        state = model.zero_state()
        total_loss = 0.0
        total_count = 0
        for start in range(0, len(token_ids) - 1, t_window):
            inputs = token_ids[start : start + t_window]
            targets = token_ids[start + 1 : start + t_window + 1]
            inputs = inputs[: len(targets)]
            loss, caches, state = window_forward(model, state, inputs, targets)
            if not np.isfinite(loss):
                raise NumericFailure(
                    f"training diverged: non-finite loss in epoch {epoch} at position {start}"
                )
            grads = window_gradients(model, caches)
            inv = 1.0 / len(inputs)
            for g in grads.values():
                g *= inv
            clip_gradients(grads)
            for name, g in grads.items():
                model.params[name] -= learning_rate * g
            total_loss += loss
            total_count += len(inputs)
        perplexities.append(float(np.exp(total_loss / total_count)))
    return perplexities
