"""Simulation protocols: exploratory topic search and known-item re-finding.

Both tasks replay a randomly drawn document as if a user were typing it,
sliding every length-n window through the proactive query pipeline and
scoring the returned top-k. Trials are seeded individually, so results are
reproducible regardless of execution order, and paired across methods (the
same trial index draws the same input document).
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from ..corpus import Document, Vocabulary, CorpusStats, build_vocab, compute_stats, tokenize
from ..index import InvertedIndex, build_index, search
from ..intent import IntentModel, build_term_doc_matrix
from ..lm.base import NextWordModel
from ..lm.ngram import ngram_train
from ..proactive import (
    BaselineExpander,
    BeamExpander,
    IntentExpander,
    make_query,
)
from ..stopwords import STOPWORDS

log = logging.getLogger(__name__)

TASK_EXPLORATORY = "exploratory"
TASK_KNOWN_ITEM = "known-item"
METHOD_BASELINE = "baseline"
METHOD_LM = "lm"
METHOD_INTENT = "intent"

REPORT_COLUMNS = ("task", "method", "n", "trials", "mean", "stderr", "skips")


@dataclass(frozen=True)
class SimConfig:
    tasks: tuple[str, ...] = (TASK_EXPLORATORY, TASK_KNOWN_ITEM)
    methods: tuple[str, ...] = (METHOD_BASELINE, METHOD_LM, METHOD_INTENT)
    n_grid: tuple[int, ...] = (3, 5, 10, 20, 40)
    trials: int = 50
    seed: int = 0
    top_k: int = 10
    n_exp: int = 10
    vocab_size: int = 10000
    beam_b: int = 10
    beam_k: int = 80
    beam_d: int = 3
    ngram_order: int = 3
    ngram_alpha: float = 0.1
    mu: float = 1.0
    c: float = 1.0
    tau: float = 0.1
    sample_size: int = 2000


class SimResources:
    """Corpus artifacts shared by every trial: index, stats, models."""

    def __init__(
        self,
        docs: list[Document],
        vocab: Vocabulary,
        stats: CorpusStats,
        index: InvertedIndex,
        model: NextWordModel | None = None,
    ):
        if not docs:
            raise ValueError("simulation needs a nonempty corpus")
        self.docs = list(docs)
        self.by_id = {d.id: d for d in self.docs}
        self.vocab = vocab
        self.stats = stats
        self.index = index
        self.stopwords = STOPWORDS
        self._model = model
        self._intent: IntentModel | None = None

    @classmethod
    def build(cls, docs: list[Document], cfg: SimConfig, model: NextWordModel | None = None):
        vocab = build_vocab(docs, max_size=cfg.vocab_size)
        stats = compute_stats(docs, vocab)
        index = build_index(docs, vocab, stats)
        return cls(docs, vocab, stats, index, model=model)

    def next_word_model(self, cfg: SimConfig) -> NextWordModel:
        if self._model is None:
            self._model = ngram_train(
                self.docs, self.vocab, order=cfg.ngram_order, alpha=cfg.ngram_alpha
            )
        return self._model

    def intent_model(self, cfg: SimConfig) -> IntentModel:
        if self._intent is None:
            matrix = build_term_doc_matrix(
                self.docs, self.stats, self.stopwords,
                sample_size=cfg.sample_size, seed=cfg.seed,
            )
            self._intent = IntentModel(matrix, mu=cfg.mu)
        return self._intent

    def make_expander(self, method: str, cfg: SimConfig):
        """Fresh expander for one trial (intent relevance state starts empty)."""
        if method == METHOD_BASELINE:
            return BaselineExpander()
        if method == METHOD_LM:
            return BeamExpander(
                model=self.next_word_model(cfg),
                stats=self.stats,
                stopwords=self.stopwords,
                b=cfg.beam_b, k=cfg.beam_k, d=cfg.beam_d,
            )
        if method == METHOD_INTENT:
            return IntentExpander(intent=self.intent_model(cfg), c=cfg.c, tau=cfg.tau)
        raise ValueError(f"unknown method {method!r}")


@dataclass
class TaskResult:
    task: str
    method: str
    n: int
    trial_means: list[float] = field(default_factory=list)
    window_values: list[list[float]] = field(default_factory=list)
    skips: int = 0

    @property
    def completed(self) -> int:
        return len(self.trial_means)

    @property
    def mean(self) -> float:
        return float(np.mean(self.trial_means)) if self.trial_means else float("nan")

    @property
    def stderr(self) -> float:
        if len(self.trial_means) < 2:
            return 0.0
        return float(np.std(self.trial_means, ddof=1) / math.sqrt(len(self.trial_means)))


def slide_windows(tokens: list[str], n: int) -> list[list[str]]:
    """All length-n windows of consecutive tokens, stride one."""
    return [tokens[i : i + n] for i in range(len(tokens) - n + 1)]


def trial_document(docs: list[Document], seed: int, trial: int) -> Document:
    """Uniform draw, seeded per trial so trials pair across methods."""
    rng = np.random.default_rng([seed, trial])
    return docs[int(rng.integers(len(docs)))]


def search_excluding(index: InvertedIndex, query, exclude_id: str, top_k: int):
    """Top-k hits with the input document itself removed from the ranking."""
    result = search(index, query, top_k=top_k + 1)
    return [hit for hit in result.hits if hit[0] != exclude_id][:top_k]


def known_item_target(resources: SimResources, doc: Document, top_k: int = 10) -> str | None:
    """Best match for the whole input document over the rest of the corpus."""
    counts: dict[str, float] = {}
    for tok in tokenize(doc.text):
        counts[tok] = counts.get(tok, 0.0) + 1.0
    hits = search_excluding(resources.index, counts, doc.id, top_k=1)
    return hits[0][0] if hits else None


def _run_task(
    resources: SimResources,
    task: str,
    method: str,
    n: int,
    trials: int,
    seed: int,
    cfg: SimConfig,
) -> TaskResult:
    if n < 1:
        raise ValueError(f"window size must be at least 1, got {n}")
    result = TaskResult(task=task, method=method, n=n)
    for trial in range(trials):
        doc = trial_document(resources.docs, seed, trial)
        tokens = tokenize(doc.text)
        if len(tokens) < n:
            result.skips += 1
            continue
        if task == TASK_EXPLORATORY:
            targets = {
                d.id for d in resources.docs
                if d.id != doc.id and d.topics & doc.topics
            }
        else:
            target = known_item_target(resources, doc)
            if target is None:
                result.skips += 1
                continue
            targets = {target}
        expander = resources.make_expander(method, cfg)
        values = []
        for window in slide_windows(tokens, n):
            built = make_query(window, expander, n_exp=cfg.n_exp)
            hits = search_excluding(resources.index, built.query, doc.id, cfg.top_k)
            hit_ids = {h[0] for h in hits}
            if task == TASK_EXPLORATORY:
                values.append(len(hit_ids & targets) / cfg.top_k)
            else:
                values.append(1.0 if targets & hit_ids else 0.0)
        result.window_values.append(values)
        result.trial_means.append(float(np.mean(values)))
    return result


def exploratory_precision(
    resources: SimResources, method: str, n: int, trials: int, seed: int,
    cfg: SimConfig = SimConfig(),
) -> TaskResult:
    """Mean top-k precision against documents sharing a topic with the input."""
    return _run_task(resources, TASK_EXPLORATORY, method, n, trials, seed, cfg)


def known_item_found(
    resources: SimResources, method: str, n: int, trials: int, seed: int,
    cfg: SimConfig = SimConfig(),
) -> TaskResult:
    """Fraction of windows whose top-k contains the constructed target document."""
    return _run_task(resources, TASK_KNOWN_ITEM, method, n, trials, seed, cfg)


def write_report(rows: list[dict], out_dir: Path) -> Path:
    """Write report.csv with deterministic bytes (repr floats, \\n newlines)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.csv"
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow([
                row["task"], row["method"], row["n"], row["trials"],
                repr(row["mean"]), repr(row["stderr"]), row["skips"],
            ])
    return path


def plot_curves(rows: list[dict], out_dir: Path) -> list[Path]:
    """One metric-versus-n line plot per task, a line per method."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    tasks = sorted({row["task"] for row in rows})
    for task in tasks:
        fig, ax = plt.subplots(figsize=(6, 4))
        for method in sorted({r["method"] for r in rows if r["task"] == task}):
            pts = sorted(
                (r["n"], r["mean"], r["stderr"])
                for r in rows
                if r["task"] == task and r["method"] == method and not math.isnan(r["mean"])
            )
            if not pts:
                continue
            ns, means, errs = zip(*pts)
            ax.errorbar(ns, means, yerr=errs, marker="o", capsize=3, label=method)
        ax.set_xlabel("context size n (words)")
        ylabel = "precision" if task == TASK_EXPLORATORY else "fraction of targets found"
        ax.set_ylabel(ylabel)
        ax.set_title(f"{task} task")
        ax.legend()
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out_dir / f"curve_{task}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def run_suite(resources: SimResources, cfg: SimConfig, out_dir: str | Path) -> list[dict]:
    """Sweep the n grid for every configured task and method; write CSV and plots.

    A failing cell is recorded as a NaN row and the sweep continues.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for task in cfg.tasks:
        for method in cfg.methods:
            for n in cfg.n_grid:
                try:
                    res = _run_task(resources, task, method, n, cfg.trials, cfg.seed, cfg)
                    rows.append({
                        "task": task, "method": method, "n": n,
                        "trials": res.completed, "mean": res.mean,
                        "stderr": res.stderr, "skips": res.skips,
                    })
                except Exception:
                    log.exception("cell failed: task=%s method=%s n=%d", task, method, n)
                    rows.append({
                        "task": task, "method": method, "n": n,
                        "trials": 0, "mean": float("nan"),
                        "stderr": float("nan"), "skips": 0,
                    })
    write_report(rows, out)
    with open(out / "config.json", "w") as fh:
        json.dump(asdict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
    plot_curves(rows, out)
    return rows
