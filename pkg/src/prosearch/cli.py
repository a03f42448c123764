"""Command-line entry points.

Verbs: ingest, query, train-lm, expand, intent-expand, simulate, serve.
Tabular output goes to stdout as TSV; floats are printed with repr so runs
with the same seed produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import storage
from .beam import beam_expand, score_candidates, select_expansion
from .corpus import build_vocab, compute_stats, tokenize
from .errors import NumericFailure
from .index import build_index, search
from .intent import (
    IntentModel,
    RelevanceState,
    build_term_doc_matrix,
    linrel_expand,
)
from .lm.lstm import LstmConfig, LstmModel, lstm_train
from .lm.ngram import ngram_train
from .simharness import SimConfig, SimResources, run_suite
from .stopwords import STOPWORDS


def _print_tsv(rows) -> None:
    for row in rows:
        print("\t".join(repr(v) if isinstance(v, float) else str(v) for v in row))


def cmd_ingest(args) -> int:
    docs = storage.read_documents(args.input)
    vocab = build_vocab(docs, max_size=args.vocab_size)
    stats = compute_stats(docs, vocab)
    index = build_index(docs, vocab, stats)
    out = storage.save_corpus_dir(docs, vocab, stats, index, args.out)
    print(f"ingested {len(docs)} documents, vocabulary {vocab.size}, into {out}")
    return 0


def cmd_query(args) -> int:
    bundle = storage.load_corpus_dir(args.index)
    words = tokenize(args.text)
    if not words:
        raise SystemExit("query text contains no words")
    query: dict[str, float] = {}
    for word in words:
        query[word] = query.get(word, 0.0) + 1.0
    result = search(bundle.index, query, top_k=args.top_k)
    _print_tsv((rank, doc_id, score)
               for rank, (doc_id, score) in enumerate(result.hits, start=1))
    return 0


def cmd_train_lm(args) -> int:
    bundle = storage.load_corpus_dir(args.corpus)
    out = Path(args.out)
    if args.model == "ngram":
        model = ngram_train(bundle.docs, bundle.vocab,
                            order=args.order, alpha=args.alpha)
        storage.save_ngram(model, out)
        print(f"saved order-{args.order} model to {out}")
        return 0
    from .corpus import doc_token_stream
    ids = []
    for doc in bundle.docs:
        ids.extend(bundle.vocab.id_of(w) for w in doc_token_stream(doc, bundle.vocab))
    cfg = LstmConfig(layers=args.layers, hidden=args.hidden,
                     unroll=args.unroll, seed=args.seed)
    model = LstmModel(bundle.vocab, cfg)
    perplexities = lstm_train(model, ids, epochs=args.epochs,
                              learning_rate=args.lr)
    storage.save_lstm(model, out)
    log_path = out.with_name(out.name + ".perplexity.csv")
    with open(log_path, "w") as fh:
        fh.write("epoch,perplexity\n")
        for epoch, perp in enumerate(perplexities, start=1):
            fh.write(f"{epoch},{repr(perp)}\n")
    print(f"saved model to {out}; perplexity log at {log_path}")
    return 0


def cmd_expand(args) -> int:
    model = storage.load_model(args.model)
    stats = storage.read_stats(Path(args.stats) / storage.STATS_FILE)
    context = tokenize(args.text)
    if not context:
        raise SystemExit("context contains no words")
    tree = beam_expand(model, context, b=args.b, k=args.k, d=args.d)
    terms = score_candidates(tree, stats, STOPWORDS)
    by_word = {t.word: t for t in terms}
    rows = []
    for word in select_expansion(terms, n_exp=args.n_exp):
        t = by_word[word]
        rows.append((t.word, t.prob, t.path_score, t.idf, t.score,
                     " ".join(t.path)))
    _print_tsv(rows)
    return 0


def cmd_intent_expand(args) -> int:
    bundle = storage.load_corpus_dir(args.index)
    window = tokenize(args.text)
    if not window:
        raise SystemExit("window contains no words")
    matrix = build_term_doc_matrix(bundle.docs, bundle.stats, STOPWORDS,
                                   sample_size=args.sample, seed=args.seed)
    manifest = {
        "doc_ids": list(matrix.doc_ids),
        "sample_size": args.sample,
        "seed": args.seed,
        "terms": len(matrix.words),
    }
    manifest_path = Path(args.manifest) if args.manifest else \
        Path(args.index) / "intent_sample.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    state = RelevanceState(tau=args.tau)
    known = set(matrix.words)
    state.update([w for w in window if w in known])
    solution = IntentModel(matrix, mu=args.mu).solve(state.vector(matrix.words))
    chosen = linrel_expand(solution, matrix.words, window_words=set(window),
                           n_exp=args.n_exp, c=args.c)
    row_of = {w: i for i, w in enumerate(matrix.words)}
    rows = []
    for word, value in chosen:
        i = row_of[word]
        rows.append((word, float(solution.y_hat[i]),
                     float(solution.sigma_hat[i]), value))
    _print_tsv(rows)
    return 0


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        grid = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise SystemExit(f"bad n-grid {text!r}; expected comma-separated integers")
    if not grid or any(n < 1 for n in grid):
        raise SystemExit(f"bad n-grid {text!r}; window sizes must be >= 1")
    return grid


def cmd_simulate(args) -> int:
    bundle = storage.load_corpus_dir(args.corpus)
    tasks = ("exploratory", "known-item") if args.task == "all" else (args.task,)
    methods = ("baseline", "lm", "intent") if args.method == "all" else (args.method,)
    cfg = SimConfig(tasks=tasks, methods=methods, n_grid=_parse_grid(args.n_grid),
                    trials=args.trials, seed=args.seed)
    model = storage.load_model(args.model) if args.model else None
    resources = SimResources(bundle.docs, bundle.vocab, bundle.stats,
                             bundle.index, model=model)
    rows = run_suite(resources, cfg, args.out)
    print(f"wrote {len(rows)} result rows to {Path(args.out) / 'report.csv'}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app

    bundle = storage.load_corpus_dir(args.index)
    model = storage.load_model(args.model) if args.model else None
    app = create_app(bundle, model=model, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prosearch",
        description="Proactive document retrieval from written context",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build vocabulary, stats, and index")
    p.add_argument("--input", required=True, help="JSONL corpus file")
    p.add_argument("--vocab-size", type=int, default=10000)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="search the index with plain text")
    p.add_argument("--index", required=True, help="ingest output directory")
    p.add_argument("--text", required=True)
    p.add_argument("--top-k", type=int, default=10)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("train-lm", help="train a next-word model")
    p.add_argument("--model", choices=("ngram", "lstm"), required=True)
    p.add_argument("--corpus", required=True, help="ingest output directory")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--unroll", type=int, default=35)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("expand", help="beam-expand a written context")
    p.add_argument("--model", required=True, help="trained model file")
    p.add_argument("--stats", required=True, help="ingest output directory")
    p.add_argument("--text", required=True)
    p.add_argument("--b", type=int, default=10)
    p.add_argument("--k", type=int, default=80)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n-exp", type=int, default=10)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("intent-expand", help="expansion words from the intent model")
    p.add_argument("--index", required=True, help="ingest output directory")
    p.add_argument("--sample", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--n-exp", type=int, default=10)
    p.add_argument("--text", required=True, help="current window of words")
    p.add_argument("--manifest", help="where to persist the sampled doc ids")
    p.set_defaults(func=cmd_intent_expand)

    p = sub.add_parser("simulate", help="run the writing simulations")
    p.add_argument("--task", choices=("exploratory", "known-item", "all"),
                   default="all")
    p.add_argument("--method", choices=("baseline", "lm", "intent", "all"),
                   default="all")
    p.add_argument("--corpus", required=True, help="ingest output directory")
    p.add_argument("--model", help="trained model file for the lm method")
    p.add_argument("--n-grid", default="3,5,10,20,40")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the recommendation service")
    p.add_argument("--index", required=True, help="ingest output directory")
    p.add_argument("--model", help="trained model file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--static", help="directory with the editor frontend build")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        raise SystemExit(f"error: {exc}")
    except (ValueError, NumericFailure) as exc:
        raise SystemExit(f"error: {exc}")


if __name__ == "__main__":
    sys.exit(main())
