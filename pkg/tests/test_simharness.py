from __future__ import annotations

import json
import math
from collections import Counter

import numpy as np
import pytest

from prosearch.corpus import tokenize
from prosearch.simharness import synth_corpus
from prosearch.simharness.run import (
    METHOD_BASELINE,
    METHOD_INTENT,
    METHOD_LM,
    REPORT_COLUMNS,
    TASK_EXPLORATORY,
    TASK_KNOWN_ITEM,
    SimConfig,
    SimResources,
    TaskResult,
    exploratory_precision,
    known_item_found,
    known_item_target,
    run_suite,
    search_excluding,
    slide_windows,
    trial_document,
)

from helpers import dense_ranking


class TestSynthCorpus:
    def test_shape_and_determinism(self):
        a = synth_corpus(n_topics=3, docs_per_topic=4, vocab_size=60,
                         doc_length=20, seed=5)
        b = synth_corpus(n_topics=3, docs_per_topic=4, vocab_size=60,
                         doc_length=20, seed=5)
        assert len(a) == 12
        assert a == b
        c = synth_corpus(n_topics=3, docs_per_topic=4, vocab_size=60,
                         doc_length=20, seed=6)
        assert a != c

    def test_one_topic_per_doc_and_lengths(self):
        docs = synth_corpus(n_topics=2, docs_per_topic=3, vocab_size=40,
                            doc_length=15, seed=0)
        for doc in docs:
            assert len(doc.topics) == 1
            assert len(doc.text.split()) == 15

    def test_block_words_stay_in_their_topic(self):
        docs = synth_corpus(n_topics=2, docs_per_topic=10, vocab_size=40,
                            doc_length=50, seed=1, topic_share=0.6)
        by_topic = {}
        for doc in docs:
            topic = next(iter(doc.topics))
            by_topic.setdefault(topic, set()).update(doc.text.split())
        # block words: w000-w009 topic00, w010-w019 topic01; tail w020+
        t0_only = {w for w in by_topic["topic00"] if int(w[1:]) < 10}
        t1_only = {w for w in by_topic["topic01"] if 10 <= int(w[1:]) < 20}
        assert t0_only and t1_only
        assert not (by_topic["topic01"] & t0_only)
        assert not (by_topic["topic00"] & t1_only)

    def test_validation(self):
        with pytest.raises(ValueError):
            synth_corpus(n_topics=0)
        with pytest.raises(ValueError):
            synth_corpus(topic_share=1.5)
        with pytest.raises(ValueError):
            synth_corpus(n_topics=10, vocab_size=10)


class TestTrialMechanics:
    def test_slide_windows(self):
        toks = ["a", "b", "c", "d"]
        assert slide_windows(toks, 2) == [["a", "b"], ["b", "c"], ["c", "d"]]
        assert slide_windows(toks, 4) == [toks]
        assert slide_windows(toks, 5) == []

    def test_trial_document_paired_and_seeded(self, small_synth_docs):
        d1 = trial_document(small_synth_docs, seed=0, trial=3)
        d2 = trial_document(small_synth_docs, seed=0, trial=3)
        assert d1.id == d2.id
        draws = {trial_document(small_synth_docs, 0, t).id for t in range(20)}
        assert len(draws) > 1

    def test_search_excluding_drops_input_doc(self, small_synth_bundle):
        docs = small_synth_bundle.docs
        doc = docs[0]
        query = dict(Counter(tokenize(doc.text)))
        hits = search_excluding(small_synth_bundle.index, query, doc.id, top_k=5)
        assert len(hits) <= 5
        assert doc.id not in {h[0] for h in hits}

    def test_known_item_target_is_nearest_neighbor(self, small_synth_bundle):
        cfg = SimConfig()
        res = SimResources(small_synth_bundle.docs, small_synth_bundle.vocab,
                           small_synth_bundle.stats, small_synth_bundle.index)
        doc = res.docs[0]
        target = known_item_target(res, doc)
        assert target is not None and target != doc.id
        query = dict(Counter(tokenize(doc.text)))
        oracle = dense_ranking(res.docs, res.stats, query, top_k=2)
        oracle_ids = [d for d, _ in oracle if d != doc.id]
        assert target == oracle_ids[0]


class TestTaskResult:
    def test_empty_mean_is_nan(self):
        res = TaskResult(task=TASK_EXPLORATORY, method=METHOD_BASELINE, n=3)
        assert math.isnan(res.mean)
        assert res.stderr == 0.0
        assert res.completed == 0

    def test_stderr_hand_value(self):
        res = TaskResult(task=TASK_EXPLORATORY, method=METHOD_BASELINE, n=3,
                         trial_means=[0.0, 1.0])
        assert res.mean == 0.5
        assert res.stderr == pytest.approx(0.5)


@pytest.fixture(scope="module")
def sim_resources(small_synth_docs):
    cfg = SimConfig(trials=6, n_grid=(3, 8), vocab_size=10_000)
    return SimResources.build(small_synth_docs, cfg), cfg


class TestExploratory:
    def test_baseline_matches_dense_oracle(self, sim_resources):
        resources, cfg = sim_resources
        trials, n = 4, 5
        got = exploratory_precision(resources, METHOD_BASELINE, n, trials,
                                    seed=cfg.seed, cfg=cfg)
        want_means = []
        for trial in range(trials):
            doc = trial_document(resources.docs, cfg.seed, trial)
            toks = tokenize(doc.text)
            assert len(toks) >= n
            share = {d.id for d in resources.docs
                     if d.id != doc.id and d.topics & doc.topics}
            vals = []
            for window in slide_windows(toks, n):
                query = {w: float(c) for w, c in Counter(window).items()}
                ranked = dense_ranking(resources.docs, resources.stats, query,
                                       top_k=cfg.top_k + 1)
                ids = [d for d, _ in ranked if d != doc.id][: cfg.top_k]
                vals.append(len(set(ids) & share) / cfg.top_k)
            want_means.append(float(np.mean(vals)))
        assert got.trial_means == pytest.approx(want_means, abs=1e-12)
        assert got.skips == 0

    def test_all_methods_run_and_pair_documents(self, sim_resources):
        resources, cfg = sim_resources
        results = {m: exploratory_precision(resources, m, 4, 3, cfg.seed, cfg)
                   for m in (METHOD_BASELINE, METHOD_LM, METHOD_INTENT)}
        for res in results.values():
            assert res.completed == 3
            for mean in res.trial_means:
                assert 0.0 <= mean <= 1.0

    def test_short_documents_are_skipped(self, sim_resources):
        resources, cfg = sim_resources
        # every synthetic doc is 30 words; a 31-word window skips all trials
        res = exploratory_precision(resources, METHOD_BASELINE, 31, 5,
                                    cfg.seed, cfg)
        assert res.skips == 5
        assert res.completed == 0
        assert math.isnan(res.mean)

    def test_invalid_window_rejected(self, sim_resources):
        resources, cfg = sim_resources
        with pytest.raises(ValueError):
            exploratory_precision(resources, METHOD_BASELINE, 0, 2, 0, cfg)


class TestKnownItem:
    def test_whole_doc_window_usually_finds_target(self, sim_resources):
        resources, cfg = sim_resources
        res = known_item_found(resources, METHOD_BASELINE, 30, 8, cfg.seed, cfg)
        assert res.completed > 0
        assert res.mean > 0.5

    def test_values_are_indicator_means(self, sim_resources):
        resources, cfg = sim_resources
        res = known_item_found(resources, METHOD_BASELINE, 10, 4, cfg.seed, cfg)
        for values in res.window_values:
            assert set(values) <= {0.0, 1.0}


class TestRunSuite:
    def test_report_layout_and_determinism(self, sim_resources, tmp_path):
        resources, _ = sim_resources
        cfg = SimConfig(tasks=(TASK_EXPLORATORY,), methods=(METHOD_BASELINE,),
                        n_grid=(3, 6), trials=4)
        rows1 = run_suite(resources, cfg, tmp_path / "a")
        rows2 = run_suite(resources, cfg, tmp_path / "b")
        assert [r["task"] for r in rows1] == [TASK_EXPLORATORY] * 2
        csv_a = (tmp_path / "a" / "report.csv").read_bytes()
        csv_b = (tmp_path / "b" / "report.csv").read_bytes()
        assert csv_a == csv_b
        header = csv_a.decode().splitlines()[0]
        assert header == ",".join(REPORT_COLUMNS)
        assert len(csv_a.decode().splitlines()) == 1 + len(rows1)
        assert rows1 == rows2

    def test_config_and_plots_written(self, sim_resources, tmp_path):
        resources, _ = sim_resources
        cfg = SimConfig(tasks=(TASK_EXPLORATORY, TASK_KNOWN_ITEM),
                        methods=(METHOD_BASELINE,), n_grid=(4,), trials=3)
        run_suite(resources, cfg, tmp_path)
        saved = json.loads((tmp_path / "config.json").read_text())
        assert saved["trials"] == 3
        assert tuple(saved["n_grid"]) == (4,)
        assert (tmp_path / "curve_exploratory.png").exists()
        assert (tmp_path / "curve_known-item.png").exists()

    def test_failed_cell_becomes_nan_row(self, sim_resources, tmp_path, caplog):
        resources, _ = sim_resources
        cfg = SimConfig(tasks=(TASK_EXPLORATORY,),
                        methods=(METHOD_BASELINE, "bogus"), n_grid=(3,),
                        trials=2)
        rows = run_suite(resources, cfg, tmp_path)
        good = [r for r in rows if r["method"] == METHOD_BASELINE]
        bad = [r for r in rows if r["method"] == "bogus"]
        assert len(good) == 1 and not math.isnan(good[0]["mean"])
        assert len(bad) == 1 and math.isnan(bad[0]["mean"])
        assert bad[0]["trials"] == 0
        text = (tmp_path / "report.csv").read_text()
        assert "nan" in text
