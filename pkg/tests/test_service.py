from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from prosearch.corpus import EOS, UNK
from prosearch.lm.ngram import ngram_train
from prosearch.service import create_app
from prosearch.storage import CorpusBundle


class FakeClock:
    def __init__(self):
        self.now = 1000.0

    def __call__(self):
        return self.now


class BrokenModel:
    """Model whose sessions cannot be opened; forces the degraded query path."""

    def open_session(self):
        raise RuntimeError("model unavailable")


@pytest.fixture()
def bundle(tiny_docs, tiny_vocab, tiny_stats, tiny_index):
    return CorpusBundle(tiny_docs, tiny_vocab, tiny_stats, tiny_index)


@pytest.fixture()
def ngram_model(tiny_docs, tiny_vocab):
    return ngram_train(tiny_docs, tiny_vocab, order=3, alpha=0.1)


@pytest.fixture()
def client(bundle, ngram_model):
    return TestClient(create_app(bundle, model=ngram_model))


def make_session(client, expander="baseline", params=None):
    resp = client.post("/sessions", json={"expander": expander,
                                          "params": params or {}})
    assert resp.status_code == 200, resp.text
    return resp.json()["id"]


def push(client, sid, word, completed=True):
    return client.post(f"/sessions/{sid}/context",
                       json={"word": word, "completed": completed})


class TestSessionLifecycle:
    def test_create_returns_id(self, client):
        sid = make_session(client)
        assert isinstance(sid, str) and sid

    def test_unknown_expander(self, client):
        resp = client.post("/sessions", json={"expander": "psychic"})
        assert resp.status_code == 400
        body = resp.json()
        assert body["code"] == "unknown_expander"
        assert set(body) == {"code", "message"}

    def test_delete_then_gone(self, client):
        sid = make_session(client)
        assert client.delete(f"/sessions/{sid}").json() == {"ok": True}
        resp = push(client, sid, "hello")
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown_session"
        assert client.delete(f"/sessions/{sid}").status_code == 404

    def test_missing_body_fields(self, client):
        resp = client.post("/sessions", json={})
        assert resp.status_code == 400
        assert resp.json()["code"] == "invalid_body"

    def test_unknown_route_error_shape(self, client):
        resp = client.get("/definitely/not/here")
        assert resp.status_code == 404
        assert resp.json()["code"] == "http_404"


class TestParamValidation:
    @pytest.mark.parametrize("params,code", [
        ({"window": "five"}, "bad_param"),
        ({"window": 5.5}, "bad_param"),
        ({"window": True}, "bad_param"),
        ({"window": 0}, "bad_param"),
        ({"top_k": 11}, "bad_param"),
        ({"top_k": 0}, "bad_param"),
        ({"n_exp": -1}, "bad_param"),
        ({"mu": 0}, "bad_param"),
        ({"mu": "x"}, "bad_param"),
        ({"beam_width": 4}, "unknown_param"),
    ])
    def test_rejected_params(self, client, params, code):
        resp = client.post("/sessions", json={"expander": "baseline",
                                              "params": params})
        assert resp.status_code == 400
        assert resp.json()["code"] == code

    def test_accepted_params(self, client):
        sid = make_session(client, params={"window": 5, "top_k": 3,
                                           "n_exp": 2, "mu": 0.5})
        assert sid


class TestBaselineFlow:
    def test_completed_word_returns_recommendations(self, client):
        sid = make_session(client)
        resp = push(client, sid, "machine")
        assert resp.status_code == 200
        body = resp.json()
        assert set(body) == {"recommendations", "predictions", "fallback"}
        assert body["fallback"] is False
        assert body["predictions"] == []
        recs = body["recommendations"]
        assert recs
        for hit in recs:
            assert set(hit) == {"doc_id", "title", "score", "link"}
            assert hit["link"] == f"/documents/{hit['doc_id']}"
        scores = [h["score"] for h in recs]
        assert scores == sorted(scores, reverse=True)

    def test_top_k_respected(self, client):
        sid = make_session(client, params={"top_k": 2})
        recs = push(client, sid, "machine learning").json()["recommendations"]
        assert len(recs) <= 2

    def test_multi_word_update_extends_buffer(self, client):
        sid = make_session(client)
        push(client, sid, "machine")
        r2 = push(client, sid, "learning").json()
        assert r2["recommendations"]

    def test_unmatchable_word_empty_results(self, client):
        sid = make_session(client)
        body = push(client, sid, "zzzzz").json()
        assert body["recommendations"] == []

    def test_punctuation_only_word_is_noop(self, client):
        sid = make_session(client)
        body = push(client, sid, "!!!").json()
        assert body == {"recommendations": [], "predictions": [],
                        "fallback": False}

    def test_keypress_returns_last_recommendations(self, client):
        sid = make_session(client)
        completed = push(client, sid, "machine").json()["recommendations"]
        body = push(client, sid, "lea", completed=False).json()
        assert body["recommendations"] == completed
        assert body["predictions"] == []

    def test_sessions_isolated(self, client):
        sid1 = make_session(client)
        sid2 = make_session(client)
        push(client, sid1, "machine")
        body = push(client, sid2, "pasta").json()
        ids = {h["doc_id"] for h in body["recommendations"]}
        assert "doc-food" in ids
        kp = push(client, sid1, "x", completed=False).json()
        assert {h["doc_id"] for h in kp["recommendations"]} != ids

    def test_deterministic_across_sessions(self, client):
        sid1 = make_session(client)
        sid2 = make_session(client)
        for word in ["machine", "learning", "systems"]:
            r1 = push(client, sid1, word).json()
            r2 = push(client, sid2, word).json()
            assert r1 == r2


class TestLmBeamFlow:
    def test_requires_model(self, bundle):
        app = create_app(bundle, model=None)
        client = TestClient(app)
        resp = client.post("/sessions", json={"expander": "lm-beam"})
        assert resp.status_code == 400
        assert resp.json()["code"] == "model_required"

    def test_completed_word_has_level_predictions(self, client):
        sid = make_session(client, "lm-beam", params={"b": 4, "k": 6, "d": 2})
        body = push(client, sid, "machine").json()
        assert body["fallback"] is False
        preds = body["predictions"]
        assert preds and len(preds) <= 2
        for level in preds:
            assert 0 < len(level) <= 4
            for word in level:
                assert word not in (UNK, EOS)
        assert body["recommendations"]

    def test_keypress_prefix_filtering(self, client):
        sid = make_session(client, "lm-beam", params={"b": 5})
        push(client, sid, "machine")
        body = push(client, sid, "le", completed=False).json()
        preds = body["predictions"]
        assert len(preds) == 1
        assert preds[0]
        for word in preds[0]:
            assert word.startswith("le")
        assert body["recommendations"]

    def test_keypress_empty_prefix_suggests_anything(self, client):
        sid = make_session(client, "lm-beam", params={"b": 3})
        push(client, sid, "machine")
        body = push(client, sid, "?", completed=False).json()
        assert len(body["predictions"]) == 1
        assert 0 < len(body["predictions"][0]) <= 3

    def test_broken_model_falls_back(self, bundle):
        app = create_app(bundle, model=BrokenModel())
        client = TestClient(app)
        sid = make_session(client, "lm-beam")
        body = push(client, sid, "machine").json()
        assert body["fallback"] is True
        assert body["predictions"] == []
        assert body["recommendations"]


class TestIntentFlow:
    def test_sessions_work_and_stay_independent(self, client):
        sid = make_session(client, "intent-linrel", params={"mu": 1.0})
        first = push(client, sid, "machine").json()
        assert first["fallback"] is False
        assert first["predictions"] == []
        assert first["recommendations"]
        second = push(client, sid, "learning").json()
        assert second["recommendations"]

    def test_keypress_has_no_predictions(self, client):
        sid = make_session(client, "intent-linrel")
        push(client, sid, "machine")
        body = push(client, sid, "sy", completed=False).json()
        assert body["predictions"] == []


class TestDocuments:
    def test_fetch_document(self, client):
        body = client.get("/documents/doc-ml").json()
        assert body["id"] == "doc-ml"
        assert body["topics"] == ["ml"]
        assert "text" in body and "title" in body

    def test_missing_document(self, client):
        resp = client.get("/documents/nope")
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown_document"


class TestExpiry:
    def test_idle_sessions_expire(self, bundle):
        clock = FakeClock()
        app = create_app(bundle, ttl_seconds=60, clock=clock)
        client = TestClient(app)
        sid = make_session(client)
        clock.now += 30
        assert push(client, sid, "machine").status_code == 200
        clock.now += 61
        resp = push(client, sid, "learning")
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown_session"

    def test_activity_keeps_session_alive(self, bundle):
        clock = FakeClock()
        app = create_app(bundle, ttl_seconds=60, clock=clock)
        client = TestClient(app)
        sid = make_session(client)
        for _ in range(5):
            clock.now += 50
            assert push(client, sid, "machine").status_code == 200


class TestWindowBound:
    def test_buffer_truncates_to_window(self, client):
        sid = make_session(client, params={"window": 2})
        push(client, sid, "pasta")
        push(client, sid, "machine")
        body = push(client, sid, "learning").json()
        ids = {h["doc_id"] for h in body["recommendations"]}
        # "pasta" fell out of the 2-word window, so the food doc cannot match
        assert "doc-food" not in ids
