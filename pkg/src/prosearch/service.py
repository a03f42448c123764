"""HTTP recommendation service for live editor use.

Each writing session holds a rolling buffer of the last n completed words.
Completed-word updates run the full proactive query and refresh the
recommendation list; mid-word keypresses only refresh the predicted
continuations (candidate next words filtered by the typed prefix), so
retrieval cost stays off the per-keystroke path.

All errors leave as flat ``{"code": ..., "message": ...}`` JSON bodies.
"""

from __future__ import annotations

import logging
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .beam import beam_expand, score_candidates, select_expansion
from .corpus import EOS, UNK, tokenize
from .intent import IntentModel, build_term_doc_matrix
from .lm.base import NextWordModel
from .proactive import (
    BASELINE,
    EXPANDER_CHOICES,
    INTENT_LINREL,
    LM_BEAM,
    BaselineExpander,
    IntentExpander,
    make_query,
    recommend,
)
from .stopwords import STOPWORDS
from .storage import CorpusBundle

log = logging.getLogger(__name__)

DEFAULT_TTL_SECONDS = 30 * 60
DEFAULT_WINDOW = 20
MAX_TOP_K = 10


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass(frozen=True)
class SessionParams:
    window: int = DEFAULT_WINDOW
    n_exp: int = 10
    top_k: int = 10
    b: int = 10
    k: int = 80
    d: int = 3
    mu: float = 1.0
    c: float = 1.0
    tau: float = 0.1

    _INT_FIELDS = frozenset({"window", "n_exp", "top_k", "b", "k", "d"})
    _FLOAT_FIELDS = frozenset({"mu", "c", "tau"})

    @classmethod
    def from_dict(cls, raw: dict) -> "SessionParams":
        values = {}
        for key, value in raw.items():
            if key in cls._INT_FIELDS:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise ServiceError(400, "bad_param",
                                       f"parameter {key!r} must be an integer")
                values[key] = value
            elif key in cls._FLOAT_FIELDS:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ServiceError(400, "bad_param",
                                       f"parameter {key!r} must be a number")
                values[key] = float(value)
            else:
                raise ServiceError(400, "unknown_param", f"unknown parameter {key!r}")
        params = cls(**values)
        if params.window < 1:
            raise ServiceError(400, "bad_param", "window must be at least 1")
        if params.n_exp < 0:
            raise ServiceError(400, "bad_param", "n_exp must not be negative")
        if not 1 <= params.top_k <= MAX_TOP_K:
            raise ServiceError(400, "bad_param", f"top_k must be in [1, {MAX_TOP_K}]")
        if params.b < 1 or params.k < 1 or params.d < 0:
            raise ServiceError(400, "bad_param", "beam parameters out of range")
        if params.mu <= 0 or params.tau < 0:
            raise ServiceError(400, "bad_param", "mu must be positive, tau nonnegative")
        return params


class LiveSession:
    """One writer's state: bounded word buffer plus the expander behind it."""

    def __init__(self, session_id: str, kind: str, params: SessionParams, expander):
        self.id = session_id
        self.kind = kind
        self.params = params
        self.expander = expander
        self.buffer: deque[str] = deque(maxlen=params.window)
        self.last_recommendations: list[dict] = []
        self.last_seen = 0.0
        self.lock = threading.Lock()


class CreateSessionBody(BaseModel):
    expander: str
    params: dict = {}


class ContextUpdateBody(BaseModel):
    word: str
    completed: bool


def create_app(
    bundle: CorpusBundle,
    model: NextWordModel | None = None,
    static_dir: str | Path | None = None,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
    clock=time.monotonic,
) -> FastAPI:
    """Build the application around a loaded corpus and optional word model."""
    app = FastAPI(title="prosearch", docs_url=None, redoc_url=None)
    sessions: dict[str, LiveSession] = {}
    store_lock = threading.Lock()
    intent_models: dict[float, IntentModel] = {}

    @app.exception_handler(ServiceError)
    async def _service_error(request, exc: ServiceError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request, exc: StarletteHTTPException):
        return JSONResponse(status_code=exc.status_code,
                            content={"code": f"http_{exc.status_code}",
                                     "message": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"code": "invalid_body", "message": str(exc.errors())})

    def purge_expired() -> None:
        now = clock()
        with store_lock:
            dead = [sid for sid, s in sessions.items()
                    if now - s.last_seen > ttl_seconds]
            for sid in dead:
                del sessions[sid]

    def get_session(session_id: str) -> LiveSession:
        with store_lock:
            session = sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "unknown_session", f"no session {session_id!r}")
        return session

    def intent_model_for(mu: float) -> IntentModel:
        if mu not in intent_models:
            matrix = build_term_doc_matrix(bundle.docs, bundle.stats, STOPWORDS,
                                           sample_size=2000, seed=0)
            intent_models[mu] = IntentModel(matrix, mu=mu)
        return intent_models[mu]

    def build_expander(kind: str, params: SessionParams):
        if kind == BASELINE:
            return BaselineExpander()
        if kind == LM_BEAM:
            if model is None:
                raise ServiceError(400, "model_required",
                                   "no language model loaded; start with --model "
                                   "or create a baseline session")
            # expansion runs through the beam tree directly so predictions
            # and query terms come from one traversal; no expander object
            return None
        if kind == INTENT_LINREL:
            return IntentExpander(intent=intent_model_for(params.mu),
                                  c=params.c, tau=params.tau)
        raise ServiceError(400, "unknown_expander",
                           f"expander must be one of {', '.join(EXPANDER_CHOICES)}")

    def serialize_hits(hits) -> list[dict]:
        out = []
        for doc_id, score in hits:
            doc = bundle.by_id.get(doc_id)
            out.append({
                "doc_id": doc_id,
                "title": doc.title if doc else "",
                "score": float(score),
                "link": f"/documents/{doc_id}",
            })
        return out

    def lm_tree_update(session: LiveSession, words: list[str]):
        """One beam traversal yields both expansion terms and display levels."""
        params = session.params
        try:
            tree = beam_expand(model, words, b=params.b, k=params.k, d=params.d)
            terms = score_candidates(tree, bundle.stats, STOPWORDS)
            by_word = {t.word: t.score for t in terms}
            pairs = [(w, by_word[w]) for w in select_expansion(terms, params.n_exp)]
            # reserved tokens stay internal; never surface them as suggestions
            levels = [
                [node.word for node in level if node.word not in (UNK, EOS)][: params.b]
                for level in tree.levels
            ]
            return pairs, levels, False
        except Exception:
            log.warning("beam expansion failed; falling back to plain query",
                        exc_info=True)
            return [], [], True

    def prefix_predictions(words: list[str], prefix: str, limit: int) -> list[str]:
        lm_session = model.open_session()
        for word in words:
            lm_session.feed(word)
        dist = lm_session.next_distribution()
        vocab = model.vocab
        cands = [
            (float(dist[i]), vocab.words[i])
            for i in range(len(dist))
            if dist[i] > 0.0
            and vocab.words[i] not in (UNK, EOS)
            and vocab.words[i].startswith(prefix)
        ]
        cands.sort(key=lambda t: (-t[0], t[1]))
        return [word for _, word in cands[:limit]]

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        purge_expired()
        if body.expander not in EXPANDER_CHOICES:
            raise ServiceError(400, "unknown_expander",
                               f"expander must be one of {', '.join(EXPANDER_CHOICES)}")
        params = SessionParams.from_dict(body.params)
        expander = build_expander(body.expander, params)
        session = LiveSession(uuid.uuid4().hex, body.expander, params, expander)
        session.last_seen = clock()
        with store_lock:
            sessions[session.id] = session
        return {"id": session.id}

    @app.post("/sessions/{session_id}/context")
    def update_context(session_id: str, body: ContextUpdateBody):
        purge_expired()
        session = get_session(session_id)
        with session.lock:
            session.last_seen = clock()
            tokens = tokenize(body.word)
            params = session.params
            if body.completed:
                session.buffer.extend(tokens)
                words = list(session.buffer)
                predictions: list[list[str]] = []
                fallback = False
                if not words:
                    session.last_recommendations = []
                else:
                    if session.kind == LM_BEAM:
                        pairs, predictions, fallback = lm_tree_update(session, words)
                        built = make_query(words, _FixedExpander(pairs),
                                           n_exp=params.n_exp)
                    else:
                        built = make_query(words, session.expander,
                                           n_exp=params.n_exp)
                        fallback = built.fallback
                    hits = recommend(bundle.index, built.query, top_k=params.top_k)
                    session.last_recommendations = serialize_hits(hits.hits)
                return {
                    "recommendations": session.last_recommendations,
                    "predictions": predictions,
                    "fallback": fallback,
                }
            prefix = tokens[-1] if tokens else ""
            predictions = []
            if session.kind == LM_BEAM:
                predictions = [prefix_predictions(list(session.buffer), prefix,
                                                  params.b)]
            return {
                "recommendations": session.last_recommendations,
                "predictions": predictions,
                "fallback": False,
            }

    @app.get("/documents/{doc_id}")
    def get_document(doc_id: str):
        purge_expired()
        doc = bundle.by_id.get(doc_id)
        if doc is None:
            raise ServiceError(404, "unknown_document", f"no document {doc_id!r}")
        return {
            "id": doc.id,
            "title": doc.title,
            "text": doc.text,
            "topics": sorted(doc.topics),
        }

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        purge_expired()
        with store_lock:
            if session_id not in sessions:
                raise ServiceError(404, "unknown_session", f"no session {session_id!r}")
            del sessions[session_id]
        return {"ok": True}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


class _FixedExpander:
    """Feeds precomputed expansion pairs through the query builder."""

    name = LM_BEAM

    def __init__(self, pairs: list[tuple[str, float]]):
        self.pairs = pairs

    def expand(self, window_words, n_exp):
        return self.pairs
