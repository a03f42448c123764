"""Proactive document retrieval from written context.

The pipeline watches the last n words a user has written, expands them with
predicted or intent-ranked words, and retrieves matching documents from a
tf-idf index before the user asks.
"""

__version__ = "0.1.0"

from .corpus import (
    Document,
    Vocabulary,
    CorpusStats,
    tokenize,
    build_vocab,
    compute_stats,
)
from .index import InvertedIndex, SearchResult, build_index, search
from .beam import BeamTree, ExpansionTerm, beam_expand, score_candidates, select_expansion
from .intent import IntentModel, RelevanceState, build_term_doc_matrix, linrel_solve
from .lm import NextWordModel, PredictionSession, NGramModel, ngram_train
from .lm import LstmConfig, LstmModel, lstm_train, top_candidates
from .proactive import (
    BaselineExpander,
    BeamExpander,
    IntentExpander,
    QueryBuild,
    make_query,
    recommend,
)
from .errors import NumericFailure

__all__ = [
    "Document", "Vocabulary", "CorpusStats", "tokenize", "build_vocab",
    "compute_stats", "InvertedIndex", "SearchResult", "build_index", "search",
    "BeamTree", "ExpansionTerm", "beam_expand", "score_candidates",
    "select_expansion", "IntentModel", "RelevanceState",
    "build_term_doc_matrix", "linrel_solve", "NextWordModel",
    "PredictionSession", "NGramModel", "ngram_train", "LstmConfig",
    "LstmModel", "lstm_train", "top_candidates", "BaselineExpander",
    "BeamExpander", "IntentExpander", "QueryBuild", "make_query", "recommend",
    "NumericFailure", "__version__",
]
