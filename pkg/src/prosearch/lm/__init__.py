from .base import NextWordModel, PredictionSession, top_candidates
from .ngram import NGramModel, ngram_train
from .lstm import LstmConfig, LstmModel, lstm_train

__all__ = [
    "NextWordModel",
    "PredictionSession",
    "top_candidates",
    "NGramModel",
    "ngram_train",
    "LstmConfig",
    "LstmModel",
    "lstm_train",
]
