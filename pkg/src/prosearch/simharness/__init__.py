from .synth import synth_corpus
from .run import (
    SimConfig,
    SimResources,
    TaskResult,
    exploratory_precision,
    known_item_found,
    known_item_target,
    run_suite,
)

__all__ = [
    "synth_corpus",
    "SimConfig",
    "SimResources",
    "TaskResult",
    "exploratory_precision",
    "known_item_found",
    "known_item_target",
    "run_suite",
]
