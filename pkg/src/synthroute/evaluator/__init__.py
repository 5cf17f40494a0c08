"""Scoring of function-call predictions against a golden set."""

from .calls import FunctionCall, format_call, parse_call
from .harness import EvalResult, evaluate, load_golden, load_predictions, perfect_predictions, score
from .scoring import (
    GoldenExample,
    LexicalCosine,
    content_type_accuracy,
    function_f1,
    load_provider,
    subprompt_similarity,
)
from .stats import PairedTestResult, StatMethod, betainc, mcnemar_chi2, mcnemar_exact, paired_t

__all__ = [
    "EvalResult",
    "FunctionCall",
    "GoldenExample",
    "LexicalCosine",
    "PairedTestResult",
    "StatMethod",
    "betainc",
    "content_type_accuracy",
    "evaluate",
    "format_call",
    "function_f1",
    "load_golden",
    "load_predictions",
    "load_provider",
    "mcnemar_chi2",
    "mcnemar_exact",
    "paired_t",
    "parse_call",
    "perfect_predictions",
    "score",
    "subprompt_similarity",
]
