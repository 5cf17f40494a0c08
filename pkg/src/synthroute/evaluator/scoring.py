"""Function-call F1, content-type accuracy and subprompt similarity."""

from __future__ import annotations

import importlib
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Protocol, Sequence

from ..errors import EmptyGold, LengthMismatch
from ..records import ContentType, Function
from .calls import FunctionCall

INVALID = "invalid"
CLASSES = (Function.SEARCH.value, Function.GENERATE.value)


@dataclass(frozen=True)
class GoldenExample:
    query: str
    function: Function
    content_type: ContentType
    subprompt: str

    def __post_init__(self):
        if not self.query.strip() or not self.subprompt.strip():
            raise ValueError("golden examples need a non-empty query and subprompt")

    @classmethod
    def from_dict(cls, data: dict) -> "GoldenExample":
        return cls(
            query=str(data["query"]),
            function=Function.parse(data["function"]),
            content_type=ContentType.parse(data["content_type"]),
            subprompt=str(data["subprompt"]),
        )

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "function": self.function.value,
            "content_type": self.content_type.value,
            "subprompt": self.subprompt,
        }

    def as_call(self) -> FunctionCall:
        """The call a perfect model would emit for this example."""
        return FunctionCall(
            self.function.value,
            {"content_type": self.content_type.value, "extracted_prompt": self.subprompt},
        )


Prediction = FunctionCall | None  # None marks a parse failure


def predicted_label(pred: Prediction) -> str:
    if pred is None:
        return INVALID
    for label in CLASSES:
        if pred.name.lower() == label.lower():
            return label
    return INVALID


def _check_lengths(preds: Sequence, gold: Sequence) -> None:
    if len(preds) != len(gold):
        raise LengthMismatch(len(preds), len(gold))


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "support": self.support}


@dataclass(frozen=True)
class F1Result:
    macro: float
    micro: float
    per_class: dict[str, ClassScore]


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def _f1(tp: int, n_pred: int, n_gold: int) -> Fraction:
    # harmonic mean of P and R, written on the counts: 2TP / (|pred| + |gold|)
    return Fraction(2 * tp, n_pred + n_gold) if tp else Fraction(0)


def function_f1(preds: Sequence[Prediction], gold: Sequence[GoldenExample]) -> F1Result:
    """Per-class P/R/F1 over Search and Generate; failures predict ``invalid``.

    A class with no gold rows and no predictions scores F1 = 1, since there
    is nothing to get wrong; any other zero denominator counts as 0. Scores
    are exact rationals until the final conversion to float.
    """
    _check_lengths(preds, gold)
    pairs = Counter((g.function.value, predicted_label(p)) for p, g in zip(preds, gold))
    per_class = {}
    f1s: list[Fraction] = []
    tp_sum = pred_sum = 0
    for label in CLASSES:
        tp = pairs[(label, label)]
        n_pred = sum(v for (g, p), v in pairs.items() if p == label)
        n_gold = sum(v for (g, p), v in pairs.items() if g == label)
        tp_sum += tp
        pred_sum += n_pred
        if n_pred == 0 and n_gold == 0:
            f1s.append(Fraction(1))
            per_class[label] = ClassScore(1.0, 1.0, 1.0, 0)
            continue
        f1 = _f1(tp, n_pred, n_gold)
        f1s.append(f1)
        per_class[label] = ClassScore(float(_ratio(tp, n_pred)), float(_ratio(tp, n_gold)), float(f1), n_gold)
    macro = sum(f1s, Fraction(0)) / len(CLASSES)
    micro = _f1(tp_sum, pred_sum, len(gold))
    return F1Result(macro=float(macro), micro=float(micro), per_class=per_class)


def content_type_correct(pred: Prediction, gold: GoldenExample) -> bool:
    if pred is None:
        return False
    if gold.content_type == ContentType.ANY:
        return True
    value = pred.get("content_type")
    return value is not None and value.strip().lower() == gold.content_type.value.lower()


def content_type_accuracy(preds: Sequence[Prediction], gold: Sequence[GoldenExample]) -> float:
    _check_lengths(preds, gold)
    if not gold:
        return 0.0
    return sum(content_type_correct(p, g) for p, g in zip(preds, gold)) / len(gold)


# -- subprompt similarity -------------------------------------------------------


class SimilarityProvider(Protocol):
    name: str

    def __call__(self, pred: str, gold: str) -> float: ...


_PUNCT = re.compile(r"[^\w\s]")


def tokens(text: str) -> list[str]:
    return _PUNCT.sub("", text.lower()).split()


class LexicalCosine:
    """Cosine similarity of raw term-frequency vectors."""

    name = "lexical-tf-cosine"

    def __call__(self, pred: str, gold: str) -> float:
        g = Counter(tokens(gold))
        if not g:
            raise EmptyGold("gold subprompt has no tokens")
        p = Counter(tokens(pred))
        if not p:
            return 0.0
        dot = sum(v * p[k] for k, v in g.items())
        # one sqrt of an integer product keeps identical inputs at exactly 1.0
        norm = math.sqrt(sum(v * v for v in g.values()) * sum(v * v for v in p.values()))
        return min(1.0, dot / norm)


def load_provider(ref: str | None) -> SimilarityProvider:
    """``lexical`` (default) or ``module:attr`` naming a provider class or factory."""
    if ref in (None, "", "lexical"):
        return LexicalCosine()
    module, _, attr = ref.partition(":")
    if not attr:
        raise ValueError(f"provider must be 'lexical' or 'module:attr', got {ref!r}")
    factory: Callable = getattr(importlib.import_module(module), attr)
    provider = factory()
    if not hasattr(provider, "name"):
        provider.name = ref
    return provider


def subprompt_similarity(pred_prompt: str, gold_prompt: str, provider: SimilarityProvider | None = None) -> float:
    if not gold_prompt.strip():
        raise EmptyGold("gold subprompt is empty")
    score = (provider or LexicalCosine())(pred_prompt, gold_prompt)
    return min(1.0, max(0.0, float(score)))
