"""File-level evaluation: align predictions with the golden set and score."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from ..errors import LengthMismatch, MalformedRecord, ParseError
from ..records import iter_jsonl
from .calls import FunctionCall, format_call, parse_call
from .scoring import (
    GoldenExample,
    LexicalCosine,
    SimilarityProvider,
    content_type_correct,
    function_f1,
    predicted_label,
    subprompt_similarity,
)

log = logging.getLogger(__name__)


@dataclass
class EvalResult:
    function_f1: float
    per_class_f1: dict[str, dict]
    micro_f1: float
    cta: float
    ss_mean: float
    ss_values: list[float]
    n: int
    parse_failures: int
    provider: str
    rows: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self, include_rows: bool = True) -> dict[str, Any]:
        out = {
            "function_f1": self.function_f1,
            "per_class_f1": self.per_class_f1,
            "micro_f1": self.micro_f1,
            "cta": self.cta,
            "ss_mean": self.ss_mean,
            "ss_values": self.ss_values,
            "n": self.n,
            "parse_failures": self.parse_failures,
            "provider": self.provider,
        }
        if include_rows:
            out["rows"] = self.rows
        return out


def load_golden(path: str | Path) -> list[GoldenExample]:
    out = []
    for lineno, obj in iter_jsonl(path):
        try:
            out.append(GoldenExample.from_dict(obj))
        except (KeyError, ValueError) as exc:
            raise MalformedRecord(lineno, f"bad golden row: {exc}", str(path)) from exc
    return out


def load_predictions(path: str | Path) -> list[dict[str, Any]]:
    rows = []
    for lineno, obj in iter_jsonl(path):
        if "raw_model_output" not in obj:
            raise MalformedRecord(lineno, "prediction row needs raw_model_output", str(path))
        rows.append(obj)
    return rows


def score(
    outputs: Sequence[str],
    gold: Sequence[GoldenExample],
    provider: SimilarityProvider | None = None,
    queries: Sequence[str | None] | None = None,
) -> EvalResult:
    """Score raw model outputs; unparseable outputs are wrong on every metric."""
    if len(outputs) != len(gold):
        raise LengthMismatch(len(outputs), len(gold))
    provider = provider or LexicalCosine()
    preds: list[FunctionCall | None] = []
    rows = []
    ss_values = []
    for i, (raw, g) in enumerate(zip(outputs, gold)):
        error = None
        try:
            pred = parse_call(str(raw))
        except ParseError as exc:
            pred, error = None, str(exc)
        preds.append(pred)
        prompt = pred.get("extracted_prompt") if pred else None
        ss = subprompt_similarity(prompt, g.subprompt, provider) if prompt else 0.0
        ss_values.append(ss)
        rows.append({
            "index": i,
            "query": g.query,
            "gold_function": g.function.value,
            "pred_function": predicted_label(pred),
            "gold_content_type": g.content_type.value,
            "pred_content_type": pred.get("content_type") if pred else None,
            "content_type_correct": content_type_correct(pred, g),
            "gold_subprompt": g.subprompt,
            "pred_subprompt": prompt,
            "ss": ss,
            "parse_error": error,
            "query_matches": queries is None or queries[i] is None or queries[i] == g.query,
        })
    f1 = function_f1(preds, gold)
    n = len(gold)
    mismatched = sum(not r["query_matches"] for r in rows)
    if mismatched:
        log.warning("%d prediction rows name a different query than the golden row", mismatched)
    return EvalResult(
        function_f1=f1.macro,
        per_class_f1={k: v.to_dict() for k, v in f1.per_class.items()},
        micro_f1=f1.micro,
        cta=sum(r["content_type_correct"] for r in rows) / n if n else 0.0,
        ss_mean=sum(ss_values) / n if n else 0.0,
        ss_values=ss_values,
        n=n,
        parse_failures=sum(p is None for p in preds),
        provider=getattr(provider, "name", type(provider).__name__),
        rows=rows,
    )


def evaluate(
    pred_file: str | Path,
    golden_file: str | Path,
    provider: SimilarityProvider | None = None,
    report_path: str | Path | None = None,
) -> EvalResult:
    gold = load_golden(golden_file)
    preds = load_predictions(pred_file)
    result = score([p["raw_model_output"] for p in preds], gold, provider, [p.get("query") for p in preds])
    if report_path is not None:
        Path(report_path).write_text(json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return result


def perfect_predictions(gold: Sequence[GoldenExample]) -> list[dict[str, str]]:
    """Prediction rows that reproduce the golden labels exactly."""
    return [{"query": g.query, "raw_model_output": format_call(g.as_call())} for g in gold]
