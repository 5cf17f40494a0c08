"""Turn raw completion text into a labeled record candidate."""

from __future__ import annotations

import re
from typing import Sequence

from ..errors import UnusableCompletion
from ..heuristics import DEFAULT_GENERATE_VERBS, DEFAULT_SEARCH_VERBS
from ..records import ContentType, Function, Generator, Provenance, QueryRecord, word_count
from .templates import PromptTemplate

DEFAULT_BOILERPLATE = ("here is", "here's", "sure", "certainly", "query:")
OVER_LENGTH_FACTOR = 1.5

_QUOTES = "\"'`“”‘’"
# leading courtesy or request framing that precedes the verb
_LEAD_INS = (
    "please", "can you", "could you", "i need", "i want", "i'd like", "help me", "looking for", "get me",
    "i'm looking for",
)
_SEARCH_EXTRA = ("looking for", "get me", "i need", "show")
_GENERATE_EXTRA = ("design", "put together", "build", "draft", "make me")
_DETERMINERS = {"a", "an", "the", "some", "me", "to", "of"}


def _strip_wrappers(text: str) -> str:
    prev = None
    while prev != text:
        prev = text
        text = text.strip().strip(_QUOTES).strip()
        text = text.rstrip(".!").rstrip()
    return text


def clean_completion(text: str, boilerplate: Sequence[str] = DEFAULT_BOILERPLATE) -> str:
    text = _strip_wrappers(text)
    changed = True
    while changed and text:
        changed = False
        low = text.lower()
        for prefix in boilerplate:
            if not low.startswith(prefix):
                continue
            nxt = low[len(prefix) : len(prefix) + 1]
            if nxt.isalnum() and not prefix.endswith(":"):
                continue
            colon = text.find(":")
            if 0 <= colon <= 60:
                text = text[colon + 1 :]
            else:
                text = text[len(prefix) :].lstrip(" ,!-")
            text = _strip_wrappers(text)
            changed = True
            break
    return re.sub(r"\s+", " ", text)


def _strip_lead(words: list[str], phrases: Sequence[str]) -> list[str]:
    ordered = sorted((p.split() for p in phrases), key=len, reverse=True)
    lowered = [w.lower() for w in words]
    for p in ordered:
        if lowered[: len(p)] == p:
            return words[len(p) :]
    return words


def extract_prompt(text: str, function: Function) -> str:
    """Drop the leading request framing and verb, keeping the descriptor."""
    words = text.split()
    verbs = (
        DEFAULT_SEARCH_VERBS + _SEARCH_EXTRA
        if function == Function.SEARCH
        else DEFAULT_GENERATE_VERBS + _GENERATE_EXTRA
    )
    rest = _strip_lead(words, _LEAD_INS)
    rest = _strip_lead(rest, verbs)
    while rest and rest[0].lower() in _DETERMINERS:
        rest = rest[1:]
    return " ".join(rest) if rest else text


def postprocess(
    completion_text: str,
    target: PromptTemplate,
    *,
    provenance: Provenance | None = None,
    content_type: ContentType | None = None,
    boilerplate: Sequence[str] = DEFAULT_BOILERPLATE,
) -> QueryRecord:
    text = clean_completion(completion_text, boilerplate)
    if not text:
        raise UnusableCompletion("empty")
    if word_count(text) > target.max_words * OVER_LENGTH_FACTOR:
        raise UnusableCompletion("over_length")
    generator = Generator.VISION_LLM if target.modality.value == "Vision" else Generator.TEXT_LLM
    return QueryRecord(
        input=text,
        function=target.target_function,
        content_type=content_type or target.content_type,
        extracted_prompt=extract_prompt(text, target.target_function),
        provenance=provenance or Provenance(target.template_id, generator, target.template_id),
    )
