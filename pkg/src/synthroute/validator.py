"""Record filtering: length bounds, unrealistic patterns, label checks, dedup.

Near-duplicates are detected with character 3-gram shingles of the
normalized query and a Jaccard threshold. Candidates come from an inverted
shingle index probed with a provably sufficient subset of shingles, so the
search is exact without comparing every pair.
"""

from __future__ import annotations

import math
import re
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

import yaml

from .heuristics import VerbLexicon
from .records import Function, Generator, QueryRecord, word_count


class Reason(str, Enum):
    DUPLICATE = "Duplicate"
    NEAR_DUPLICATE = "NearDuplicate"
    TOO_LONG = "TooLong"
    TOO_SHORT = "TooShort"
    DENIED_PATTERN = "DeniedPattern"
    NON_ALPHA = "NonAlpha"
    RESIDUAL_SLOT = "ResidualSlot"
    LABEL_MISMATCH = "LabelMismatch"


DEFAULT_DENY_PATTERNS = (
    "here is", "here's", "as an ai", "sure,", "certainly", "query:", "http://", "https://", "www.", "#",
)


@dataclass(frozen=True)
class ValidationPolicy:
    max_words: Mapping[Function, int] = field(
        default_factory=lambda: {Function.SEARCH: 10, Function.GENERATE: 40}
    )
    min_words: int = 1
    near_dup_threshold: float = 0.9
    shingle_size: int = 3
    deny_patterns: tuple[str, ...] = DEFAULT_DENY_PATTERNS
    require_alpha: bool = True
    min_alpha_ratio: float = 0.5
    lexicon: VerbLexicon = field(default_factory=VerbLexicon)

    def __post_init__(self):
        if not 0.0 <= self.near_dup_threshold <= 1.0:
            raise ValueError("near_dup_threshold must lie in [0, 1]")
        if any(v <= 0 for v in self.max_words.values()):
            raise ValueError("max_words must be positive")
        if self.min_words < 0 or self.shingle_size < 1:
            raise ValueError("min_words must be >= 0 and shingle_size >= 1")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ValidationPolicy":
        data = dict(data or {})
        kwargs: dict[str, Any] = {}
        if "max_words" in data:
            kwargs["max_words"] = {Function.parse(k): int(v) for k, v in data.pop("max_words").items()}
        if "deny_patterns" in data:
            kwargs["deny_patterns"] = tuple(data.pop("deny_patterns"))
        if "lexicon" in data:
            lex = data.pop("lexicon")
            kwargs["lexicon"] = VerbLexicon(tuple(lex["search_verbs"]), tuple(lex["generate_verbs"]))
        kwargs.update(data)
        return cls(**kwargs)


def load_policy(path: str | Path) -> ValidationPolicy:
    with open(path, encoding="utf-8") as fh:
        return ValidationPolicy.from_dict(yaml.safe_load(fh) or {})


@dataclass(frozen=True)
class ValidationVerdict:
    reasons: tuple[Reason, ...] = ()

    @property
    def accepted(self) -> bool:
        return not self.reasons

    def to_dict(self) -> dict[str, Any]:
        return {"accepted": self.accepted, "reasons": [r.value for r in self.reasons]}


_SLOT_MARKER = re.compile(r"\{\s*\w*\s*\}")


def _has_control(text: str) -> bool:
    return any(unicodedata.category(ch) == "Cc" for ch in text)


def _alpha_ratio(text: str) -> float:
    chars = [c for c in text if not c.isspace()]
    if not chars:
        return 0.0
    return sum(c.isalpha() for c in chars) / len(chars)


def _verb_family(text: str, lexicon: VerbLexicon) -> Function | None:
    words = text.lower().split()
    if words[:1] == ["please"]:
        words = words[1:]
    best: tuple[int, Function] | None = None
    for fn, verbs in ((Function.SEARCH, lexicon.search_verbs), (Function.GENERATE, lexicon.generate_verbs)):
        for v in verbs:
            parts = v.split()
            if parts[:1] == ["please"]:
                parts = parts[1:]
            if parts and words[: len(parts)] == parts and (best is None or len(parts) > best[0]):
                best = (len(parts), fn)
    return best[1] if best else None


def validate(record: QueryRecord, policy: ValidationPolicy | None = None) -> ValidationVerdict:
    """Return every violated rule; duplicates are judged by ``dedup`` instead."""
    policy = policy or ValidationPolicy()
    reasons: list[Reason] = []
    text = record.input
    n = word_count(text)
    if n > policy.max_words[record.function]:
        reasons.append(Reason.TOO_LONG)
    if n < policy.min_words:
        reasons.append(Reason.TOO_SHORT)
    low = text.lower()
    if _has_control(text) or any(p.lower() in low for p in policy.deny_patterns):
        reasons.append(Reason.DENIED_PATTERN)
    if policy.require_alpha and _alpha_ratio(text) < policy.min_alpha_ratio:
        reasons.append(Reason.NON_ALPHA)
    if _SLOT_MARKER.search(text) or _SLOT_MARKER.search(record.extracted_prompt):
        reasons.append(Reason.RESIDUAL_SLOT)
    if record.generator == Generator.HEURISTIC:
        family = _verb_family(text, policy.lexicon)
        if family is not None and family != record.function:
            reasons.append(Reason.LABEL_MISMATCH)
    return ValidationVerdict(tuple(reasons))


# -- dedup ---------------------------------------------------------------------

_PUNCT = re.compile(r"[^\w\s]")


def normalize_key(text: str) -> str:
    return " ".join(_PUNCT.sub("", text.lower()).split())


def shingles(key: str, k: int = 3) -> frozenset[str]:
    if len(key) <= k:
        return frozenset([key])
    return frozenset(key[i : i + k] for i in range(len(key) - k + 1))


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter)


class Deduper:
    """Streaming exact + near duplicate detector with serial semantics.

    Every shingle of every kept key is indexed. A pair with Jaccard >= t
    shares at least ceil(t * |x|) shingles, so probing with any
    ``|x| - ceil(t * |x|) + 1`` shingles of x is guaranteed to hit it; we
    probe with the currently rarest ones to keep candidate lists short.
    """

    def __init__(self, threshold: float = 0.9, shingle_size: int = 3):
        self.threshold = threshold
        self.k = shingle_size
        self.keys: set[str] = set()
        self._sets: list[frozenset[str]] = []
        self._index: dict[str, list[int]] = defaultdict(list)

    def check(self, text: str) -> Reason | None:
        key = normalize_key(text)
        if key in self.keys:
            return Reason.DUPLICATE
        if self.threshold > 1.0 or not self._sets:
            return None
        if self.threshold <= 0.0:
            return Reason.NEAR_DUPLICATE
        sh = shingles(key, self.k)
        need = math.ceil(self.threshold * len(sh) - 1e-9)
        postings = sorted((self._index.get(tok, ()) for tok in sh), key=len)
        lo, hi = self.threshold * len(sh) - 1e-9, len(sh) / self.threshold + 1e-9
        seen: set[int] = set()
        for plist in postings[: max(1, len(sh) - need + 1)]:
            for idx in plist:
                if idx in seen:
                    continue
                seen.add(idx)
                other = self._sets[idx]
                if lo <= len(other) <= hi and jaccard(sh, other) >= self.threshold:
                    return Reason.NEAR_DUPLICATE
        return None

    def add(self, text: str) -> None:
        key = normalize_key(text)
        self.keys.add(key)
        sh = shingles(key, self.k)
        idx = len(self._sets)
        self._sets.append(sh)
        for tok in sh:
            self._index[tok].append(idx)

    def offer(self, text: str) -> Reason | None:
        reason = self.check(text)
        if reason is None:
            self.add(text)
        return reason


def _dedup_split(records: Iterable[QueryRecord], policy: ValidationPolicy):
    deduper = Deduper(policy.near_dup_threshold, policy.shingle_size)
    kept, dropped = [], []
    for rec in records:
        reason = deduper.offer(rec.input)
        if reason is None:
            kept.append(rec)
        else:
            dropped.append((rec, reason))
    return kept, dropped


def dedup(records: Iterable[QueryRecord], policy: ValidationPolicy | None = None) -> list[QueryRecord]:
    return _dedup_split(records, policy or ValidationPolicy())[0]


def run_filter(
    records: Iterable[QueryRecord], policy: ValidationPolicy | None = None
) -> tuple[list[QueryRecord], list[tuple[QueryRecord, ValidationVerdict]]]:
    policy = policy or ValidationPolicy()
    passing: list[tuple[int, QueryRecord]] = []
    rejected: list[tuple[int, QueryRecord, ValidationVerdict]] = []
    for i, rec in enumerate(records):
        verdict = validate(rec, policy)
        if verdict.accepted:
            passing.append((i, rec))
        else:
            rejected.append((i, rec, verdict))
    deduper = Deduper(policy.near_dup_threshold, policy.shingle_size)
    accepted = []
    for i, rec in passing:
        reason = deduper.offer(rec.input)
        if reason is None:
            accepted.append(rec)
        else:
            rejected.append((i, rec, ValidationVerdict((reason,))))
    rejected.sort(key=lambda t: t[0])
    return accepted, [(rec, verdict) for _, rec, verdict in rejected]


class StreamingFilter:
    """Validate-then-dedup one record at a time; same outcome as ``run_filter``."""

    def __init__(self, policy: ValidationPolicy | None = None):
        self.policy = policy or ValidationPolicy()
        self.deduper = Deduper(self.policy.near_dup_threshold, self.policy.shingle_size)

    def __call__(self, record: QueryRecord) -> ValidationVerdict:
        verdict = validate(record, self.policy)
        if not verdict.accepted:
            return verdict
        reason = self.deduper.offer(record.input)
        return ValidationVerdict((reason,)) if reason else verdict


def rejection_row(record: QueryRecord, verdict: ValidationVerdict) -> dict[str, Any]:
    """One line of a rejection report."""
    return {"input": record.input, "reasons": [r.value for r in verdict.reasons], "record": record.to_dict()}
