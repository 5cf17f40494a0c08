"""Rule-based query synthesis from KG entity pairs and asset metadata."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import yaml

from .errors import EmptyTitle, GentechRequired
from .knowledge import AssetKind, AssetMetadata, KnowledgeGraph, NodeKind, sample_related_pair
from .records import ContentType, Function, Generator, Provenance, QueryRecord

SEARCH_MAX_WORDS = 10
GENERATE_MAX_WORDS = 40

DEFAULT_SEARCH_VERBS = ("find me", "search for", "look for", "search", "show me", "find")
DEFAULT_GENERATE_VERBS = ("generate", "create", "make", "please generate", "please create", "please make")


@dataclass(frozen=True)
class VerbLexicon:
    search_verbs: tuple[str, ...] = DEFAULT_SEARCH_VERBS
    generate_verbs: tuple[str, ...] = DEFAULT_GENERATE_VERBS

    def __post_init__(self):
        for name in ("search_verbs", "generate_verbs"):
            verbs = getattr(self, name)
            if not verbs:
                raise ValueError(f"{name} must be non-empty")
            for v in verbs:
                if v != v.lower() or not v.strip():
                    raise ValueError(f"{name} entry {v!r} must be a non-empty lowercase string")

    def all_verbs(self) -> tuple[str, ...]:
        return self.search_verbs + self.generate_verbs


def load_lexicon(path: str | Path) -> VerbLexicon:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    return VerbLexicon(
        search_verbs=tuple(data.get("search_verbs", DEFAULT_SEARCH_VERBS)),
        generate_verbs=tuple(data.get("generate_verbs", DEFAULT_GENERATE_VERBS)),
    )


_NON_WORD = re.compile(r"[^\w\s']|_")


def clean_phrase(text: str) -> str:
    """Lowercase, drop punctuation (intra-word apostrophes survive), collapse spaces."""
    text = _NON_WORD.sub(" ", text.lower())
    words = [w.strip("'") for w in text.split()]
    return " ".join(w for w in words if w)


def article_for(word: str) -> str:
    return "an" if word[:1].lower() in "aeiou" else "a"


def strip_lexicon_verbs(words: Sequence[str], lexicon: VerbLexicon) -> list[str]:
    """Remove every occurrence of a lexicon verb phrase from a token list."""
    phrases = sorted({tuple(v.split()) for v in lexicon.all_verbs()}, key=len, reverse=True)
    out: list[str] = []
    i = 0
    while i < len(words):
        for p in phrases:
            if tuple(words[i : i + len(p)]) == p:
                i += len(p)
                break
        else:
            out.append(words[i])
            i += 1
    return out


def _descriptor(words: Sequence[str], lexicon: VerbLexicon, asset_id: str) -> str:
    kept = strip_lexicon_verbs(list(words), lexicon)
    if not kept:
        raise EmptyTitle(asset_id)
    return " ".join(kept)


def gen_search_from_kg(
    graph: KnowledgeGraph,
    lexicon: VerbLexicon,
    rng: random.Random,
    content_type: ContentType | None = None,
    *,
    kinds: tuple[NodeKind, NodeKind] = (NodeKind.INTENT, NodeKind.DESIGN_TYPE),
    route_id: str = "heuristic-kg-search",
    seed: int = 0,
) -> QueryRecord:
    first, second = sample_related_pair(graph, rng, kinds)
    verb = rng.choice(lexicon.search_verbs)
    phrase = clean_phrase(f"{first.label} {second.label}").split()
    if not phrase:
        raise EmptyTitle(f"{first.id}+{second.id}")
    budget = SEARCH_MAX_WORDS - len(verb.split()) - 1
    phrase = phrase[:budget]
    text = f"{verb} {article_for(phrase[0])} {' '.join(phrase)}"
    return QueryRecord(
        input=text,
        function=Function.SEARCH,
        content_type=content_type or ContentType.ANY,
        extracted_prompt=_descriptor(phrase, lexicon, f"{first.id}+{second.id}"),
        provenance=Provenance(route_id, Generator.HEURISTIC, "kg:search", seed),
    )


_KIND_TO_CONTENT = {AssetKind.IMAGE: ContentType.PHOTO, AssetKind.TEMPLATE: ContentType.TEMPLATE}


def gen_search_from_asset(
    asset: AssetMetadata,
    lexicon: VerbLexicon,
    rng: random.Random,
    *,
    route_id: str = "heuristic-asset-search",
    seed: int = 0,
) -> QueryRecord:
    title = clean_phrase(asset.title).split()
    if not title:
        raise EmptyTitle(asset.asset_id)
    verb = rng.choice(lexicon.search_verbs)
    # leading words carry the subject, so truncate from the right
    title = title[: SEARCH_MAX_WORDS - len(verb.split())]
    return QueryRecord(
        input=f"{verb} {' '.join(title)}",
        function=Function.SEARCH,
        content_type=_KIND_TO_CONTENT[asset.kind],
        extracted_prompt=_descriptor(title, lexicon, asset.asset_id),
        provenance=Provenance(route_id, Generator.HEURISTIC, "asset:search", seed),
    )


_DESIGN_WORD = {AssetKind.IMAGE: ("image", "of"), AssetKind.TEMPLATE: ("template", "for")}


def gen_generate_from_asset(
    asset: AssetMetadata,
    lexicon: VerbLexicon,
    rng: random.Random,
    *,
    route_id: str = "heuristic-asset-generate",
    seed: int = 0,
) -> QueryRecord:
    if asset.kind == AssetKind.IMAGE and not asset.gentech:
        raise GentechRequired(asset.asset_id)
    title = clean_phrase(asset.title).split()
    if not title:
        raise EmptyTitle(asset.asset_id)
    verb = rng.choice(lexicon.generate_verbs)
    design, prep = _DESIGN_WORD[asset.kind]
    lead = f"{verb} {article_for(design)} {design} {prep}"
    title = title[: GENERATE_MAX_WORDS - len(lead.split())]
    return QueryRecord(
        input=f"{lead} {' '.join(title)}",
        function=Function.GENERATE,
        content_type=_KIND_TO_CONTENT[asset.kind],
        extracted_prompt=_descriptor(title, lexicon, asset.asset_id),
        provenance=Provenance(route_id, Generator.HEURISTIC, "asset:generate", seed),
    )
