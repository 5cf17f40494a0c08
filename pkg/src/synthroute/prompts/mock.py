"""Deterministic stand-in for the text and vision generator models.

The mock reads the rendered prompt the same way a model would: it picks up
the ``slot:value`` spans, the word limit, and any "include the word X"
instruction, then composes a query from a seeded phrase grammar. Output is a
pure function of (prompt, image metadata, seed); seeds are derived with
SHA-256 so replays agree across processes.
"""

from __future__ import annotations

import hashlib
import math
import random
import re
from dataclasses import dataclass, field

from ..knowledge import AssetMetadata

SLOT_NAMES = ("title", "intents", "actions", "assets")
_LABEL = re.compile(r"\b(title|intents|actions|assets):")
_CONNECTORS = ("that encourages users to", "focusing on", "to support", "with", "use", "and")

STOPWORDS = frozenset(
    "a an the of for and or with in on at to by from my your our this that is are be as it its "
    "some any".split()
)

SEARCH_OPENERS = (
    "find", "find me", "search for", "look for", "show me", "i need", "looking for", "get me", "", "", "",
)
GENERATE_OPENERS = (
    "create", "generate", "make", "design", "please create", "can you make", "i want", "help me design",
    "i'd like", "put together", "make me",
)
ADJECTIVES = (
    "elegant", "vibrant", "minimal", "retro", "playful", "modern", "bold", "cozy", "festive", "rustic",
    "whimsical", "sleek", "colorful", "soft", "dreamy", "vintage", "clean", "cheerful",
)
COLORS = ("gold", "navy", "pastel pink", "emerald", "teal", "black", "cream", "coral", "lavender", "silver")
STYLES = ("watercolor", "flat", "hand drawn", "art deco", "boho", "neon", "scandinavian", "collage", "3d")
MOODS = ("warm and welcoming", "fun", "calm", "luxurious", "energetic", "heartfelt", "professional")
RELATIONS = ("son", "daughter", "nephew", "niece", "best friend", "mom", "dad", "team", "sister", "coworker")
LINKERS = ("for", "celebrating", "about", "featuring", "inspired by")


@dataclass
class PromptCues:
    max_words: int = 40
    keyword: str | None = None
    slots: dict[str, str] = field(default_factory=dict)
    search: bool = False
    n_texts: int = 1


def parse_prompt(prompt: str) -> PromptCues:
    cues = PromptCues()
    low = prompt.lower()
    if m := re.search(r"less than (\d+) words", low):
        cues.max_words = int(m.group(1))
    if m := re.search(r"include the word (\w+)", low):
        cues.keyword = m.group(1)
    if m := re.search(r"\bgenerate (\d+)\b", low):
        cues.n_texts = int(m.group(1))
    cues.search = "search quer" in low or cues.max_words <= 10
    labels = list(_LABEL.finditer(prompt))
    for i, m in enumerate(labels):
        end = labels[i + 1].start() if i + 1 < len(labels) else len(prompt)
        chunk = prompt[m.end() : end]
        chunk = re.split(r"[.,?](?:\s|$|(?=[A-Z]))", chunk, maxsplit=1)[0].strip()
        changed = True
        while changed:
            changed = False
            for conn in _CONNECTORS:
                if chunk.lower().endswith(" " + conn):
                    chunk = chunk[: -len(conn) - 1].rstrip()
                    changed = True
        if chunk:
            cues.slots[m.group(1)] = chunk
    return cues


def derive_seed(*parts: object) -> int:
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")


def _content_words(text: str) -> list[str]:
    words = re.sub(r"[^\w\s']", " ", text.lower()).split()
    return [w for w in words if w not in STOPWORDS]


def _dedup(words):
    seen = set()
    out = []
    for w in words:
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def _article(word: str) -> str:
    return "an" if word[:1] in "aeiou" else "a"


def _trim(words: list[str], limit: int, keep: str | None = None) -> list[str]:
    if len(words) <= limit:
        return words
    out = words[:limit]
    if keep and keep not in out:
        out[-1] = keep
    while len(out) > 1 and out[-1] in STOPWORDS | {"featuring", "celebrating", "inspired", "by", "using"}:
        out.pop()
    return out


def _finish(words: list[str], rng: random.Random) -> str:
    text = " ".join(w for w in words if w)
    if rng.random() < 0.5:
        text = text[:1].upper() + text[1:]
    return text


def _search_query(cues: PromptCues, rng: random.Random, title_words, extra_words) -> str:
    limit = min(cues.max_words, 10)
    target = rng.choices(range(1, 11), weights=(3, 10, 14, 15, 13, 11, 9, 7, 5, 4))[0]
    target = min(target, limit)
    opener = rng.choice(SEARCH_OPENERS).split()
    if len(opener) >= target:
        opener = []
    kw = cues.keyword
    budget = max(1, target - len(opener) - (1 if kw else 0))
    run = rng.randint(1, max(1, min(len(title_words), budget))) if title_words else 0
    core = title_words[:run]
    pool = [w for w in extra_words if w not in core]
    rng.shuffle(pool)
    core += pool[: max(0, budget - len(core))]
    if not core:
        core = [kw or "design"]
    if kw:
        r = rng.random()
        if r < 0.4:
            core = core + [kw]
        elif r < 0.6:
            core = [kw, "of"] + core
        elif r < 0.75 and opener:
            core = [_article(kw), kw, "of"] + core
        else:
            core.insert(rng.randint(0, len(core)), kw)
    words = _trim(opener + core, limit, kw)
    return _finish(words, rng)


def _generate_query(cues: PromptCues, rng: random.Random, title_words, slot_words) -> str:
    limit = min(cues.max_words, 40)
    target = int(round(math.exp(rng.gauss(math.log(14), 0.45))))
    target = max(5, min(target, limit))
    opener = rng.choice(GENERATE_OPENERS).split()
    noun = cues.keyword or (title_words[-1] if title_words else "design")
    adj = [rng.choice(ADJECTIVES)] if rng.random() < 0.6 else []
    late_noun = cues.keyword is not None and rng.random() < 0.3
    if late_noun:
        words = opener + ["something"] + adj
    else:
        lead = adj + [noun]
        words = opener + [_article(lead[0])] + lead
    topic = [w for w in title_words if w != noun][: rng.randint(1, 4)] or title_words[:1]
    words += [rng.choice(LINKERS)] + topic
    intents = slot_words.get("intents") or topic
    assets = slot_words.get("assets") or ["flowers", "stars"]
    actions = slot_words.get("actions") or ["celebrate"]
    clauses = [
        lambda: ["with"] + rng.sample(assets, 1),
        lambda: ["featuring"] + rng.sample(assets, min(2, len(assets)))[:1] + ["and"] + [rng.choice(assets)],
        lambda: ["that", "invites", "people", "to"] + rng.choice(actions).split(),
        lambda: ["in", _article(s := rng.choice(STYLES)), *s.split(), "style"],
        lambda: ["using", _article(c := rng.choice(COLORS)), *c.split(), "and", *rng.choice(COLORS).split(), "palette"],
        lambda: ["with", "space", "for", "a", "short", "message"],
        lambda: ["for", "my", *rng.choice(RELATIONS).split(), "and", "their"] + intents[:2],
        lambda: ["that", "feels", *rng.choice(MOODS).split()],
        lambda: ["on", _article(c := rng.choice(COLORS)), *c.split(), "background"],
        lambda: ["for", "a", *intents[:2], "event"],
    ]
    order = list(range(len(clauses)))
    rng.shuffle(order)
    for idx in order:
        if len(words) >= target:
            break
        words += clauses[idx]()
    if late_noun:
        words += ["as", _article(noun), noun]
        words = _trim(words, limit, noun)
    else:
        words = _trim(words, max(target, len(opener) + 3), noun)[:limit]
    return _finish(words, rng)


def _maybe_wrap(text: str, rng: random.Random, rate: float) -> str:
    if rate <= 0 or rng.random() >= rate:
        return text
    style = rng.randrange(3)
    if style == 0:
        return f'"{text}"'
    if style == 1:
        return f"Sure, here is the query: {text}"
    return f"  {text}  "


def mock_text(prompt: str, seed: int, *, mode: str = "grammar", wrap_rate: float = 0.0) -> list[str]:
    cues = parse_prompt(prompt)
    if mode == "echo":
        return [" ".join(v.lower() for v in cues.slots.values()) or prompt]
    rng = random.Random(derive_seed("text", seed, prompt))
    title_words = _dedup(_content_words(cues.slots.get("title", "")))
    slot_words = {
        k: [p.strip() for p in re.split(r"\band\b|/", cues.slots[k].lower()) if p.strip()]
        for k in ("intents", "actions", "assets")
        if k in cues.slots
    }
    extra = _dedup(w for k in ("intents", "assets", "actions") for w in _content_words(cues.slots.get(k, "")))
    if cues.search:
        text = _search_query(cues, rng, title_words, extra)
    else:
        text = _generate_query(cues, rng, title_words, slot_words)
    return [_maybe_wrap(text, rng, wrap_rate)]


def mock_vision(prompt: str, asset: AssetMetadata, seed: int, *, mode: str = "grammar") -> list[str]:
    cues = parse_prompt(prompt)
    rng = random.Random(derive_seed("vision", seed, prompt, asset.asset_id, asset.title, "|".join(asset.tags)))
    title_words = _dedup(_content_words(asset.title)) or ["design"]
    tags = _dedup(w for t in asset.tags for w in [t.lower()] if w not in title_words)
    if mode == "echo":
        return [asset.title.lower()] * cues.n_texts
    texts: list[str] = []
    attempts = 0
    while len(texts) < cues.n_texts and attempts < 20:
        attempts += 1
        if cues.search:
            c = PromptCues(max_words=min(cues.max_words, 10), keyword=cues.keyword, search=True)
            text = _search_query(c, rng, title_words, tags)
        else:
            material = cues.keyword or title_words[-1]
            purpose = [w for w in title_words if w != material][: rng.randint(1, 4)] or title_words[:1]
            elements = rng.sample(tags, min(len(tags), rng.randint(1, 3))) if tags else purpose[-1:]
            opener = rng.choice(("create", "design", "make", "generate"))
            adj = [rng.choice(ADJECTIVES)] if rng.random() < 0.5 else []
            lead = adj + [material]
            words = [opener, _article(lead[0]), *lead, "for", *purpose, "with"]
            for j, e in enumerate(elements):
                if j and j == len(elements) - 1:
                    words.append("and")
                words.extend(e.split())
            text = _finish(words[: min(cues.max_words, 30)], rng) + "."
        if text not in texts:
            texts.append(text)
    return texts
