"""Dispatch routes to generators and assemble batches under router control."""

from __future__ import annotations

import logging
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

from . import heuristics
from .errors import NothingProducible, SynthRouteError
from .heuristics import VerbLexicon
from .knowledge import (
    AssetCatalog,
    AssetKind,
    KnowledgeGraph,
    NodeKind,
    neighbors,
    sample_asset,
)
from .prompts import ImageRef, TemplateRegistry, complete_text, complete_vision, postprocess, render
from .records import ContentType, Generator, Provenance, QueryRecord
from .router import Route, RouterState, adapt_weights, next_route, record_outcome
from .validator import ValidationVerdict

log = logging.getLogger(__name__)

_KG_KINDS = {
    "kg:intent-design": (NodeKind.INTENT, NodeKind.DESIGN_TYPE),
    "kg:intent-object": (NodeKind.INTENT, NodeKind.SCENE_OBJECT),
    "kg:design-object": (NodeKind.DESIGN_TYPE, NodeKind.SCENE_OBJECT),
}
_CONTENT_ASSET_KIND = {ContentType.PHOTO: AssetKind.IMAGE, ContentType.TEMPLATE: AssetKind.TEMPLATE}


@dataclass
class Resources:
    graph: KnowledgeGraph
    catalog: AssetCatalog
    lexicon: VerbLexicon
    templates: TemplateRegistry
    text_backend: object | None = None
    vision_backend: object | None = None


@dataclass(frozen=True)
class SkipEvent:
    route_id: str
    reason: str
    timestamp: float

    def to_dict(self) -> dict:
        return {"route_id": self.route_id, "reason": self.reason, "timestamp": self.timestamp}


def _pick(rng: random.Random, items: list, k: int) -> list:
    return rng.sample(items, min(k, len(items)))


def slot_binding(res: Resources, rng: random.Random, title: str) -> dict[str, str]:
    """Bind template slots from one KG intent and its neighbourhood."""
    intents = res.graph.nodes_of_kind(NodeKind.INTENT)
    if not intents:
        raise SynthRouteError("knowledge graph has no Intent nodes")
    intent = rng.choice(intents)
    actions = neighbors(res.graph, intent.id, NodeKind.ACTION) or res.graph.nodes_of_kind(NodeKind.ACTION)
    objects = neighbors(res.graph, intent.id, NodeKind.SCENE_OBJECT) or res.graph.nodes_of_kind(NodeKind.SCENE_OBJECT)

    def join(nodes) -> str:
        return " and ".join(n.label for n in nodes)

    return {
        "title": heuristics.clean_phrase(title) or title,
        "intents": intent.label,
        "actions": join(_pick(rng, actions, rng.randint(1, 2))) or "celebrate",
        "assets": join(_pick(rng, objects, rng.randint(1, 3))) or "shapes",
    }


def _heuristic(route: Route, res: Resources, rng: random.Random, seed: int) -> list[QueryRecord]:
    strategy = route.template_id
    if strategy is None:
        if route.target_function.value == "Search" and route.target_content_type not in _CONTENT_ASSET_KIND:
            strategy = "kg:intent-design"
        elif route.target_function.value == "Search":
            strategy = "asset:search"
        else:
            strategy = "asset:generate"
    ids = dict(route_id=route.route_id, seed=seed)
    if strategy in _KG_KINDS:
        rec = heuristics.gen_search_from_kg(
            res.graph, res.lexicon, rng, route.target_content_type, kinds=_KG_KINDS[strategy], **ids
        )
    elif strategy == "asset:search":
        asset = sample_asset(res.catalog, rng, _CONTENT_ASSET_KIND.get(route.target_content_type))
        rec = heuristics.gen_search_from_asset(asset, res.lexicon, rng, **ids)
    elif strategy == "asset:generate":
        kind = _CONTENT_ASSET_KIND.get(route.target_content_type)
        asset = sample_asset(res.catalog, rng, kind, require_gentech=kind == AssetKind.IMAGE)
        rec = heuristics.gen_generate_from_asset(asset, res.lexicon, rng, **ids)
    else:
        raise SynthRouteError(f"unknown heuristic strategy {strategy!r}")
    return [replace(rec, content_type=route.target_content_type)]


def _text_llm(route: Route, res: Resources, rng: random.Random, seed: int) -> list[QueryRecord]:
    if res.text_backend is None:
        raise SynthRouteError("no text backend configured")
    template = res.templates[route.template_id]
    asset = sample_asset(res.catalog, rng)
    prompt = render(template, slot_binding(res, rng, asset.title))
    completion = complete_text(res.text_backend, prompt, seed=seed)
    prov = Provenance(route.route_id, Generator.TEXT_LLM, template.template_id, seed)
    return [postprocess(completion.texts[0], template, provenance=prov, content_type=route.target_content_type)]


def _vision_llm(route: Route, res: Resources, rng: random.Random, seed: int) -> list[QueryRecord]:
    if res.vision_backend is None:
        raise SynthRouteError("no vision backend configured")
    template = res.templates[route.template_id]
    kind = _CONTENT_ASSET_KIND.get(route.target_content_type)
    asset = sample_asset(res.catalog, rng, kind)
    image = ImageRef(path=asset.extras.get("image_path"), asset=asset)
    prompt = render(template, {"title": asset.title})
    completion = complete_vision(res.vision_backend, image, prompt, seed=seed)
    out = []
    # every text of a multi-prompt completion is kept; variant marks which one
    for i, text in enumerate(completion.texts):
        prov = Provenance(route.route_id, Generator.VISION_LLM, template.template_id, seed, variant=i)
        out.append(postprocess(text, template, provenance=prov, content_type=route.target_content_type))
    return out


_DISPATCH = {
    Generator.HEURISTIC: _heuristic,
    Generator.TEXT_LLM: _text_llm,
    Generator.VISION_LLM: _vision_llm,
}


def produce(route: Route, res: Resources, seed: int) -> list[QueryRecord]:
    """Run one route; the per-call RNG is seeded from ``seed`` alone."""
    return _DISPATCH[route.generator](route, res, random.Random(seed), seed)


Screen = Callable[[QueryRecord], ValidationVerdict]


class _Collector:
    """Single writer for router counters, weights and the output list."""

    def __init__(self, state: RouterState, n: int, screen: Screen | None, on_skip, on_reject):
        self.state = state
        self.n = n
        self.screen = screen
        self.on_skip = on_skip
        self.on_reject = on_reject
        self.records: list[QueryRecord] = []
        self.attempts = 0
        self.failures = 0

    @property
    def done(self) -> bool:
        return len(self.records) >= self.n

    def skip(self, route: Route, exc: Exception) -> None:
        self.failures += 1
        reason = f"{type(exc).__name__}: {exc}"
        log.debug("skip %s: %s", route.route_id, reason)
        if self.on_skip:
            self.on_skip(SkipEvent(route.route_id, reason, time.time()))

    def submit(self, records: list[QueryRecord]) -> None:
        for rec in records:
            if self.done:
                return
            if self.screen is not None:
                verdict = self.screen(rec)
                if not verdict.accepted:
                    if self.on_reject:
                        self.on_reject(rec, verdict)
                    continue
            self.records.append(rec)
            record_outcome(self.state, rec)
            if self.state.total >= self.state.batch_size:
                adapt_weights(self.state)


def generate_batch(
    state: RouterState,
    n: int,
    resources: Resources,
    rng: random.Random,
    *,
    screen: Screen | None = None,
    on_skip: Callable[[SkipEvent], None] | None = None,
    on_reject: Callable[[QueryRecord, ValidationVerdict], None] | None = None,
    lanes: int = 1,
    max_attempts: int | None = None,
) -> tuple[list[QueryRecord], RouterState]:
    """Draw routes until ``n`` records are collected.

    Generator failures are logged as skips and the slot is redrawn. With a
    ``screen`` only records it accepts are kept and counted, so distribution
    control acts on the filtered output. ``lanes > 1`` runs generators on a
    thread pool; results are then not bit-reproducible.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    max_attempts = max_attempts or 50 * n + 1000
    col = _Collector(state, n, screen, on_skip, on_reject)
    lock = threading.Lock()

    def exhausted() -> bool:
        return col.attempts >= max_attempts or (not col.records and col.failures >= 200 and col.attempts == col.failures)

    def lane() -> None:
        while True:
            with lock:
                if col.done or exhausted():
                    return
                route = next_route(state, rng)
                seed = rng.getrandbits(31)
                col.attempts += 1
            try:
                records = produce(route, resources, seed)
            except SynthRouteError as exc:
                with lock:
                    col.skip(route, exc)
                continue
            with lock:
                col.submit(records)

    if lanes <= 1:
        lane()
    else:
        with ThreadPoolExecutor(max_workers=lanes) as pool:
            for f in [pool.submit(lane) for _ in range(lanes)]:
                f.result()

    if not col.records:
        raise NothingProducible(f"no records produced in {col.attempts} attempts")
    if not col.done:
        log.warning("stopped after %d attempts with %d of %d records", col.attempts, len(col.records), n)
    return col.records, state
