"""Domain knowledge graph and content-metadata catalog.

Both stores are loaded from line-delimited JSON and are immutable afterwards.
Edges are undirected for lookups; ``src``/``dst`` are kept only so a graph
serializes back to the file it came from.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import (
    DanglingEdge,
    DuplicateAssetId,
    DuplicateNodeId,
    MalformedRecord,
    NoMatchingAsset,
    NoSuchPair,
    UnknownNode,
)
from .records import iter_jsonl


class NodeKind(str, Enum):
    INTENT = "Intent"
    DESIGN_TYPE = "DesignType"
    SCENE_OBJECT = "SceneObject"
    ACTION = "Action"


class AssetKind(str, Enum):
    IMAGE = "Image"
    TEMPLATE = "Template"


@dataclass(frozen=True)
class KGNode:
    id: str
    kind: NodeKind
    label: str


@dataclass(frozen=True)
class KGEdge:
    src: str
    dst: str
    relation: str = "related"


@dataclass(frozen=True)
class KnowledgeGraph:
    nodes: Mapping[str, KGNode]
    edges: tuple[KGEdge, ...]
    adjacency: Mapping[str, frozenset[str]] = field(compare=False, repr=False)
    _pairs: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def build(cls, nodes: Iterable[KGNode], edges: Iterable[KGEdge]) -> "KnowledgeGraph":
        node_map: dict[str, KGNode] = {}
        for node in nodes:
            if node.id in node_map:
                raise DuplicateNodeId(node.id)
            if not node.label.strip():
                raise ValueError(f"node {node.id!r} has an empty label")
            node_map[node.id] = node
        adj: dict[str, set[str]] = {nid: set() for nid in node_map}
        kept: list[KGEdge] = []
        seen: set[KGEdge] = set()
        for edge in edges:
            for end in (edge.src, edge.dst):
                if end not in node_map:
                    raise DanglingEdge(edge.src, edge.dst, end)
            if edge.src == edge.dst:
                raise ValueError(f"self-loop on {edge.src!r}")
            if edge in seen:
                continue
            seen.add(edge)
            kept.append(edge)
            adj[edge.src].add(edge.dst)
            adj[edge.dst].add(edge.src)
        return cls(
            nodes=node_map,
            edges=tuple(kept),
            adjacency={k: frozenset(v) for k, v in adj.items()},
        )

    def nodes_of_kind(self, kind: NodeKind) -> list[KGNode]:
        return sorted((n for n in self.nodes.values() if n.kind == kind), key=lambda n: n.id)

    def __len__(self) -> int:
        return len(self.nodes)


def load_graph(path: str | Path) -> KnowledgeGraph:
    nodes: list[KGNode] = []
    edges: list[KGEdge] = []
    seen_ids: set[str] = set()
    for lineno, obj in iter_jsonl(path):
        rtype = obj.get("record_type")
        try:
            if rtype == "node":
                kind = NodeKind(obj["kind"])
                node = KGNode(id=str(obj["id"]), kind=kind, label=str(obj["label"]))
                if not node.label.strip():
                    raise ValueError("empty label")
                if node.id in seen_ids:
                    raise DuplicateNodeId(node.id)
                seen_ids.add(node.id)
                nodes.append(node)
            elif rtype == "edge":
                edge = KGEdge(str(obj["src"]), str(obj["dst"]), str(obj.get("relation", "related")))
                if edge.src == edge.dst:
                    raise ValueError(f"self-loop on {edge.src!r}")
                edges.append(edge)
            else:
                raise ValueError(f"unknown record_type {rtype!r}")
        except (KeyError, ValueError) as exc:
            raise MalformedRecord(lineno, f"bad KG record: {exc}", str(path)) from None
    return KnowledgeGraph.build(nodes, edges)


def dump_graph(graph: KnowledgeGraph, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for node in graph.nodes.values():
            row = {"record_type": "node", "id": node.id, "kind": node.kind.value, "label": node.label}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        for edge in graph.edges:
            row = {"record_type": "edge", "src": edge.src, "dst": edge.dst, "relation": edge.relation}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def neighbors(graph: KnowledgeGraph, node: str, kind_filter: NodeKind | None = None) -> list[KGNode]:
    """Nodes sharing an edge with ``node`` in either direction, sorted by id."""
    if node not in graph.nodes:
        raise UnknownNode(node)
    found = (graph.nodes[n] for n in graph.adjacency[node])
    if kind_filter is not None:
        found = (n for n in found if n.kind == kind_filter)
    return sorted(found, key=lambda n: n.id)


def related_pairs(graph: KnowledgeGraph, kinds: tuple[NodeKind, NodeKind]) -> list[tuple[KGNode, KGNode]]:
    # the graph is immutable, so the enumeration is memoized per kind pair
    key = tuple(kinds)
    if key not in graph._pairs:
        first, second = kinds
        graph._pairs[key] = [(a, b) for a in graph.nodes_of_kind(first) for b in neighbors(graph, a.id, second)]
    return list(graph._pairs[key])


def sample_related_pair(
    graph: KnowledgeGraph,
    rng: random.Random,
    kinds: tuple[NodeKind, NodeKind] = (NodeKind.INTENT, NodeKind.DESIGN_TYPE),
) -> tuple[KGNode, KGNode]:
    pairs = related_pairs(graph, kinds)
    if not pairs:
        raise NoSuchPair(kinds)
    return pairs[rng.randrange(len(pairs))]


# -- asset catalog -----------------------------------------------------------

_ASSET_FIELDS = {"asset_id", "kind", "title", "keywords", "topics", "gentech"}


@dataclass(frozen=True)
class AssetMetadata:
    asset_id: str
    kind: AssetKind
    title: str
    keywords: tuple[str, ...] = ()
    topics: tuple[str, ...] = ()
    gentech: bool = False
    extras: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def tags(self) -> tuple[str, ...]:
        """Keywords for images, topics for templates."""
        return self.keywords if self.kind == AssetKind.IMAGE else self.topics

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> "AssetMetadata":
        kind = AssetKind(obj["kind"])
        title = obj.get("title")
        if not isinstance(title, str) or not title.strip():
            raise ValueError("missing or empty title")
        tag_field = "keywords" if kind == AssetKind.IMAGE else "topics"
        tags = obj.get(tag_field)
        if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
            raise ValueError(f"{kind.value} asset needs a list of strings in {tag_field!r}")
        gentech = obj.get("gentech", False)
        if not isinstance(gentech, bool):
            raise ValueError("gentech must be a boolean")
        return cls(
            asset_id=str(obj["asset_id"]),
            kind=kind,
            title=title,
            keywords=tuple(tags) if kind == AssetKind.IMAGE else (),
            topics=tuple(tags) if kind == AssetKind.TEMPLATE else (),
            gentech=gentech,
            extras={k: v for k, v in obj.items() if k not in _ASSET_FIELDS},
        )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"asset_id": self.asset_id, "kind": self.kind.value, "title": self.title}
        if self.kind == AssetKind.IMAGE:
            out["keywords"] = list(self.keywords)
            out["gentech"] = self.gentech
        else:
            out["topics"] = list(self.topics)
            if self.gentech:
                out["gentech"] = True
        out.update(self.extras)
        return out


class AssetCatalog:
    def __init__(self, assets: Iterable[AssetMetadata] = ()):
        self.assets: tuple[AssetMetadata, ...] = tuple(assets)
        self.by_id: dict[str, AssetMetadata] = {}
        self._by_kind: dict[AssetKind, list[AssetMetadata]] = {k: [] for k in AssetKind}
        self._gentech: list[AssetMetadata] = []
        self._pools: dict[tuple, list[AssetMetadata]] = {}
        for asset in self.assets:
            if asset.asset_id in self.by_id:
                raise DuplicateAssetId(asset.asset_id)
            self.by_id[asset.asset_id] = asset
            self._by_kind[asset.kind].append(asset)
            if asset.gentech:
                self._gentech.append(asset)

    def __len__(self) -> int:
        return len(self.assets)

    def of_kind(self, kind: AssetKind) -> list[AssetMetadata]:
        return list(self._by_kind[kind])

    def matching(self, kind: AssetKind | None = None, require_gentech: bool = False) -> list[AssetMetadata]:
        key = (kind, require_gentech)
        if key not in self._pools:
            pool = self._gentech if require_gentech else self.assets
            self._pools[key] = [a for a in pool if kind is None or a.kind == kind]
        return list(self._pools[key])


def load_assets(path: str | Path) -> AssetCatalog:
    assets = []
    seen: set[str] = set()
    for lineno, obj in iter_jsonl(path):
        try:
            asset = AssetMetadata.from_dict(obj)
        except (KeyError, ValueError) as exc:
            raise MalformedRecord(lineno, f"bad asset record: {exc}", str(path)) from None
        if asset.asset_id in seen:
            raise DuplicateAssetId(asset.asset_id)
        seen.add(asset.asset_id)
        assets.append(asset)
    return AssetCatalog(assets)


def sample_asset(
    catalog: AssetCatalog,
    rng: random.Random,
    kind: AssetKind | None = None,
    require_gentech: bool = False,
) -> AssetMetadata:
    pool = catalog.matching(kind, require_gentech)
    if not pool:
        desc = f"{{kind={kind.value if kind else 'any'}, require_gentech={require_gentech}}}"
        raise NoMatchingAsset(desc)
    return pool[rng.randrange(len(pool))]
