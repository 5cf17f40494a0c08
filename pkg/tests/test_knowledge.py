from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONCEPT_EDGES, SAMPLE_ASSETS, write_jsonl
from synthroute.errors import (
    DanglingEdge,
    DuplicateAssetId,
    DuplicateNodeId,
    MalformedRecord,
    NoMatchingAsset,
    NoSuchPair,
    UnknownNode,
)
from synthroute.knowledge import (
    AssetCatalog,
    AssetKind,
    AssetMetadata,
    KGEdge,
    KGNode,
    KnowledgeGraph,
    NodeKind,
    dump_graph,
    load_assets,
    load_graph,
    neighbors,
    related_pairs,
    sample_asset,
    sample_related_pair,
)


def node(i, kind, label=None):
    return {"record_type": "node", "id": i, "kind": kind, "label": label or i}


def edge(s, d):
    return {"record_type": "edge", "src": s, "dst": d, "relation": "related"}


def test_load_three_node_graph(tmp_path):
    path = write_jsonl(tmp_path / "g.jsonl", [
        node("Birthday", "Intent"), node("Card", "DesignType"), node("Cake", "SceneObject"),
        edge("Birthday", "Card"), edge("Birthday", "Cake"),
    ])
    g = load_graph(path)
    assert len(g.nodes) == 3
    assert len(g.edges) == 2


def test_empty_file_gives_empty_graph(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    g = load_graph(path)
    assert len(g.nodes) == 0 and len(g.edges) == 0


def test_dangling_edge_names_missing_node(tmp_path):
    path = write_jsonl(tmp_path / "g.jsonl", [node("A", "Intent"), edge("A", "X")])
    with pytest.raises(DanglingEdge) as info:
        load_graph(path)
    assert "X" in str(info.value)


def test_duplicate_node_id(tmp_path):
    path = write_jsonl(tmp_path / "g.jsonl", [node("A", "Intent"), node("A", "Action")])
    with pytest.raises(DuplicateNodeId):
        load_graph(path)


@pytest.mark.parametrize("bad", [
    '{"record_type": "node", "id": "A", "kind": "Planet", "label": "x"}',
    '{"record_type": "thing"}',
    '{"record_type": "edge", "src": "A", "dst": "A"}',
    'not json',
    '[1, 2]',
])
def test_malformed_records_report_line(tmp_path, bad):
    path = tmp_path / "g.jsonl"
    path.write_text(json_line(node("A", "Intent")) + bad + "\n")
    with pytest.raises(MalformedRecord) as info:
        load_graph(path)
    assert info.value.line == 2


def json_line(obj) -> str:
    return json.dumps(obj) + "\n"


def test_concept_graph_neighbors(concept_graph):
    assert [n.label for n in neighbors(concept_graph, "intent:birthday", NodeKind.DESIGN_TYPE)] == ["Card", "Invite"]
    assert [n.label for n in neighbors(concept_graph, "intent:birthday", NodeKind.ACTION)] == ["Cut a cake"]
    # undirected: the card is reachable from both intents
    assert [n.label for n in neighbors(concept_graph, "design:card", NodeKind.INTENT)] == ["Birthday", "Diwali"]


def test_isolated_node_has_no_neighbors():
    g = KnowledgeGraph.build([KGNode("a", NodeKind.INTENT, "A")], [])
    assert neighbors(g, "a") == []


def test_unknown_node(concept_graph):
    with pytest.raises(UnknownNode):
        neighbors(concept_graph, "nope")


def test_sample_related_pair_is_connected_and_replayable(concept_graph):
    enumerated = {(a.id, b.id) for a, b in related_pairs(concept_graph, (NodeKind.INTENT, NodeKind.DESIGN_TYPE))}
    assert enumerated == {
        ("intent:birthday", "design:card"),
        ("intent:birthday", "design:invite"),
        ("intent:diwali", "design:card"),
        ("intent:baby-shower", "design:invite"),
    }
    for seed in range(50):
        a, b = sample_related_pair(concept_graph, random.Random(seed))
        assert (a.id, b.id) in enumerated
    assert sample_related_pair(concept_graph, random.Random(42)) == sample_related_pair(concept_graph, random.Random(42))


def test_single_pair_graph_always_returns_it():
    g = KnowledgeGraph.build(
        [KGNode("i", NodeKind.INTENT, "Wedding"), KGNode("d", NodeKind.DESIGN_TYPE, "Invite")],
        [KGEdge("d", "i")],
    )
    assert {sample_related_pair(g, random.Random(s))[1].id for s in range(20)} == {"d"}


def test_no_such_pair(concept_graph):
    with pytest.raises(NoSuchPair):
        sample_related_pair(concept_graph, random.Random(0), (NodeKind.ACTION, NodeKind.DESIGN_TYPE))


def test_graph_round_trip(concept_graph, tmp_path):
    out = tmp_path / "copy.jsonl"
    dump_graph(concept_graph, out)
    again = load_graph(out)
    assert again == concept_graph
    assert again.adjacency == concept_graph.adjacency


def test_sample_catalog(sample_catalog):
    assert len(sample_catalog) == 2
    (img,) = sample_catalog.of_kind(AssetKind.IMAGE)
    (tpl,) = sample_catalog.of_kind(AssetKind.TEMPLATE)
    assert img.gentech is False
    assert img.tags == tuple(SAMPLE_ASSETS[0]["keywords"])
    assert tpl.tags == ("galactic", "space", "server banner")


def test_gentech_filter_on_sample_catalog(sample_catalog):
    with pytest.raises(NoMatchingAsset):
        sample_asset(sample_catalog, random.Random(0), AssetKind.IMAGE, require_gentech=True)
    assert sample_asset(sample_catalog, random.Random(0), AssetKind.TEMPLATE).asset_id == "tpl-1"


def test_empty_asset_file(tmp_path):
    path = tmp_path / "a.jsonl"
    path.write_text("")
    assert len(load_assets(path)) == 0


def test_asset_missing_title(tmp_path):
    path = write_jsonl(tmp_path / "a.jsonl", [{"asset_id": "x", "kind": "Image", "keywords": []}])
    with pytest.raises(MalformedRecord):
        load_assets(path)


def test_duplicate_asset_id(tmp_path):
    path = write_jsonl(tmp_path / "a.jsonl", [SAMPLE_ASSETS[0], SAMPLE_ASSETS[0]])
    with pytest.raises(DuplicateAssetId) as info:
        load_assets(path)
    assert "img-1" in str(info.value)


def test_asset_extras_and_round_trip():
    obj = {**SAMPLE_ASSETS[0], "locale": "en-US", "aspect_ratio": "3:2"}
    asset = AssetMetadata.from_dict(obj)
    assert asset.extras == {"locale": "en-US", "aspect_ratio": "3:2"}
    assert AssetMetadata.from_dict(asset.to_dict()) == asset


def test_sample_asset_replay():
    cat = AssetCatalog(
        AssetMetadata(f"g{i}", AssetKind.IMAGE, f"Image {i}", keywords=("k",), gentech=True) for i in range(3)
    )
    picks = {sample_asset(cat, random.Random(7), AssetKind.IMAGE, True).asset_id for _ in range(5)}
    assert len(picks) == 1


def test_concept_graph_counts(concept_graph):
    assert len(concept_graph.nodes) == 7
    assert len(concept_graph.edges) == len(CONCEPT_EDGES) == 6


kinds = st.sampled_from(list(NodeKind))


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 12))
    nodes = [KGNode(f"n{i}", draw(kinds), f"label {i}") for i in range(n)]
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=30))
    edges = [KGEdge(f"n{a}", f"n{b}") for a, b in pairs if a != b]
    return KnowledgeGraph.build(nodes, edges)


@settings(max_examples=150, deadline=None)
@given(graphs(), st.one_of(st.none(), kinds), st.data())
def test_neighbors_match_edge_scan(g, kind, data):
    nid = data.draw(st.sampled_from(sorted(g.nodes)))
    expected = set()
    for e in g.edges:
        for a, b in ((e.src, e.dst), (e.dst, e.src)):
            if a == nid and (kind is None or g.nodes[b].kind == kind):
                expected.add(b)
    got = [n.id for n in neighbors(g, nid, kind)]
    assert got == sorted(expected)


@settings(max_examples=100, deadline=None)
@given(graphs(), st.integers(0, 2**32))
def test_sampled_pair_is_in_enumeration(g, seed):
    ks = (NodeKind.INTENT, NodeKind.DESIGN_TYPE)
    brute = {
        (a, b)
        for e in g.edges
        for a, b in ((e.src, e.dst), (e.dst, e.src))
        if g.nodes[a].kind == ks[0] and g.nodes[b].kind == ks[1]
    }
    if not brute:
        with pytest.raises(NoSuchPair):
            sample_related_pair(g, random.Random(seed), ks)
    else:
        a, b = sample_related_pair(g, random.Random(seed), ks)
        assert (a.id, b.id) in brute
