from __future__ import annotations

import json
import random
from importlib import resources
from pathlib import Path

import pytest

from synthroute.generation import Resources
from synthroute.heuristics import VerbLexicon, load_lexicon
from synthroute.knowledge import load_assets, load_graph
from synthroute.prompts import BackendConfig, load_templates, make_backend
from synthroute.records import ContentType, Function, Generator, Provenance, QueryRecord

DATA = Path(str(resources.files("synthroute.data")))

# the seven-node concept graph: two intents, two design types, one object, one action
CONCEPT_NODES = [
    ("intent:birthday", "Intent", "Birthday"),
    ("intent:diwali", "Intent", "Diwali"),
    ("intent:baby-shower", "Intent", "Baby shower"),
    ("design:card", "DesignType", "Card"),
    ("design:invite", "DesignType", "Invite"),
    ("object:cake", "SceneObject", "Cake"),
    ("action:cut-a-cake", "Action", "Cut a cake"),
]
CONCEPT_EDGES = [
    ("intent:birthday", "design:card"),
    ("intent:birthday", "design:invite"),
    ("intent:birthday", "object:cake"),
    ("intent:birthday", "action:cut-a-cake"),
    ("intent:diwali", "design:card"),
    ("intent:baby-shower", "design:invite"),
]

SAMPLE_ASSETS = [
    {
        "asset_id": "img-1",
        "kind": "Image",
        "title": "Tropical frangipani flowers floating",
        "keywords": ["flower", "frangipani", "paradise", "turquoise", "tranquil", "tropical", "summer"],
        "gentech": False,
    },
    {
        "asset_id": "tpl-1",
        "kind": "Template",
        "title": "Galaxy Minecraft Server Banner",
        "topics": ["galactic", "space", "server banner"],
    },
]


def write_jsonl(path: Path, rows) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


@pytest.fixture
def concept_path(tmp_path) -> Path:
    rows = [{"record_type": "node", "id": i, "kind": k, "label": l} for i, k, l in CONCEPT_NODES]
    rows += [{"record_type": "edge", "src": s, "dst": d, "relation": "related"} for s, d in CONCEPT_EDGES]
    return write_jsonl(tmp_path / "kg.jsonl", rows)


@pytest.fixture
def concept_graph(concept_path):
    return load_graph(concept_path)


@pytest.fixture
def assets_path(tmp_path) -> Path:
    return write_jsonl(tmp_path / "assets.jsonl", SAMPLE_ASSETS)


@pytest.fixture
def sample_catalog(assets_path):
    return load_assets(assets_path)


@pytest.fixture(scope="session")
def default_resources() -> Resources:
    return Resources(
        graph=load_graph(DATA / "kg.jsonl"),
        catalog=load_assets(DATA / "assets.jsonl"),
        lexicon=load_lexicon(DATA / "lexicon.yaml"),
        templates=load_templates(),
        text_backend=make_backend(BackendConfig("mock-text", wrap_rate=0.1)),
        vision_backend=make_backend(BackendConfig("mock-vision", wrap_rate=0.1)),
    )


@pytest.fixture
def lexicon() -> VerbLexicon:
    return VerbLexicon()


def make_record(
    text: str,
    function: Function | str = Function.SEARCH,
    content_type: ContentType | str = ContentType.ANY,
    generator: Generator = Generator.TEXT_LLM,
    extracted: str | None = None,
    route_id: str = "r",
) -> QueryRecord:
    return QueryRecord(
        input=text,
        function=Function.parse(function) if isinstance(function, str) else function,
        content_type=ContentType.parse(content_type) if isinstance(content_type, str) else content_type,
        extracted_prompt=extracted or text,
        provenance=Provenance(route_id, generator, None if generator == Generator.HEURISTIC else "t", 0),
    )


@pytest.fixture
def rng():
    return random.Random(1234)


# -- acceptance summary ------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
