from __future__ import annotations

import json
import subprocess
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthroute.errors import (
    BackendUnavailable,
    EmptyCompletion,
    ImageUnreadable,
    MissingSlot,
    UnusableCompletion,
)
from synthroute.knowledge import AssetKind, AssetMetadata
from synthroute.prompts import (
    BackendConfig,
    BackendKind,
    ImageRef,
    Modality,
    PromptTemplate,
    clean_completion,
    complete_text,
    complete_vision,
    load_templates,
    make_backend,
    postprocess,
    render,
)
from synthroute.prompts.mock import mock_text, parse_prompt
from synthroute.records import ContentType, Function, word_count

GALAXY = AssetMetadata("tpl-1", AssetKind.TEMPLATE, "Galaxy Minecraft Server Banner", topics=("galactic", "space", "server banner"))


@pytest.fixture(scope="module")
def registry():
    return load_templates()


def mock(mode="grammar", **kw):
    return make_backend(BackendConfig("mock", mock_mode=mode, **kw))


def test_render_search_story_template(registry):
    tpl = registry["search-instagram-story"]
    out = render(tpl, {"title": "Galaxy Minecraft Server Banner", "intents": "gaming"})
    assert "title:Galaxy Minecraft Server Banner" in out
    assert "intents:gaming" in out
    assert "less than 10 words" in out
    assert "{" not in out and "}" not in out


def test_render_identity_and_missing_slot():
    assert render(PromptTemplate("hi", Function.SEARCH, Modality.TEXT, "say hi", ()), {}) == "say hi"
    tpl = PromptTemplate("t", Function.GENERATE, Modality.TEXT, "title:{title} actions:{actions}", ("title", "actions"))
    with pytest.raises(MissingSlot) as info:
        render(tpl, {"title": "x"})
    assert info.value.name == "actions"


def test_undeclared_slot_rejected():
    with pytest.raises(ValueError):
        PromptTemplate("t", Function.SEARCH, Modality.TEXT, "{title} {oops}", ("title",))


def test_default_max_words_by_function():
    assert PromptTemplate("s", Function.SEARCH, Modality.TEXT, "x", ()).max_words == 10
    assert PromptTemplate("g", Function.GENERATE, Modality.TEXT, "x", ()).max_words == 40


def test_render_strips_braces_from_values(registry):
    out = render(registry["search-photo"], {"title": "{evil}", "intents": "party"})
    assert "{" not in out


def test_registry_ships_verbatim_bodies(registry):
    assert "Based on this image, generate 2 single-sentence prompts that could have created this template." in (
        registry["vision-generate-template"].body
    )
    assert "The prompt should be less than 40 words." in registry["generate-facebook-post"].body
    assert len(registry) >= 20


def test_mock_text_is_deterministic_across_processes(registry):
    prompt = render(registry["search-photo"], {"title": "Tropical frangipani flowers", "intents": "summer"})
    first = complete_text(mock(), prompt, seed=11).texts
    assert first == complete_text(mock(), prompt, seed=11).texts
    code = (
        "import json,sys; from synthroute.prompts.mock import mock_text; "
        "print(json.dumps(mock_text(sys.argv[1], 11)))"
    )
    other = subprocess.run([sys.executable, "-c", code, prompt], capture_output=True, text=True, check=True)
    assert json.loads(other.stdout) == list(first)


def test_mock_echo_mode_repeats_title(registry):
    prompt = render(registry["search-instagram-story"], {"title": "Galaxy Minecraft Server Banner", "intents": "gaming"})
    (text,) = complete_text(mock("echo"), prompt, seed=0).texts
    assert "galaxy minecraft server banner" in text


def test_mock_respects_word_limit_and_keyword(registry):
    for seed in range(200):
        prompt = render(registry["search-video"], {"title": "Ocean waves at dawn", "intents": "Summer sale"})
        (text,) = mock_text(prompt, seed)
        assert word_count(text) <= 10
        assert "video" in text.lower().split()


def test_parse_prompt_slot_stops_at_sentence(registry):
    prompt = render(registry["generate-facebook-post"], {
        "title": "Coffee Shop Poster", "actions": "Share a meal", "assets": "Cake", "intents": "Father's day",
    })
    cues = parse_prompt(prompt)
    assert cues.slots["intents"] == "Father's day"
    assert cues.max_words == 40


def test_vision_returns_two_sentences_mentioning_title(registry):
    prompt = registry["vision-generate-template"].body
    c1 = complete_vision(mock(), ImageRef(None, GALAXY), prompt, seed=5)
    c2 = complete_vision(mock(), ImageRef(None, GALAXY), prompt, seed=5)
    assert c1.texts == c2.texts
    assert len(c1.texts) == 2
    title_tokens = {"galaxy", "minecraft", "server", "banner"}
    for text in c1.texts:
        assert title_tokens & set(text.lower().rstrip(".").split())
        assert text.count(". ") == 0


def test_text_only_backend_rejected_for_vision():
    backend = make_backend(BackendConfig("t", kind=BackendKind.TEXT, endpoint="http://127.0.0.1:9"))
    with pytest.raises(ValueError):
        complete_vision(backend, ImageRef(None, GALAXY), "x")


def test_real_backend_requires_endpoint():
    with pytest.raises(ValueError):
        BackendConfig("t", kind=BackendKind.TEXT)
    with pytest.raises(ValueError):
        BackendConfig("t", max_retries=-1)


def test_sampling_block_maps_to_fields():
    cfg = BackendConfig.from_dict({"backend_id": "x", "sampling": {"temperature": 0.7, "max_tokens": 64}})
    assert (cfg.temperature, cfg.max_tokens) == (0.7, 64)


# -- HTTP backend against a local server ------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    responses: list = []
    seen: list = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).seen.append((body, self.headers.get("Authorization")))
        status, payload = type(self).responses.pop(0)
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    _Handler.responses, _Handler.seen = [], []
    srv = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{srv.server_address[1]}/complete", _Handler
    srv.shutdown()


def http_backend(url, kind=BackendKind.TEXT, **kw):
    return make_backend(BackendConfig("http", kind=kind, endpoint=url, retry_backoff=0.0, **kw))


def test_http_wire_protocol_and_auth(server, monkeypatch):
    url, handler = server
    handler.responses = [(200, {"texts": ["find galaxy banner"]})]
    monkeypatch.setenv("TEST_KEY", "s3cret")
    out = complete_text(http_backend(url, api_key_env="TEST_KEY"), "prompt text", seed=9)
    assert out.texts == ("find galaxy banner",)
    body, auth = handler.seen[0]
    assert body == {"prompt": "prompt text", "image_base64": None, "temperature": 0.3, "max_tokens": 4096, "seed": 9}
    assert auth == "Bearer s3cret"


def test_http_retries_then_succeeds(server):
    url, handler = server
    handler.responses = [(503, {}), (200, {"texts": ["ok"]})]
    assert complete_text(http_backend(url, max_retries=1), "p").texts == ("ok",)
    assert len(handler.seen) == 2


def test_http_no_retry_unavailable(server):
    url, handler = server
    handler.responses = [(500, {})]
    with pytest.raises(BackendUnavailable):
        complete_text(http_backend(url, max_retries=0), "p")
    assert len(handler.seen) == 1


def test_unreachable_endpoint_single_attempt():
    with pytest.raises(BackendUnavailable):
        complete_text(http_backend("http://127.0.0.1:9/none", max_retries=0, timeout=2), "p")


def test_http_empty_completion(server):
    url, handler = server
    handler.responses = [(200, {"texts": ["   "]})]
    with pytest.raises(EmptyCompletion):
        complete_text(http_backend(url), "p")


def test_vision_image_upload_and_split(server, tmp_path):
    url, handler = server
    img = tmp_path / "a.png"
    img.write_bytes(b"\x89PNG fake")
    handler.responses = [(200, {"texts": ["Make a galaxy banner. Design a space banner. Extra one."]})]
    out = complete_vision(http_backend(url, BackendKind.VISION), ImageRef(str(img)), "generate 2 single-sentence prompts")
    assert out.texts == ("Make a galaxy banner.", "Design a space banner.")
    assert handler.seen[0][0]["image_base64"] == "iVBORyBmYWtl"


def test_unreadable_image(tmp_path):
    backend = http_backend("http://127.0.0.1:9/none", BackendKind.VISION)
    with pytest.raises(ImageUnreadable):
        complete_vision(backend, ImageRef(str(tmp_path / "missing.png")), "generate 2 prompts")


# -- postprocess -------------------------------------------------------------------


@pytest.fixture(scope="module")
def search_tpl():
    return PromptTemplate("s", Function.SEARCH, Modality.TEXT, "x", (), content_type=ContentType.TEMPLATE)


def test_postprocess_strips_quotes(search_tpl):
    rec = postprocess('"find birthday card designs"', search_tpl)
    assert rec.input == "find birthday card designs"
    assert rec.extracted_prompt == "birthday card designs"
    assert rec.function == Function.SEARCH
    assert rec.content_type == ContentType.TEMPLATE


@pytest.mark.parametrize("raw", [
    "Sure, here is the query: find birthday card designs",
    "Here is your query: \"find birthday card designs\".",
    "Certainly! find birthday card designs",
    "  find birthday card designs  ",
])
def test_boilerplate_removed(search_tpl, raw):
    assert postprocess(raw, search_tpl).input == "find birthday card designs"


def test_clean_text_is_fixpoint(search_tpl):
    assert postprocess("show me retro posters", search_tpl).input == "show me retro posters"


def test_over_length_and_empty(search_tpl):
    with pytest.raises(UnusableCompletion) as info:
        postprocess(" ".join(["word"] * 25), search_tpl)
    assert info.value.reason == "over_length"
    postprocess(" ".join(["word"] * 15), search_tpl)  # 15 = 10 x 1.5 is still usable
    with pytest.raises(UnusableCompletion) as info:
        postprocess(' "" ', search_tpl)
    assert info.value.reason == "empty"


def test_generate_extracted_prompt():
    tpl = PromptTemplate("g", Function.GENERATE, Modality.TEXT, "x", ())
    rec = postprocess("Please create an elegant wedding invite with gold borders", tpl)
    assert rec.extracted_prompt == "elegant wedding invite with gold borders"


text_pieces = st.lists(
    st.sampled_from(["Sure,", "here", "is", "the", "query:", '"', "find", "cats", "red", "make", "a", "card", "!", "."]),
    min_size=1, max_size=12,
).map(" ".join)


@settings(max_examples=300, deadline=None)
@given(text_pieces, st.sampled_from([Function.SEARCH, Function.GENERATE]))
def test_postprocess_idempotent(raw, fn):
    tpl = PromptTemplate("t", fn, Modality.TEXT, "x", ())
    try:
        once = postprocess(raw, tpl)
    except UnusableCompletion:
        return
    twice = postprocess(once.input, tpl)
    assert twice.input == once.input
    assert clean_completion(once.input) == once.input


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.sampled_from(["title", "intents", "actions", "assets"]), st.text(min_size=1, max_size=20), min_size=4))
def test_render_leaves_no_markers(binding):
    tpl = PromptTemplate("t", Function.GENERATE, Modality.TEXT,
                         "title:{title} intents:{intents} actions:{actions} assets:{assets}",
                         ("title", "intents", "actions", "assets"))
    try:
        out = render(tpl, binding)
    except MissingSlot:
        assert any(not v.replace("{", "").replace("}", "").strip() for v in binding.values())
        return
    assert render(PromptTemplate("u", Function.GENERATE, Modality.TEXT, out.replace("{", "").replace("}", ""), ()), {}) == out
