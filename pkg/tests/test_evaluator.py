from __future__ import annotations

import json
import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from synthroute.errors import (
    EmptyGold,
    LengthMismatch,
    MalformedRecord,
    NoDiscordantPairs,
    ParseError,
    ZeroVariance,
)
from synthroute.evaluator import (
    FunctionCall,
    GoldenExample,
    StatMethod,
    content_type_accuracy,
    evaluate,
    format_call,
    function_f1,
    load_golden,
    load_provider,
    mcnemar_chi2,
    mcnemar_exact,
    paired_t,
    parse_call,
    perfect_predictions,
    score,
    subprompt_similarity,
)
from synthroute.records import ContentType, Function

from conftest import DATA, write_jsonl


def gold(fn, ct="Photo", sub="cats", query="q"):
    return GoldenExample(query, Function.parse(fn), ContentType.parse(ct), sub)


def call(fn, ct="Photo", sub="cats"):
    return FunctionCall(fn, {"content_type": ct, "extracted_prompt": sub})


# -- parsing -----------------------------------------------------------------------


def test_parse_search_call():
    c = parse_call('Search(content_type="Photo", extracted_prompt="elephant")')
    assert c.name == "Search"
    assert dict(c.params) == {"content_type": "Photo", "extracted_prompt": "elephant"}
    assert list(c.params) == ["content_type", "extracted_prompt"]


def test_parse_empty_and_escapes():
    assert parse_call("F()") == FunctionCall("F", {})
    c = parse_call(r'Generate(extracted_prompt="a \"quoted\" word")')
    assert c.params["extracted_prompt"] == 'a "quoted" word'
    assert parse_call("Search(content_type=Photo, extracted_prompt='a, b')").params == {
        "content_type": "Photo", "extracted_prompt": "a, b"}


@pytest.mark.parametrize("bad", ["", "Search", "Search(", "Search(a=1", "Search(a=1,a=2)", "Search(=1)",
                                 "Search(a=)", "1x()", 'Search(a="x") trailing', 'Search(a="open)'])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_call(bad)


def test_format_canonical():
    assert format_call(call("Search", "Photo", "elephant")) == 'Search(content_type="Photo", extracted_prompt="elephant")'
    assert format_call(FunctionCall("F", {})) == "F()"
    assert parse_call(format_call(FunctionCall("G", {"p": "x, y"}))).params["p"] == "x, y"


idents = st.from_regex(r"[A-Za-z_][A-Za-z0-9_.]{0,8}", fullmatch=True)
values = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=20)


@settings(max_examples=500, deadline=None)
@given(idents, st.dictionaries(idents, values, max_size=4))
def test_round_trip(name, params):
    c = FunctionCall(name, params)
    assert parse_call(format_call(c)) == c


# -- function F1 -------------------------------------------------------------------


def test_f1_example():
    golds = [gold(f) for f in ("Search", "Search", "Generate", "Generate")]
    preds = [call(f) for f in ("Search", "Generate", "Generate", "Generate")]
    res = function_f1(preds, golds)
    assert res.per_class["Search"].precision == 1.0 and res.per_class["Search"].recall == 0.5
    assert res.per_class["Search"].f1 == pytest.approx(2 / 3)
    assert res.per_class["Generate"].precision == pytest.approx(2 / 3)
    assert res.per_class["Generate"].f1 == pytest.approx(0.8)
    assert res.macro == pytest.approx(0.7333, abs=1e-4)
    assert res.micro == pytest.approx(0.75)


def test_f1_edges():
    golds = [gold("Search"), gold("Generate")]
    assert function_f1([call("Search"), call("Generate")], golds).macro == 1.0
    assert function_f1([None, None], golds).macro == 0.0
    assert function_f1([call("Search")], [gold("Search")]).macro == 1.0
    with pytest.raises(LengthMismatch):
        function_f1([None], golds)


def brute_f1(pred_labels, gold_labels):
    scores = []
    for cls in ("Search", "Generate"):
        tp = sum(p == cls and g == cls for p, g in zip(pred_labels, gold_labels))
        fp = sum(p == cls and g != cls for p, g in zip(pred_labels, gold_labels))
        fn = sum(p != cls and g == cls for p, g in zip(pred_labels, gold_labels))
        if tp + fp + fn == 0:
            scores.append(Fraction(1))
        else:
            scores.append(Fraction(2 * tp, 2 * tp + fp + fn))
    return sum(scores) / 2


labels = st.sampled_from(["Search", "Generate", "Other", None])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["Search", "Generate"]), labels), min_size=1, max_size=60))
def test_f1_matches_confusion_matrix(rows):
    golds = [gold(g) for g, _ in rows]
    preds = [call(p) if p else None for _, p in rows]
    expected = brute_f1([p if p in ("Search", "Generate") else "invalid" for _, p in rows], [g for g, _ in rows])
    assert function_f1(preds, golds).macro == pytest.approx(float(expected), abs=1e-12)


# -- CTA and SS --------------------------------------------------------------------


def test_cta_examples():
    golds = [gold("Search", ct) for ct in ("Photo", "Video", "Template", "Audio")]
    preds = [call("Search", ct) for ct in ("photo", "Video", "Template", "Text")]
    assert content_type_accuracy(preds, golds) == 0.75
    assert content_type_accuracy(preds[:3], golds[:3]) == 1.0
    assert content_type_accuracy([call("Search", "Photo")], [gold("Search", "Any")]) == 1.0
    assert content_type_accuracy([None], [gold("Search", "Any")]) == 0.0


def test_ss_examples():
    assert subprompt_similarity("birthday balloons", "birthday balloons") == 1.0
    assert subprompt_similarity("cats", "dogs") == 0.0
    assert subprompt_similarity("birthday balloons confetti", "birthday balloons") == pytest.approx(2 / math.sqrt(6))
    with pytest.raises(EmptyGold):
        subprompt_similarity("x", "  ")


def test_custom_provider():
    p = load_provider("synthroute.evaluator.scoring:LexicalCosine")
    assert p.name == "lexical-tf-cosine"
    with pytest.raises(ValueError):
        load_provider("no-colon")


# -- significance tests ------------------------------------------------------------


def test_mcnemar_examples():
    assert mcnemar_exact(1, 9).p_value == pytest.approx(22 / 1024, abs=1e-12)
    assert mcnemar_exact(0, 20).p_value == pytest.approx(2 * 2 ** -20, abs=1e-18)
    assert mcnemar_exact(5, 5).p_value == 1.0
    with pytest.raises(NoDiscordantPairs):
        mcnemar_exact(0, 0)
    assert mcnemar_exact(3, 7).method == StatMethod.MCNEMAR_EXACT
    with pytest.raises(ValueError):
        mcnemar_exact(-1, 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 200), st.integers(0, 200))
def test_mcnemar_matches_binomtest(b, c):
    if b + c == 0:
        return
    expected = sps.binomtest(min(b, c), b + c, 0.5).pvalue
    assert mcnemar_exact(b, c).p_value == pytest.approx(expected, rel=1e-9, abs=1e-300)
    chi = mcnemar_chi2(b, c)
    stat = (abs(b - c) - 1) ** 2 / (b + c) if abs(b - c) >= 1 else 0.0
    assert chi.statistic == pytest.approx(stat)
    assert chi.p_value == pytest.approx(sps.chi2.sf(stat, 1), abs=1e-12)


def test_paired_t_examples():
    r = paired_t([1, 2, 3, 4], [2, 3, 5, 4])
    assert r.statistic == pytest.approx(-2.449489742783178, abs=1e-12)
    assert r.p_value == pytest.approx(0.09172111331157187, abs=1e-10)
    assert r.df == 3
    r = paired_t([1, 2, 3], [2, 1, 3])
    assert (r.statistic, r.p_value) == (0.0, 1.0)
    with pytest.raises(ZeroVariance):
        paired_t([1, 2, 3], [1, 2, 3])
    with pytest.raises(LengthMismatch):
        paired_t([1, 2], [1])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=2, max_size=50))
def test_paired_t_matches_scipy(pairs):
    xs, ys = [a for a, _ in pairs], [b for _, b in pairs]
    diffs = [a - b for a, b in pairs]
    mean = sum(diffs) / len(diffs)
    if sum((d - mean) ** 2 for d in diffs) < 1e-9:
        return
    ours = paired_t(xs, ys)
    ref = sps.ttest_rel(xs, ys)
    assert ours.statistic == pytest.approx(ref.statistic, rel=1e-6, abs=1e-9)
    assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-8)


# -- harness -----------------------------------------------------------------------

FIXTURE = [
    ("find cat photos", "Search", "Photo", "cat", 'Search(content_type="Photo", extracted_prompt="cat")'),
    ("show me jazz music", "Search", "Audio", "jazz", 'Search(content_type="Audio", extracted_prompt="jazz music")'),
    ("make a birthday card", "Generate", "Template", "birthday card", 'Generate(content_type="Template", extracted_prompt="birthday card")'),
    ("create a logo", "Generate", "DesignAsset", "logo", 'Search(content_type="DesignAsset", extracted_prompt="logo")'),
    ("find anything red", "Search", "Any", "red", 'Search(content_type="Photo", extracted_prompt="red")'),
    ("draw a dragon", "Generate", "Photo", "dragon", "Generate(content_type=Photo"),
    ("find waves video", "Search", "Video", "waves", 'Search(content_type="Video", extracted_prompt="ocean waves")'),
    ("make a poster", "Generate", "Template", "poster", "sorry, I cannot help"),
    ("sunset backgrounds", "Search", "Background", "sunset", 'Search(content_type="Photo", extracted_prompt="sunset")'),
    ("bold heading text", "Search", "Text", "bold heading", 'Search(content_type="Text", extracted_prompt="bold heading")'),
]


@pytest.fixture
def fixture_files(tmp_path):
    g = write_jsonl(tmp_path / "gold.jsonl", [
        {"query": q, "function": f, "content_type": c, "subprompt": s} for q, f, c, s, _ in FIXTURE])
    p = write_jsonl(tmp_path / "pred.jsonl", [{"query": q, "raw_model_output": o} for q, *_, o in FIXTURE])
    return g, p


def test_ten_row_fixture(fixture_files, tmp_path):
    g, p = fixture_files
    res = evaluate(p, g, report_path=tmp_path / "r.json")
    assert res.n == 10 and res.parse_failures == 2
    gold_labels = [f for _, f, *_ in FIXTURE]
    pred_labels = ["Search", "Search", "Generate", "Search", "Search", "invalid", "Search", "invalid", "Search", "Search"]
    assert res.function_f1 == pytest.approx(float(brute_f1(pred_labels, gold_labels)), abs=1e-12)
    # correct types: rows 0,1,2,3,4 (Any),6,9
    assert res.cta == pytest.approx(0.7)
    expected_ss = [1.0, 1 / math.sqrt(2), 1.0, 1.0, 1.0, 0.0, 1 / math.sqrt(2), 0.0, 1.0, 1.0]
    assert res.ss_values == pytest.approx(expected_ss)
    report = json.loads((tmp_path / "r.json").read_text())
    assert len(report["rows"]) == 10 and report["rows"][5]["parse_error"]


def test_malformed_prediction_file(tmp_path, fixture_files):
    g, _ = fixture_files
    bad = write_jsonl(tmp_path / "bad.jsonl", [{"query": "x"}])
    with pytest.raises(MalformedRecord):
        evaluate(bad, g)
    with pytest.raises(LengthMismatch):
        score(["F()"], load_golden(g))


def test_perfect_predictions_on_bundled_golden():
    golds = load_golden(DATA / "golden.jsonl")
    res = score([r["raw_model_output"] for r in perfect_predictions(golds)], golds)
    assert (res.function_f1, res.cta, res.ss_mean, res.parse_failures) == (1.0, 1.0, 1.0, 0)
    assert Counter(g.function.value for g in golds) == {"Search": 237, "Generate": 223}
