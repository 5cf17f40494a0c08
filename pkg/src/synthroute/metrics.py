"""Corpus diversity analytics: word counts, content-type mix, keyword
positions, length histograms and divergence from a reference distribution.

Quantiles use linear interpolation between order statistics (the "type 7"
rule), so q1/median/q3 of 1..10 are 3.25/5.5/7.75.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import EmptyCorpus, EmptyDistribution
from .records import ContentType, Function, QueryRecord, word_count

DEFAULT_SAMPLE_SIZE = 2500
MAX_WORDS = {Function.SEARCH: 10, Function.GENERATE: 40}

# tokens that name a content type inside a query, used for keyword positions
CONTENT_KEYWORDS: dict[ContentType, tuple[str, ...]] = {
    ContentType.PHOTO: ("photo", "photos", "image", "images", "picture", "pictures"),
    ContentType.TEMPLATE: ("template", "templates"),
    ContentType.BACKGROUND: ("background", "backgrounds", "backdrop"),
    ContentType.VIDEO: ("video", "videos", "clip", "animation"),
    ContentType.AUDIO: ("audio", "music", "sound", "song", "track"),
    ContentType.DESIGN_ASSET: ("graphic", "graphics", "icon", "icons", "sticker", "illustration", "clipart"),
    ContentType.TEXT: ("text", "font", "heading", "lettering"),
}


@dataclass(frozen=True)
class WordCountStats:
    mean: float
    median: float
    q1: float
    q3: float
    iqr: float
    n: int

    def to_dict(self) -> dict[str, float]:
        return {"mean": self.mean, "median": self.median, "q1": self.q1, "q3": self.q3, "iqr": self.iqr, "n": self.n}


@dataclass(frozen=True)
class Histogram:
    bins: dict
    total: int = field(init=False)

    def __post_init__(self):
        if any(v < 0 for v in self.bins.values()):
            raise ValueError("histogram counts must be non-negative")
        object.__setattr__(self, "total", int(sum(self.bins.values())))

    def shares(self) -> dict:
        if self.total == 0:
            return {k: 0.0 for k in self.bins}
        return {k: v / self.total for k, v in self.bins.items()}

    def to_dict(self) -> dict[str, Any]:
        return {"bins": {_key(k): v for k, v in self.bins.items()}, "total": self.total}


def _key(k) -> str:
    return k.value if hasattr(k, "value") else str(k)


def quantile(sorted_values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile of an already sorted sequence."""
    h = (len(sorted_values) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(sorted_values) - 1)
    return sorted_values[lo] + (h - lo) * (sorted_values[hi] - sorted_values[lo])


def _stats(counts: Sequence[int]) -> WordCountStats:
    if not counts:
        raise EmptyCorpus("word_count_stats needs at least one query")
    xs = sorted(counts)
    q1, med, q3 = (quantile(xs, q) for q in (0.25, 0.5, 0.75))
    return WordCountStats(mean=sum(xs) / len(xs), median=med, q1=q1, q3=q3, iqr=q3 - q1, n=len(xs))


def word_count_stats(queries: Sequence[str]) -> WordCountStats:
    return _stats([word_count(q) for q in queries])


def content_type_distribution(records: Iterable[QueryRecord]) -> Histogram:
    bins = {ct: 0 for ct in ContentType}
    for rec in records:
        bins[rec.content_type] += 1
    return Histogram(bins)


def keyword_position(query: str, keyword: str) -> float | None:
    """Normalized index of the first exact-token match, or None when absent.

    The denominator is ``len - 1`` so the first and last tokens map to 0 and 1;
    a one-token query that is the keyword gives 0.0.
    """
    tokens = query.lower().split()
    kw = keyword.lower().strip()
    try:
        idx = tokens.index(kw)
    except ValueError:
        return None
    if len(tokens) == 1:
        return 0.0
    return idx / (len(tokens) - 1)


def record_keyword_position(record: QueryRecord) -> tuple[str, float] | None:
    """Earliest content-type keyword in a record's query, if any."""
    best: tuple[str, float] | None = None
    for kw in CONTENT_KEYWORDS.get(record.content_type, ()):
        pos = keyword_position(record.input, kw)
        if pos is not None and (best is None or pos < best[1]):
            best = (kw, pos)
    return best


def length_histogram(records: Iterable[QueryRecord], function_kind: Function) -> Histogram:
    counts: dict[int, int] = {}
    for rec in records:
        if rec.function == function_kind:
            n = word_count(rec.input)
            counts[n] = counts.get(n, 0) + 1
    return Histogram(dict(sorted(counts.items())))


def _zero_fill(p: Histogram, q: Histogram) -> tuple[list[float], list[float]]:
    keys = list(dict.fromkeys([*p.bins, *q.bins]))
    return [p.bins.get(k, 0) for k in keys], [q.bins.get(k, 0) for k in keys]


def js_divergence(p: Sequence[float], q: Sequence[float]) -> float:
    """Jensen-Shannon divergence in bits between two count or probability vectors."""
    sp, sq = sum(p), sum(q)
    if sp <= 0 or sq <= 0:
        raise EmptyDistribution("both distributions need positive mass")
    p = [x / sp for x in p]
    q = [x / sq for x in q]

    def kl(a, m):
        return sum(x * math.log2(x / y) for x, y in zip(a, m) if x > 0)

    m = [(x + y) / 2 for x, y in zip(p, q)]
    value = (kl(p, m) + kl(q, m)) / 2
    return min(1.0, max(0.0, value))


def distribution_divergence(p: Histogram, q: Histogram) -> float:
    return js_divergence(*_zero_fill(p, q))


# -- reference + report ---------------------------------------------------------


@dataclass(frozen=True)
class Reference:
    reference_id: str
    content_types: Histogram
    word_summary: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Reference":
        bins = {ct: 0 for ct in ContentType}
        for k, v in data["content_types"].items():
            bins[ContentType.parse(k)] += int(v)
        return cls(str(data.get("reference_id", "reference")), Histogram(bins), dict(data.get("word_summary") or {}))

    @classmethod
    def from_records(cls, records: Sequence[QueryRecord], reference_id: str = "corpus") -> "Reference":
        return cls(reference_id, content_type_distribution(records))

    def to_dict(self) -> dict[str, Any]:
        return {
            "reference_id": self.reference_id,
            "content_types": {ct.value: n for ct, n in self.content_types.bins.items()},
            "word_summary": dict(self.word_summary),
        }


def load_reference(path: str | Path | None = None) -> Reference:
    if path is None:
        from importlib import resources

        text = resources.files("synthroute.data").joinpath("reference.json").read_text(encoding="utf-8")
        return Reference.from_dict(json.loads(text))
    with open(path, encoding="utf-8") as fh:
        return Reference.from_dict(json.load(fh))


@dataclass
class MetricsReport:
    corpus_id: str
    reference_id: str
    n: int
    word_stats: dict[str, WordCountStats | None]
    content_histogram: Histogram
    keyword_position_samples: list[float]
    length_histograms: dict[str, Histogram]
    divergence_vs_reference: float
    reference: Reference
    word_count_samples: dict[str, list[int]] = field(default_factory=dict)
    keyword_rows: list[tuple[str, str, float]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "corpus_id": self.corpus_id,
            "reference_id": self.reference_id,
            "n": self.n,
            "word_stats": {k: (v.to_dict() if v else None) for k, v in self.word_stats.items()},
            "reference_word_summary": dict(self.reference.word_summary),
            "content_histogram": self.content_histogram.to_dict(),
            "keyword_position_samples": self.keyword_position_samples,
            "length_histograms": {k: h.to_dict() for k, h in self.length_histograms.items()},
            "divergence_vs_reference": self.divergence_vs_reference,
        }


def corpus_digest(records: Iterable[QueryRecord]) -> str:
    h = hashlib.sha256()
    for rec in records:
        h.update(rec.to_json().encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()[:16]


def build_report(
    records: Sequence[QueryRecord],
    reference: Reference,
    *,
    corpus_id: str | None = None,
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    seed: int = 0,
) -> MetricsReport:
    """Assemble every metric; a function kind with no records gets ``None`` stats."""
    records = list(records)
    if not records:
        raise EmptyCorpus("cannot report on an empty corpus")
    rng = random.Random(seed)
    word_stats: dict[str, WordCountStats | None] = {"All": word_count_stats([r.input for r in records])}
    samples: dict[str, list[int]] = {}
    for fn in Function:
        counts = [word_count(r.input) for r in records if r.function == fn]
        word_stats[fn.value] = _stats(counts) if counts else None
        if len(counts) > sample_size:
            counts = rng.sample(counts, sample_size)
        samples[fn.value] = counts
    kw_rows = []
    for rec in records:
        hit = record_keyword_position(rec)
        if hit is not None:
            kw_rows.append((rec.content_type.value, hit[0], hit[1]))
    content = content_type_distribution(records)
    return MetricsReport(
        corpus_id=corpus_id or corpus_digest(records),
        reference_id=reference.reference_id,
        n=len(records),
        word_stats=word_stats,
        content_histogram=content,
        keyword_position_samples=[row[2] for row in kw_rows],
        length_histograms={fn.value: length_histogram(records, fn) for fn in Function},
        divergence_vs_reference=distribution_divergence(content, reference.content_types),
        reference=reference,
        word_count_samples=samples,
        keyword_rows=kw_rows,
    )


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_report(report: MetricsReport, out_dir: str | Path) -> list[Path]:
    """Write report.json plus one CSV series per chart; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "report.json"]
    paths[0].write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    p = out / "word_counts.csv"
    _write_csv(p, ["function", "word_count"], ((fn, n) for fn, ns in report.word_count_samples.items() for n in ns))
    paths.append(p)

    p = out / "content_types.csv"
    shares, ref_shares = report.content_histogram.shares(), report.reference.content_types.shares()
    _write_csv(
        p,
        ["content_type", "count", "share", "reference_count", "reference_share"],
        (
            (ct.value, n, round(shares[ct], 6), report.reference.content_types.bins.get(ct, 0), round(ref_shares.get(ct, 0.0), 6))
            for ct, n in report.content_histogram.bins.items()
        ),
    )
    paths.append(p)

    p = out / "keyword_positions.csv"
    _write_csv(p, ["content_type", "keyword", "position"], ((c, k, round(v, 6)) for c, k, v in report.keyword_rows))
    paths.append(p)

    for fn in Function:
        hist = report.length_histograms[fn.value]
        top = max([MAX_WORDS[fn], *hist.bins])
        p = out / f"lengths_{fn.value.lower()}.csv"
        _write_csv(p, ["word_count", "count"], ((n, hist.bins.get(n, 0)) for n in range(1, top + 1)))
        paths.append(p)
    return paths
