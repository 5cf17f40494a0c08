"""Labeled query records and the closed label vocabularies they use."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import MalformedRecord


class Function(str, Enum):
    SEARCH = "Search"
    GENERATE = "Generate"

    @classmethod
    def parse(cls, value: str) -> "Function":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown function {value!r}")


_CONTENT_ALIASES = {
    "photo": "Photo",
    "photos": "Photo",
    "image": "Photo",
    "images": "Photo",
    "photos/images": "Photo",
    "template": "Template",
    "templates": "Template",
    "background": "Background",
    "backgrounds": "Background",
    "video": "Video",
    "videos": "Video",
    "audio": "Audio",
    "designasset": "DesignAsset",
    "designassets": "DesignAsset",
    "text": "Text",
    "any": "Any",
    "any(typeagnostic)": "Any",
}


class ContentType(str, Enum):
    PHOTO = "Photo"
    TEMPLATE = "Template"
    BACKGROUND = "Background"
    VIDEO = "Video"
    AUDIO = "Audio"
    DESIGN_ASSET = "DesignAsset"
    TEXT = "Text"
    ANY = "Any"

    @classmethod
    def parse(cls, value: str) -> "ContentType":
        if isinstance(value, cls):
            return value
        key = re.sub(r"[\s_\-]", "", str(value)).lower()
        if key in _CONTENT_ALIASES:
            return cls(_CONTENT_ALIASES[key])
        raise ValueError(f"unknown content type {value!r}")


class Generator(str, Enum):
    HEURISTIC = "Heuristic"
    TEXT_LLM = "TextLLM"
    VISION_LLM = "VisionLLM"

    @classmethod
    def parse(cls, value: str) -> "Generator":
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).strip().lower():
                return member
        raise ValueError(f"unknown generator {value!r}")


def word_count(text: str) -> int:
    """Whitespace-delimited token count, the one word definition used everywhere."""
    return len(text.split())


@dataclass(frozen=True)
class Provenance:
    route_id: str
    generator: Generator
    template_id: str | None = None
    seed: int = 0
    # position of the text inside a multi-text completion (vision route)
    variant: int | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "route_id": self.route_id,
            "generator": self.generator.value,
            "template_id": self.template_id,
            "seed": self.seed,
        }
        if self.variant is not None:
            out["variant"] = self.variant
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Provenance":
        return cls(
            route_id=str(data["route_id"]),
            generator=Generator.parse(data["generator"]),
            template_id=data.get("template_id"),
            seed=int(data.get("seed", 0)),
            variant=data.get("variant"),
        )


@dataclass(frozen=True)
class QueryRecord:
    """One labeled training example; field names follow the function-call schema."""

    input: str
    function: Function
    content_type: ContentType
    extracted_prompt: str
    provenance: Provenance = field(
        default_factory=lambda: Provenance(route_id="manual", generator=Generator.HEURISTIC)
    )

    def __post_init__(self):
        if not self.input.strip():
            raise ValueError("QueryRecord.input must be non-empty")
        if not self.extracted_prompt.strip():
            raise ValueError("QueryRecord.extracted_prompt must be non-empty")

    @property
    def generator(self) -> Generator:
        return self.provenance.generator

    def to_dict(self) -> dict[str, Any]:
        return {
            "input": self.input,
            "function": self.function.value,
            "content_type": self.content_type.value,
            "extracted_prompt": self.extracted_prompt,
            "provenance": self.provenance.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "QueryRecord":
        prov = data.get("provenance")
        return cls(
            input=str(data["input"]),
            function=Function.parse(data["function"]),
            content_type=ContentType.parse(data["content_type"]),
            extracted_prompt=str(data["extracted_prompt"]),
            provenance=Provenance.from_dict(prov) if prov else Provenance("manual", Generator.HEURISTIC),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield ``(line_number, object)`` for every non-blank line of a JSONL file."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(lineno, f"invalid JSON ({exc.msg})", str(path)) from None
            if not isinstance(obj, dict):
                raise MalformedRecord(lineno, "expected a JSON object", str(path))
            yield lineno, obj


def write_jsonl(path: str | Path, rows: Iterable[dict[str, Any]]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def load_records(path: str | Path) -> list[QueryRecord]:
    records = []
    for lineno, obj in iter_jsonl(path):
        try:
            records.append(QueryRecord.from_dict(obj))
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedRecord(lineno, str(exc), str(path)) from None
    return records


def save_records(path: str | Path, records: Iterable[QueryRecord]) -> int:
    return write_jsonl(path, (r.to_dict() for r in records))
