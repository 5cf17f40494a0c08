"""Prompt template registry and slot rendering."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

import yaml

from ..errors import MissingSlot
from ..records import ContentType, Function

SLOT_PATTERN = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")
DEFAULT_MAX_WORDS = {Function.SEARCH: 10, Function.GENERATE: 40}


class Modality(str, Enum):
    TEXT = "Text"
    VISION = "Vision"


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    target_function: Function
    modality: Modality
    body: str
    slots: tuple[str, ...] = ()
    max_words: int | None = None
    content_type: ContentType = ContentType.ANY

    def __post_init__(self):
        used = set(SLOT_PATTERN.findall(self.body))
        undeclared = used - set(self.slots)
        if undeclared:
            raise ValueError(f"template {self.template_id!r} uses undeclared slots {sorted(undeclared)}")
        if self.max_words is None:
            object.__setattr__(self, "max_words", DEFAULT_MAX_WORDS[self.target_function])
        if self.max_words <= 0:
            raise ValueError("max_words must be positive")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PromptTemplate":
        return cls(
            template_id=str(data["template_id"]),
            target_function=Function.parse(data["target_function"]),
            modality=Modality(data.get("modality", "Text")),
            body=str(data["body"]).strip(),
            slots=tuple(data.get("slots", ())),
            max_words=data.get("max_words"),
            content_type=ContentType.parse(data.get("content_type", "Any")),
        )


def render(template: PromptTemplate, binding: Mapping[str, str]) -> str:
    """Fill every ``{slot}`` in the body; braces inside values are dropped."""
    for name in template.slots:
        value = binding.get(name)
        if value is None or not str(value).strip():
            raise MissingSlot(name)

    def fill(match: re.Match) -> str:
        return str(binding[match.group(1)]).replace("{", "").replace("}", "").strip()

    return SLOT_PATTERN.sub(fill, template.body)


class TemplateRegistry:
    def __init__(self, templates: Iterable[PromptTemplate]):
        self._templates: dict[str, PromptTemplate] = {}
        for t in templates:
            if t.template_id in self._templates:
                raise ValueError(f"duplicate template id {t.template_id!r}")
            self._templates[t.template_id] = t

    def __getitem__(self, template_id: str) -> PromptTemplate:
        return self._templates[template_id]

    def __contains__(self, template_id: object) -> bool:
        return template_id in self._templates

    def __iter__(self):
        return iter(self._templates.values())

    def __len__(self) -> int:
        return len(self._templates)


def load_templates(path: str | Path | None = None) -> TemplateRegistry:
    """Load a registry file; ``None`` loads the bundled defaults."""
    if path is None:
        text = resources.files("synthroute.data").joinpath("templates.yaml").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    data = yaml.safe_load(text) or {}
    rows = data.get("templates", data) if isinstance(data, dict) else data
    return TemplateRegistry(PromptTemplate.from_dict(row) for row in rows)
