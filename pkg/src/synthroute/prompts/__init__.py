"""Prompt templates, generator backends and completion post-processing."""

from .backends import (
    BackendConfig,
    BackendKind,
    Completion,
    HttpBackend,
    ImageRef,
    MockBackend,
    complete_text,
    complete_vision,
    make_backend,
)
from .postprocess import clean_completion, extract_prompt, postprocess
from .templates import Modality, PromptTemplate, TemplateRegistry, load_templates, render

__all__ = [
    "BackendConfig",
    "BackendKind",
    "Completion",
    "HttpBackend",
    "ImageRef",
    "MockBackend",
    "Modality",
    "PromptTemplate",
    "TemplateRegistry",
    "clean_completion",
    "complete_text",
    "complete_vision",
    "extract_prompt",
    "load_templates",
    "make_backend",
    "postprocess",
    "render",
]
