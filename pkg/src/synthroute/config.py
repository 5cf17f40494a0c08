"""Pipeline configuration: one YAML file, CLI-flag overrides, env for secrets.

Precedence is flags > file > built-in defaults. Backend endpoints and the API
key may come from the environment and are never read from config files.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .prompts import BackendConfig, BackendKind

ENV_TEXT_ENDPOINT = "SYNTHROUTE_TEXT_ENDPOINT"
ENV_VISION_ENDPOINT = "SYNTHROUTE_VISION_ENDPOINT"
ENV_API_KEY = "SYNTHROUTE_API_KEY"

_SECRET_KEYS = {"api_key", "apikey", "token", "password", "secret"}


def data_dir() -> Path:
    return Path(str(resources.files("synthroute.data")))


@dataclass(frozen=True)
class Paths:
    kg: Path
    assets: Path
    templates: Path
    policy: Path
    router: Path
    reference: Path
    lexicon: Path
    output_dir: Path

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Path) -> "Paths":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown path keys: {sorted(unknown)}")
        defaults = {
            "kg": "kg.jsonl",
            "assets": "assets.jsonl",
            "templates": "templates.yaml",
            "policy": "policy.yaml",
            "router": "router.yaml",
            "reference": "reference.json",
            "lexicon": "lexicon.yaml",
            "output_dir": "out",
        }
        merged = {**defaults, **{k: v for k, v in data.items() if v is not None}}
        return cls(**{k: (base / Path(v)).resolve() if not Path(v).is_absolute() else Path(v) for k, v in merged.items()})


def _default_backend(name: str) -> BackendConfig:
    return BackendConfig(backend_id=f"mock-{name}", kind=BackendKind.MOCK)


@dataclass(frozen=True)
class PipelineConfig:
    paths: Paths
    seed: int = 42
    worker_lanes: int = 1
    n_records: int = 1000
    screen: bool = True
    text_backend: BackendConfig = field(default_factory=lambda: _default_backend("text"))
    vision_backend: BackendConfig = field(default_factory=lambda: _default_backend("vision"))

    def __post_init__(self):
        if self.n_records < 1:
            raise ValueError("n_records must be >= 1")
        if self.worker_lanes < 1:
            raise ValueError("worker_lanes must be >= 1")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Path) -> "PipelineConfig":
        data = dict(data or {})
        _reject_secrets(data)
        backends = data.pop("backends", None) or {}
        kwargs: dict[str, Any] = {"paths": Paths.from_dict(data.pop("paths", None) or {}, base)}
        for key in ("seed", "worker_lanes", "n_records"):
            if key in data:
                kwargs[key] = int(data.pop(key))
        if "screen" in data:
            kwargs["screen"] = bool(data.pop("screen"))
        if data:
            raise ValueError(f"unknown config keys: {sorted(data)}")
        if "text" in backends:
            kwargs["text_backend"] = BackendConfig.from_dict(backends["text"])
        if "vision" in backends:
            kwargs["vision_backend"] = BackendConfig.from_dict(backends["vision"])
        return cls(**kwargs)

    def required_files(self) -> dict[str, Path]:
        p = self.paths
        return {
            "kg": p.kg,
            "assets": p.assets,
            "templates": p.templates,
            "policy": p.policy,
            "router": p.router,
            "reference": p.reference,
            "lexicon": p.lexicon,
        }

    def config_hash(self) -> str:
        """Stable digest of parameters and referenced file contents (not their locations)."""
        doc = {
            "seed": self.seed,
            "worker_lanes": self.worker_lanes,
            "n_records": self.n_records,
            "screen": self.screen,
            "backends": {
                "text": _backend_fingerprint(self.text_backend),
                "vision": _backend_fingerprint(self.vision_backend),
            },
            "files": {k: _file_digest(v) for k, v in self.required_files().items()},
        }
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode("utf-8")).hexdigest()


def _backend_fingerprint(cfg: BackendConfig) -> dict[str, Any]:
    out = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        out[f.name] = value.value if isinstance(value, BackendKind) else value
    return out


def _file_digest(path: Path) -> str | None:
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError:
        return None


def _reject_secrets(obj: Any, where: str = "config") -> None:
    if isinstance(obj, Mapping):
        for k, v in obj.items():
            if str(k).lower() in _SECRET_KEYS:
                raise ValueError(f"{where}.{k}: credentials must come from the environment ({ENV_API_KEY})")
            _reject_secrets(v, f"{where}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _reject_secrets(v, f"{where}[{i}]")


def apply_env(cfg: PipelineConfig, env: Mapping[str, str] | None = None) -> PipelineConfig:
    """An endpoint in the environment turns that backend into a real HTTP client."""
    env = os.environ if env is None else env
    out = cfg
    for attr, var, kind in (
        ("text_backend", ENV_TEXT_ENDPOINT, BackendKind.TEXT),
        ("vision_backend", ENV_VISION_ENDPOINT, BackendKind.VISION),
    ):
        endpoint = env.get(var)
        if endpoint:
            current: BackendConfig = getattr(out, attr)
            backend = replace(current, kind=kind, endpoint=endpoint, api_key_env=current.api_key_env or ENV_API_KEY)
            out = replace(out, **{attr: backend})
    return out


def load_config(
    path: str | Path | None = None,
    *,
    overrides: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
) -> PipelineConfig:
    """Read the config file (bundled default when ``path`` is None), then apply overrides and env."""
    if path is None:
        base = data_dir()
        text = (base / "config.yaml").read_text(encoding="utf-8")
    else:
        path = Path(path)
        base = path.resolve().parent
        text = path.read_text(encoding="utf-8")
    cfg = PipelineConfig.from_dict(yaml.safe_load(text) or {}, base)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if "output_dir" in overrides:
        cfg = replace(cfg, paths=replace(cfg.paths, output_dir=Path(overrides.pop("output_dir")).resolve()))
    for key in list(overrides):
        if key in ("kg", "assets", "templates", "policy", "router", "reference", "lexicon"):
            cfg = replace(cfg, paths=replace(cfg.paths, **{key: Path(overrides.pop(key)).resolve()}))
    if overrides:
        cfg = replace(cfg, **overrides)
    return apply_env(cfg, env)
