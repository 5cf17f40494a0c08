"""Command-line pipeline: ingest -> generate -> validate -> report -> eval.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import yaml

from . import __version__
from .config import PipelineConfig, data_dir, load_config
from .errors import SynthRouteError
from .evaluator import evaluate, load_provider
from .generation import Resources, generate_batch
from .heuristics import load_lexicon
from .knowledge import load_assets, load_graph
from .metrics import build_report, corpus_digest, load_reference, write_report
from .prompts import load_templates, make_backend
from .records import Function, load_records, save_records, write_jsonl
from .router import load_router_config
from .validator import StreamingFilter, load_policy, rejection_row, run_filter

log = logging.getLogger("synthroute")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for data errors here
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _config(args) -> PipelineConfig:
    overrides = {
        "seed": args.seed,
        "worker_lanes": args.lanes,
        "output_dir": args.out,
        "n_records": getattr(args, "n", None),
    }
    for key in ("kg", "assets", "templates", "router", "lexicon"):
        overrides[key] = getattr(args, key, None)
    if getattr(args, "no_screen", False):
        overrides["screen"] = False
    return load_config(args.config, overrides=overrides)


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return path


def _load_resources(cfg: PipelineConfig):
    p = cfg.paths
    graph = load_graph(_require(p.kg, "knowledge graph"))
    catalog = load_assets(_require(p.assets, "asset"))
    templates = load_templates(_require(p.templates, "template"))
    lexicon = load_lexicon(_require(p.lexicon, "lexicon"))
    router_cfg = load_router_config(_require(p.router, "router"))
    for route in router_cfg.routes:
        if route.generator.value != "Heuristic" and route.template_id not in templates:
            raise SynthRouteError(f"route {route.route_id!r} names unknown template {route.template_id!r}")
    res = Resources(
        graph, catalog, lexicon, templates,
        text_backend=make_backend(cfg.text_backend),
        vision_backend=make_backend(cfg.vision_backend),
    )
    return res, router_cfg


def cmd_ingest(args) -> int:
    cfg = _config(args)
    res, router_cfg = _load_resources(cfg)
    print(
        f"nodes={len(res.graph.nodes)} edges={len(res.graph.edges)} assets={len(res.catalog)} "
        f"templates={len(res.templates)} routes={len(router_cfg.routes)}"
    )
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = _config(args)
    res, router_cfg = _load_resources(cfg)
    started = _utc_now()
    t0 = time.perf_counter()
    state = router_cfg.build()
    policy = load_policy(_require(cfg.paths.policy, "policy")) if cfg.screen else None
    skips, rejections = [], []

    records, state = generate_batch(
        state,
        cfg.n_records,
        res,
        random.Random(cfg.seed),
        screen=StreamingFilter(policy) if policy else None,
        on_skip=skips.append,
        on_reject=lambda rec, verdict: rejections.append(rejection_row(rec, verdict)),
        lanes=cfg.worker_lanes,
    )
    out = cfg.paths.output_dir
    out.mkdir(parents=True, exist_ok=True)
    dataset = out / "dataset.jsonl"
    save_records(dataset, records)
    write_jsonl(out / "skips.jsonl", (s.to_dict() for s in skips))
    write_jsonl(out / "rejections.jsonl", rejections)

    fn_counts = Counter(r.function.value for r in records)
    manifest = {
        "corpus_id": corpus_digest(records),
        "dataset": dataset.name,
        "n_records": len(records),
        "n_requested": cfg.n_records,
        "counts": {f.value: fn_counts.get(f.value, 0) for f in Function},
        "content_type_counts": dict(sorted(Counter(r.content_type.value for r in records).items())),
        "generator_counts": dict(sorted(Counter(r.generator.value for r in records).items())),
        "route_tallies": dict(sorted(Counter(r.provenance.route_id for r in records).items())),
        "skips": len(skips),
        "rejections": len(rejections),
        "adaptations": state.adaptations,
        "seed": cfg.seed,
        "worker_lanes": cfg.worker_lanes,
        "screened": cfg.screen,
        "config_hash": cfg.config_hash(),
        "tool_version": __version__,
        "started_at": started,
        "finished_at": _utc_now(),
        "elapsed_seconds": round(time.perf_counter() - t0, 3),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    total = len(records)
    share = {k: round(v / total, 4) for k, v in manifest["counts"].items()}
    print(f"wrote {total} records to {dataset} (Search:Generate = {share['Search']}:{share['Generate']}, "
          f"skips={len(skips)}, rejections={len(rejections)})")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _config(args)
    policy_path = Path(args.policy) if args.policy else cfg.paths.policy
    policy = load_policy(_require(policy_path, "policy"))
    records = load_records(_require(Path(args.input), "input"))
    accepted, rejected = run_filter(records, policy)
    out = cfg.paths.output_dir
    out.mkdir(parents=True, exist_ok=True)
    save_records(out / "accepted.jsonl", accepted)
    write_jsonl(out / "rejections.jsonl", (rejection_row(r, v) for r, v in rejected))
    n = len(records)
    rate = len(accepted) / n if n else 0.0
    reasons = Counter(reason.value for _, v in rejected for reason in v.reasons)
    print(f"accepted={len(accepted)} rejected={len(rejected)} acceptance_rate={rate:.4f}")
    if reasons:
        print("reasons: " + ", ".join(f"{k}={v}" for k, v in sorted(reasons.items())))
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _config(args)
    reference = load_reference(_require(Path(args.reference) if args.reference else cfg.paths.reference, "reference"))
    records = load_records(_require(Path(args.corpus), "corpus"))
    report = build_report(records, reference, sample_size=args.sample_size, seed=cfg.seed)
    paths = write_report(report, cfg.paths.output_dir)
    print(f"n={report.n} divergence_vs_reference={report.divergence_vs_reference:.6f} wrote {len(paths)} files to {cfg.paths.output_dir}")
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _config(args)
    golden = Path(args.golden) if args.golden else data_dir() / "golden.jsonl"
    try:
        provider = load_provider(args.provider)
    except (ImportError, AttributeError, ValueError) as exc:
        raise UsageError(f"cannot load similarity provider {args.provider!r}: {exc}") from None
    out = cfg.paths.output_dir
    out.mkdir(parents=True, exist_ok=True)
    result = evaluate(_require(Path(args.predictions), "prediction"), _require(golden, "golden"), provider, out / "eval_report.json")
    print(
        f"n={result.n} function_f1={result.function_f1:.4f} micro_f1={result.micro_f1:.4f} "
        f"cta={result.cta:.4f} ss={result.ss_mean:.4f} parse_failures={result.parse_failures} provider={result.provider}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="synthroute", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="pipeline config YAML (default: bundled config)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--lanes", type=int, help="worker lanes for generation; >1 is not bit-reproducible")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and check the KG, assets, templates and router config")
    p.add_argument("--kg")
    p.add_argument("--assets")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("generate", help="generate a routed, validated dataset plus manifest")
    p.add_argument("-n", type=int, help="number of records")
    p.add_argument("--router", help="router config YAML")
    p.add_argument("--kg")
    p.add_argument("--assets")
    p.add_argument("--no-screen", action="store_true", help="keep raw candidates (skip validation during generation)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="filter a JSONL corpus")
    p.add_argument("input")
    p.add_argument("--policy")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="diversity metrics as JSON and CSV series")
    p.add_argument("corpus")
    p.add_argument("--reference")
    p.add_argument("--sample-size", type=int, default=2500)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("eval", help="score predictions against the golden set")
    p.add_argument("predictions", help="JSONL rows of {query, raw_model_output}")
    p.add_argument("--golden", help="golden JSONL (default: bundled fixture)")
    p.add_argument("--provider", default="lexical", help="'lexical' or module:attr of a similarity provider")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.lanes is not None and args.lanes < 1:
            parser.error("--lanes must be >= 1")
        if getattr(args, "n", None) is not None and args.n < 1:
            parser.error("-n must be >= 1")
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"synthroute: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SynthRouteError, FileNotFoundError, ValueError, KeyError, yaml.YAMLError, OSError) as exc:
        print(f"synthroute: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
