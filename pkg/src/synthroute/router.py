"""Weighted route selection with multiplicative distribution control.

Each route is one generation strategy labelled by (generator, function,
content type). The router samples routes categorically, tallies what was
actually produced, and every ``batch_size`` records nudges route weights by
the ratio of target to observed marginals.
"""

from __future__ import annotations

import bisect
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import yaml

from .errors import UnreachableCategory
from .records import ContentType, Function, Generator, QueryRecord

AXES = ("function", "content_type", "generator")


class LengthBucket(str, Enum):
    SHORT = "Short"
    LONG = "Long"


BUCKET_MAX_WORDS = {LengthBucket.SHORT: 10, LengthBucket.LONG: 40}


@dataclass(frozen=True)
class Route:
    route_id: str
    generator: Generator
    target_function: Function
    target_content_type: ContentType
    length_bucket: LengthBucket | None = None
    template_id: str | None = None

    def __post_init__(self):
        if self.generator != Generator.HEURISTIC and not self.template_id:
            raise ValueError(f"route {self.route_id!r}: LLM routes need a template_id")
        if self.length_bucket is None:
            bucket = LengthBucket.SHORT if self.target_function == Function.SEARCH else LengthBucket.LONG
            object.__setattr__(self, "length_bucket", bucket)

    @property
    def max_words(self) -> int:
        return BUCKET_MAX_WORDS[self.length_bucket]

    def attribute(self, axis: str):
        return {
            "function": self.target_function,
            "content_type": self.target_content_type,
            "generator": self.generator,
        }[axis]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Route":
        bucket = data.get("length_bucket")
        return cls(
            route_id=str(data["route_id"]),
            generator=Generator.parse(data["generator"]),
            target_function=Function.parse(data.get("function", data.get("target_function"))),
            target_content_type=ContentType.parse(data.get("content_type", data.get("target_content_type", "Any"))),
            length_bucket=LengthBucket(bucket) if bucket else None,
            template_id=data.get("template_id"),
        )


def _normalize(mix: Mapping[Any, float], parse) -> dict[Any, float]:
    parsed = {parse(k) if not isinstance(k, Enum) else k: float(v) for k, v in mix.items()}
    if any(v < 0 for v in parsed.values()):
        raise ValueError("target probabilities must be non-negative")
    total = sum(parsed.values())
    if total <= 0:
        raise ValueError("target mix has zero mass")
    return {k: v / total for k, v in parsed.items()}


@dataclass(frozen=True)
class TargetDistribution:
    function_mix: Mapping[Function, float]
    content_mix: Mapping[ContentType, float]
    generator_mix: Mapping[Generator, float]

    def __post_init__(self):
        for axis in AXES:
            mix = self.mix(axis)
            if any(v < 0 for v in mix.values()):
                raise ValueError(f"{axis} mix has negative entries")
            if abs(sum(mix.values()) - 1.0) > 1e-9:
                raise ValueError(f"{axis} mix sums to {sum(mix.values())}, not 1")

    def mix(self, axis: str) -> Mapping[Any, float]:
        return {
            "function": self.function_mix,
            "content_type": self.content_mix,
            "generator": self.generator_mix,
        }[axis]

    def prob(self, axis: str, value) -> float:
        return self.mix(axis).get(value, 0.0)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TargetDistribution":
        """Accepts probabilities or raw counts; each mix is normalized."""
        return cls(
            function_mix=_normalize(data["function_mix"], Function.parse),
            content_mix=_normalize(data["content_mix"], ContentType.parse),
            generator_mix=_normalize(data["generator_mix"], Generator.parse),
        )

    def to_dict(self) -> dict[str, dict[str, float]]:
        return {
            "function_mix": {k.value: v for k, v in self.function_mix.items()},
            "content_mix": {k.value: v for k, v in self.content_mix.items()},
            "generator_mix": {k.value: v for k, v in self.generator_mix.items()},
        }


@dataclass(frozen=True)
class Adaptation:
    gain: float = 1.0
    weight_floor: float = 0.01
    weight_cap: float = 0.95

    def __post_init__(self):
        if not 0 <= self.weight_floor <= self.weight_cap <= 1:
            raise ValueError("need 0 <= weight_floor <= weight_cap <= 1")


@dataclass
class RouterState:
    routes: list[Route]
    weights: list[float]
    target: TargetDistribution
    empirical: Counter = field(default_factory=Counter)
    batch_size: int = 500
    adaptation: Adaptation = field(default_factory=Adaptation)
    route_tally: Counter = field(default_factory=Counter)
    adaptations: int = 0
    _cum: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._refresh()

    def _refresh(self) -> None:
        self._cum = list(itertools.accumulate(self.weights))

    def set_weights(self, weights: Sequence[float]) -> None:
        self.weights = list(weights)
        self._refresh()

    @property
    def total(self) -> int:
        return sum(self.empirical.values())

    def bounds(self) -> tuple[float, float]:
        # a route table of n routes cannot honour floor > 1/n or cap < 1/n
        n = len(self.routes)
        return min(self.adaptation.weight_floor, 1 / n), max(self.adaptation.weight_cap, 1 / n)

    def weight_of(self, route_id: str) -> float:
        for r, w in zip(self.routes, self.weights):
            if r.route_id == route_id:
                return w
        raise KeyError(route_id)


def clamp_weights(weights: Sequence[float], floor: float, cap: float) -> list[float]:
    """Scale then clip into [floor, cap] so the result sums to one.

    ``sum(clip(s * w))`` is monotone in ``s``; the scale is found by bisection.
    """
    n = len(weights)
    total = sum(weights)
    if total <= 0:
        return [1.0 / n] * n
    w = [x / total for x in weights]
    if n * floor > 1 + 1e-12 or n * cap < 1 - 1e-12:
        raise ValueError(f"bounds [{floor}, {cap}] infeasible for {n} routes")

    def mass(s: float) -> float:
        return sum(min(cap, max(floor, s * x)) for x in w)

    lo, hi = 0.0, 1.0
    while mass(hi) < 1.0 and hi < 1e300:
        hi *= 2.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if mass(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    out = [min(cap, max(floor, hi * x)) for x in w]
    # zero weights cannot be scaled up; when everything else sits at the cap
    # the missing mass is spread evenly over the entries still below it
    deficit = 1.0 - sum(out)
    while deficit > 1e-12:
        free = [i for i, x in enumerate(out) if x < cap]
        if not free:
            break
        share = deficit / len(free)
        for i in free:
            out[i] = min(cap, out[i] + share)
        deficit = 1.0 - sum(out)
    s = sum(out)
    return [x / s for x in out]


def _check_reachable(routes: Sequence[Route], target: TargetDistribution) -> None:
    for axis in AXES:
        covered = {r.attribute(axis) for r in routes}
        for category, p in target.mix(axis).items():
            if p > 0 and category not in covered:
                raise UnreachableCategory(category.value)


def init_router(
    routes: Iterable[Route],
    target: TargetDistribution,
    *,
    batch_size: int = 500,
    adaptation: Adaptation | None = None,
) -> RouterState:
    routes = list(routes)
    if not routes:
        raise ValueError("at least one route is required")
    ids = [r.route_id for r in routes]
    if len(set(ids)) != len(ids):
        raise ValueError("route ids must be unique")
    _check_reachable(routes, target)
    raw = [math.prod(target.prob(axis, r.attribute(axis)) for axis in AXES) for r in routes]
    state = RouterState(
        routes=routes,
        weights=[1.0 / len(routes)] * len(routes),
        target=target,
        batch_size=batch_size,
        adaptation=adaptation or Adaptation(),
    )
    state.set_weights(clamp_weights(raw, *state.bounds()))
    return state


def route_marginals(state: RouterState, axis: str) -> dict[Any, float]:
    out: dict[Any, float] = Counter()
    for r, w in zip(state.routes, state.weights):
        out[r.attribute(axis)] += w
    return dict(out)


def calibrate(state: RouterState, iterations: int = 500, tol: float = 1e-10) -> RouterState:
    """Rake route weights so their marginals match the target (iterative proportional fitting).

    Product-of-marginals weights only reproduce the target marginals when the
    route table spans the full attribute grid; raking fixes sparse tables
    before the first draw.
    """
    weights = list(state.weights)
    floor, cap = state.bounds()
    for _ in range(iterations):
        worst = 0.0
        for axis in AXES:
            marg: dict[Any, float] = Counter()
            for r, w in zip(state.routes, weights):
                marg[r.attribute(axis)] += w
            for i, r in enumerate(state.routes):
                cat = r.attribute(axis)
                t = state.target.prob(axis, cat)
                m = marg[cat]
                worst = max(worst, abs(t - m))
                weights[i] = weights[i] * (t / m) if m > 0 else 0.0
        weights = clamp_weights(weights, floor, cap)
        if worst < tol:
            break
    state.set_weights(weights)
    return state


def next_route(state: RouterState, rng) -> Route:
    return state.routes[bisect.bisect_right(state._cum, rng.random() * state._cum[-1])]


def record_outcome(state: RouterState, record: QueryRecord) -> RouterState:
    state.empirical[(record.function, record.content_type, record.generator)] += 1
    state.route_tally[record.provenance.route_id] += 1
    return state


def empirical_marginals(state: RouterState) -> dict[str, dict[Any, float]]:
    total = state.total
    out: dict[str, dict[Any, float]] = {axis: Counter() for axis in AXES}
    for (f, c, g), n in state.empirical.items():
        out["function"][f] += n / total
        out["content_type"][c] += n / total
        out["generator"][g] += n / total
    return out


def adapt_weights(state: RouterState) -> RouterState:
    """Multiply each weight by (target / observed)^gain and re-clamp.

    The per-route ratio is the geometric mean over its three attribute axes,
    so a route whose attributes are all on target keeps its weight.
    """
    total = state.total
    if total < state.batch_size:
        raise ValueError(f"need at least {state.batch_size} outcomes before adapting, have {total}")
    eps = 1.0 / total
    emp = empirical_marginals(state)
    new = []
    for r, w in zip(state.routes, state.weights):
        log_ratio = 0.0
        zero = False
        for axis in AXES:
            cat = r.attribute(axis)
            t = state.target.prob(axis, cat)
            if t == 0:
                zero = True
                break
            log_ratio += math.log(t / max(emp[axis].get(cat, 0.0), eps))
        if zero:
            new.append(0.0)
        else:
            new.append(w * math.exp(state.adaptation.gain * log_ratio / len(AXES)))
    state.set_weights(clamp_weights(new, *state.bounds()))
    state.empirical.clear()
    state.adaptations += 1
    return state


# -- config -------------------------------------------------------------------


@dataclass
class RouterConfig:
    routes: list[Route]
    target: TargetDistribution
    adaptation: Adaptation = field(default_factory=Adaptation)
    batch_size: int = 500
    seed: int = 42
    calibrate: bool = True

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RouterConfig":
        return cls(
            routes=[Route.from_dict(r) for r in data["routes"]],
            target=TargetDistribution.from_dict(data["target"]),
            adaptation=Adaptation(**(data.get("adaptation") or {})),
            batch_size=int(data.get("batch_size", 500)),
            seed=int(data.get("seed", 42)),
            calibrate=bool(data.get("calibrate", True)),
        )

    def build(self) -> RouterState:
        state = init_router(self.routes, self.target, batch_size=self.batch_size, adaptation=self.adaptation)
        if self.calibrate:
            calibrate(state)
        return state


def load_router_config(path: str | Path) -> RouterConfig:
    with open(path, encoding="utf-8") as fh:
        return RouterConfig.from_dict(yaml.safe_load(fh))
