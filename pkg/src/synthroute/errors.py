"""Exception hierarchy.

Every data-level failure raised by the package derives from ``SynthRouteError``
so the CLI can map it onto exit code 2 in one place.
"""

from __future__ import annotations


class SynthRouteError(Exception):
    """Base class for all data errors raised by synthroute."""


# knowledge ------------------------------------------------------------------


class MalformedRecord(SynthRouteError):
    def __init__(self, line: int, message: str, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")


class DanglingEdge(SynthRouteError):
    def __init__(self, src: str, dst: str, missing: str):
        self.src, self.dst, self.missing = src, dst, missing
        super().__init__(f"edge {src!r} -> {dst!r} references unknown node {missing!r}")


class DuplicateNodeId(SynthRouteError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"duplicate node id {node_id!r}")


class DuplicateAssetId(SynthRouteError):
    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"duplicate asset id {asset_id!r}")


class UnknownNode(SynthRouteError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node {node_id!r}")


class NoSuchPair(SynthRouteError):
    def __init__(self, kinds):
        self.kinds = tuple(kinds)
        names = ", ".join(getattr(k, "value", str(k)) for k in self.kinds)
        super().__init__(f"no connected node pair of kinds ({names})")


class NoMatchingAsset(SynthRouteError):
    def __init__(self, description: str):
        super().__init__(f"no asset matches filter {description}")


# heuristics -----------------------------------------------------------------


class EmptyTitle(SynthRouteError):
    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"asset {asset_id!r} has an empty title")


class GentechRequired(SynthRouteError):
    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"image asset {asset_id!r} is not gentech; cannot seed a Generate query")


# prompts --------------------------------------------------------------------


class MissingSlot(SynthRouteError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"missing slot {name!r}")


class BackendError(SynthRouteError):
    pass


class BackendUnavailable(BackendError):
    pass


class BackendTimeout(BackendError):
    pass


class EmptyCompletion(BackendError):
    pass


class ImageUnreadable(BackendError):
    pass


class UnusableCompletion(SynthRouteError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


# router ---------------------------------------------------------------------


class UnreachableCategory(SynthRouteError):
    def __init__(self, category: str):
        self.category = category
        super().__init__(f"target category {category!r} has positive mass but no route reaches it")


class NothingProducible(SynthRouteError):
    pass


# metrics / evaluator --------------------------------------------------------


class EmptyCorpus(SynthRouteError):
    pass


class EmptyDistribution(SynthRouteError):
    pass


class ParseError(SynthRouteError):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"at position {position}: expected {expected}")


class LengthMismatch(SynthRouteError):
    def __init__(self, left: int, right: int):
        super().__init__(f"length mismatch: {left} predictions vs {right} gold rows")


class EmptyGold(SynthRouteError):
    pass


class NoDiscordantPairs(SynthRouteError):
    pass


class ZeroVariance(SynthRouteError):
    pass
