"""Parse and format ``name(key="value", ...)`` function-call strings."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import ParseError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


@dataclass(frozen=True)
class FunctionCall:
    name: str
    params: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not _IDENT.fullmatch(self.name or ""):
            raise ValueError(f"invalid function name {self.name!r}")
        for key in self.params:
            if not _IDENT.fullmatch(key):
                raise ValueError(f"invalid parameter name {key!r}")

    def get(self, key: str, default: str | None = None) -> str | None:
        return self.params.get(key, default)


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def ws(self) -> None:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise ParseError(self.i, repr(ch))
        self.i += 1

    def ident(self, what: str) -> str:
        m = _IDENT.match(self.s, self.i)
        if not m:
            raise ParseError(self.i, what)
        self.i = m.end()
        return m.group()

    def quoted(self) -> str:
        quote = self.s[self.i]
        self.i += 1
        out = []
        while True:
            if self.i >= len(self.s):
                raise ParseError(self.i, f"closing {quote}")
            ch = self.s[self.i]
            if ch == "\\":
                if self.i + 1 >= len(self.s):
                    raise ParseError(self.i + 1, "escaped character")
                out.append(self.s[self.i + 1])
                self.i += 2
            elif ch == quote:
                self.i += 1
                return "".join(out)
            else:
                out.append(ch)
                self.i += 1

    def bare(self) -> str:
        start = self.i
        while self.i < len(self.s) and self.s[self.i] not in ",)":
            self.i += 1
        value = self.s[start : self.i].strip()
        if not value:
            raise ParseError(start, "value")
        return value

    def value(self) -> str:
        return self.quoted() if self.peek() in ("'", '"') else self.bare()

    def call(self) -> FunctionCall:
        self.ws()
        name = self.ident("function name")
        self.ws()
        self.expect("(")
        params: dict[str, str] = {}
        self.ws()
        while self.peek() != ")":
            pos = self.i
            key = self.ident("parameter name")
            if key in params:
                raise ParseError(pos, "unique parameter name")
            self.ws()
            self.expect("=")
            self.ws()
            params[key] = self.value()
            self.ws()
            if self.peek() == ",":
                self.i += 1
                self.ws()
            elif self.peek() != ")":
                raise ParseError(self.i, "',' or ')'")
        self.i += 1
        self.ws()
        if self.i != len(self.s):
            raise ParseError(self.i, "end of input")
        return FunctionCall(name, params)


def parse_call(text: str) -> FunctionCall:
    """Parse exactly one call. Values may be double- or single-quoted
    (backslash escapes the next character) or bare up to ``,`` or ``)``."""
    return _Parser(text).call()


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_call(call: FunctionCall) -> str:
    args = ", ".join(f"{k}={_quote(v)}" for k, v in call.params.items())
    return f"{call.name}({args})"
