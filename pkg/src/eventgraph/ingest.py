"""Message parsing, tokenization and quantum batching."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

_NON_TOKEN = re.compile(r"[^\w.]+")


class ParseError(ValueError):
    """A malformed input record. Recoverable: the engine skips and counts it."""

    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


@dataclass(frozen=True, slots=True)
class Message:
    user: str
    ts: int
    keywords: tuple[str, ...]
    text: str = ""


@dataclass(frozen=True, slots=True)
class QuantumBatch:
    index: int
    messages: tuple[Message, ...]


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a newline-delimited stop-word file; ``None`` loads the bundled list."""
    if path is None:
        text = resources.files("eventgraph").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    words = (line.strip().lower() for line in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#!"))


DEFAULT_STOPWORDS = load_stopwords()


def _normalize(raw: str) -> str:
    tok = raw.lower()
    hashtag = tok.startswith("#")
    body = _NON_TOKEN.sub("", tok).strip(".")
    if not body:
        return ""
    return "#" + body if hashtag else body


def tokenize(text: str, stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Split ``text`` into normalized keywords.

    Tokens are lowercased and stripped of punctuation except internal dots and
    a leading ``#``. Stop words and tokens shorter than two characters are
    dropped; repeated tokens are kept once, in first-occurrence order.
    """
    seen: set[str] = set()
    out: list[str] = []
    for raw in text.split():
        tok = _normalize(raw)
        if len(tok) < 2 or tok in stopwords or tok in seen:
            continue
        seen.add(tok)
        out.append(tok)
    return out


def parse_message(
    line: str,
    lineno: int = 0,
    stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS,
) -> Message:
    """Parse one JSON record with fields ``user``, ``ts`` and ``text``."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise ParseError(lineno, "record is not an object")
    user, ts, text = obj.get("user"), obj.get("ts"), obj.get("text")
    if not isinstance(user, str):
        raise ParseError(lineno, "'user' must be a string")
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise ParseError(lineno, "'ts' must be an integer")
    if not isinstance(text, str):
        raise ParseError(lineno, "'text' must be a string")
    return Message(user, ts, tuple(tokenize(text, stopwords)), text)


def read_messages(
    lines: Iterable[str],
    stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS,
    errors: list[ParseError] | None = None,
) -> Iterator[Message]:
    """Parse records in order, skipping blank lines and malformed ones.

    Malformed records are appended to ``errors`` when given, otherwise dropped.
    """
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield parse_message(line, lineno, stopwords)
        except ParseError as err:
            if errors is not None:
                errors.append(err)


def batch_quanta(messages: Iterable[Message], delta: int, start: int = 0) -> Iterator[QuantumBatch]:
    """Group messages into consecutive batches of ``delta`` messages."""
    if delta < 1:
        raise ValueError("quantum size must be >= 1")
    index = start
    buf: list[Message] = []
    for msg in messages:
        buf.append(msg)
        if len(buf) == delta:
            yield QuantumBatch(index, tuple(buf))
            index += 1
            buf = []
    if buf:
        yield QuantumBatch(index, tuple(buf))


def batch_quanta_by_time(
    messages: Iterable[Message], delta_ms: int, start: int = 0
) -> Iterator[QuantumBatch]:
    """Group messages into wall-clock quanta of ``delta_ms`` milliseconds.

    Quanta with no messages are still emitted so indices stay consecutive.
    A message whose timestamp runs backwards joins the current quantum.
    """
    if delta_ms < 1:
        raise ValueError("quantum length must be >= 1 ms")
    index = start
    t0: int | None = None
    buf: list[Message] = []
    for msg in messages:
        if t0 is None:
            t0 = msg.ts
        slot = start + max(0, (msg.ts - t0) // delta_ms)
        while slot > index:
            yield QuantumBatch(index, tuple(buf))
            index += 1
            buf = []
        buf.append(msg)
    if buf:
        yield QuantumBatch(index, tuple(buf))
