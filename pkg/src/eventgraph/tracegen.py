"""Synthetic message traces: Zipf background chatter plus planted events.

Trace description (JSON object)::

    {
      "quanta": 40,
      "quantum_size": 160,
      "background": {"vocab": 2000, "zipf_s": 1.1, "users": 100000,
                     "keywords_per_message": [2, 4]},
      "events": [{"keywords": ["earthquake", "struck", "eastern", "turkey"],
                  "start": 5, "duration": 12, "users_per_quantum": 8,
                  "cooccurrence": 0.7,
                  "late_keywords": [{"keyword": "5.9", "start": 9}]}],
      "distractors": [{"keyword": "lol", "start": 5, "duration": 12,
                       "users_per_quantum": 8}]
    }

Planted messages replace background messages, so every quantum holds
exactly ``quantum_size`` messages and quantum indices line up with a
count-based replay at the same ``quantum_size``.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field


class TraceSpecError(ValueError):
    pass


@dataclass
class Background:
    vocab: int = 2000
    zipf_s: float = 1.1
    users: int = 100_000
    keywords_per_message: tuple[int, int] = (2, 4)


@dataclass
class LateKeyword:
    keyword: str
    start: int


@dataclass
class PlantedEvent:
    keywords: list[str]
    start: int
    duration: int
    users_per_quantum: int = 8
    cooccurrence: float = 0.7
    late_keywords: list[LateKeyword] = field(default_factory=list)

    @property
    def end(self) -> int:
        return self.start + self.duration - 1

    def active_keywords(self, q: int) -> list[str]:
        return self.keywords + [lk.keyword for lk in self.late_keywords if q >= lk.start]


@dataclass
class Distractor:
    keyword: str
    start: int
    duration: int
    users_per_quantum: int = 8


@dataclass
class TraceSpec:
    quanta: int
    quantum_size: int = 160
    background: Background = field(default_factory=Background)
    events: list[PlantedEvent] = field(default_factory=list)
    distractors: list[Distractor] = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "TraceSpec":
        try:
            bg = d.get("background", {})
            kpm = bg.get("keywords_per_message", [2, 4])
            background = Background(
                int(bg.get("vocab", 2000)),
                float(bg.get("zipf_s", 1.1)),
                int(bg.get("users", 100_000)),
                (int(kpm[0]), int(kpm[1])),
            )
            events = [
                PlantedEvent(
                    [str(k) for k in e["keywords"]],
                    int(e["start"]),
                    int(e["duration"]),
                    int(e.get("users_per_quantum", 8)),
                    float(e.get("cooccurrence", 0.7)),
                    [LateKeyword(str(lk["keyword"]), int(lk["start"])) for lk in e.get("late_keywords", [])],
                )
                for e in d.get("events", [])
            ]
            distractors = [
                Distractor(str(x["keyword"]), int(x["start"]), int(x["duration"]), int(x.get("users_per_quantum", 8)))
                for x in d.get("distractors", [])
            ]
            spec = cls(int(d["quanta"]), int(d.get("quantum_size", 160)), background, events, distractors)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise TraceSpecError(f"invalid trace spec: {exc}") from exc
        spec.validate()
        return spec

    def validate(self) -> None:
        bg = self.background
        if self.quanta < 0 or self.quantum_size < 1:
            raise TraceSpecError("quanta must be >= 0 and quantum_size >= 1")
        if bg.vocab < 1 or bg.users < 1 or bg.zipf_s <= 0:
            raise TraceSpecError("background vocab, users and zipf_s must be positive")
        lo, hi = bg.keywords_per_message
        if not 1 <= lo <= hi:
            raise TraceSpecError("keywords_per_message must satisfy 1 <= lo <= hi")
        for e in self.events:
            if len(e.keywords) < 2:
                raise TraceSpecError("a planted event needs at least 2 keywords")
            if e.duration < 1 or e.users_per_quantum < 1 or not 0.0 <= e.cooccurrence <= 1.0:
                raise TraceSpecError(f"bad planted event {e.keywords}")
        for x in self.distractors:
            if x.duration < 1 or x.users_per_quantum < 1:
                raise TraceSpecError(f"bad distractor {x.keyword}")
        for q in range(self.quanta):
            planted = sum(e.users_per_quantum for e in self.events if e.start <= q <= e.end)
            planted += sum(x.users_per_quantum for x in self.distractors if x.start <= q < x.start + x.duration)
            if planted > self.quantum_size:
                raise TraceSpecError(f"quantum {q}: {planted} planted messages exceed quantum_size")

    def labels(self) -> list[dict]:
        return [
            {"keywords": sorted(set(e.active_keywords(e.end))), "q_start": e.start, "q_end": e.end}
            for e in self.events
        ]


def _event_subset(rng: random.Random, keywords: list[str], rate: float) -> list[str]:
    picked = [k for k in keywords if rng.random() < rate]
    if len(picked) < 2:
        rest = [k for k in keywords if k not in picked]
        picked += rng.sample(rest, 2 - len(picked))
    rng.shuffle(picked)
    return picked


def gen_trace(spec: TraceSpec, seed: int = 0) -> list[dict]:
    """Generate message records ``{"user", "ts", "text"}`` in arrival order."""
    rng = random.Random(seed)
    bg = spec.background
    vocab = [f"w{i:05d}" for i in range(bg.vocab)]
    cum = list(itertools.accumulate(1.0 / (r + 1) ** bg.zipf_s for r in range(bg.vocab)))
    lo, hi = bg.keywords_per_message
    planted_uid = itertools.count()

    def background_words(k: int) -> list[str]:
        words: list[str] = []
        while len(words) < k:
            w = rng.choices(vocab, cum_weights=cum)[0]
            if w not in words:
                words.append(w)
        return words

    out: list[dict] = []
    for q in range(spec.quanta):
        msgs: list[tuple[str, list[str]]] = []
        for e in spec.events:
            if e.start <= q <= e.end:
                kws = e.active_keywords(q)
                for _ in range(e.users_per_quantum):
                    msgs.append((f"p{next(planted_uid)}", _event_subset(rng, kws, e.cooccurrence)))
        for x in spec.distractors:
            if x.start <= q < x.start + x.duration:
                for _ in range(x.users_per_quantum):
                    msgs.append((f"p{next(planted_uid)}", [x.keyword] + background_words(rng.randint(lo, hi))))
        while len(msgs) < spec.quantum_size:
            msgs.append((f"u{rng.randrange(bg.users)}", background_words(rng.randint(lo, hi))))
        rng.shuffle(msgs)
        base = q * spec.quantum_size
        for i, (user, words) in enumerate(msgs):
            out.append({"user": user, "ts": (base + i) * 1000, "text": " ".join(words)})
    return out


def dump_trace(records: list[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def dump_labels(spec: TraceSpec) -> str:
    return "".join(json.dumps(lb, sort_keys=True) + "\n" for lb in spec.labels())
