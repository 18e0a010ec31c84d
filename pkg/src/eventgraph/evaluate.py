"""Precision/recall of an emitted event stream against planted ground truth."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True)
class Label:
    keywords: frozenset[str]
    q_start: int
    q_end: int

    def matches(self, keywords: Iterable[str], q: int) -> bool:
        if not self.q_start <= q <= self.q_end:
            return False
        hit = len(self.keywords & set(keywords))
        return 2 * hit >= len(self.keywords)


@dataclass
class PRResult:
    precision: float
    recall: float
    matches: list[tuple[str, int]] = field(default_factory=list)  # (cluster id, label index)
    emissions: int = 0
    labels: int = 0

    def as_dict(self) -> dict:
        return {
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "emissions": self.emissions,
            "labels": self.labels,
            "matches": [list(m) for m in self.matches],
        }


def load_labels(lines: Iterable[str]) -> list[Label]:
    out = []
    for ln in lines:
        ln = ln.strip()
        if not ln:
            continue
        d = json.loads(ln)
        out.append(Label(frozenset(d["keywords"]), int(d["q_start"]), int(d["q_end"])))
    return out


def load_events(lines: Iterable[str]) -> list[dict]:
    return [json.loads(ln) for ln in lines if ln.strip()]


def eval_pr(events: list[dict], labels: list[Label]) -> PRResult:
    """Match emissions (deduplicated by cluster id) to labels.

    An id counts as a true emission if any of its non-dissolved records
    matches some label. Dissolved records are retractions and are ignored.
    """
    by_id: dict[str, list[dict]] = {}
    for ev in events:
        if ev.get("status") == "dissolved":
            continue
        by_id.setdefault(ev["id"], []).append(ev)

    matched_labels: set[int] = set()
    matches: list[tuple[str, int]] = []
    good_ids = 0
    for cid in sorted(by_id):
        hit = False
        for ev in by_id[cid]:
            for li, lb in enumerate(labels):
                if lb.matches(ev["keywords"], ev["q"]):
                    hit = True
                    if li not in matched_labels:
                        matched_labels.add(li)
                        matches.append((cid, li))
        good_ids += hit

    if by_id:
        precision = good_ids / len(by_id)
    else:
        if labels:
            warnings.warn("no emissions: precision undefined, reported as 1.0", stacklevel=2)
        precision = 1.0
    recall = len(matched_labels) / len(labels) if labels else 1.0
    return PRResult(precision, recall, sorted(matches, key=lambda m: m[1]), len(by_id), len(labels))
