#!/usr/bin/env python3
"""Compiled vs pure-Python kernel timings, plus end-to-end replay throughput.

Usage:
    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeat 7 --quanta 60 --json
"""

from __future__ import annotations

import argparse
import json
import os
import random
import subprocess
import sys
import tempfile
import timeit
from pathlib import Path

from eventgraph import _kernels_py
from eventgraph.tracegen import TraceSpec, dump_trace, gen_trace

try:
    from eventgraph import _kernels as _compiled
except ImportError:
    _compiled = None


def _workloads(rng: random.Random):
    users = [f"user{rng.randrange(10**7)}" for _ in range(2000)]
    hashed = _kernels_py.hash_users(users, 0)
    groups = [set(rng.sample(hashed, 40)) for _ in range(200)]
    sketches = [sorted(g)[:8] for g in groups]
    pairs = [(sketches[rng.randrange(200)], sketches[rng.randrange(200)]) for _ in range(2000)]

    def wl_hash(mod):
        return lambda: mod.hash_users(users, 0)

    def wl_bottom(mod):
        return lambda: [mod.bottom_p(g, 8) for g in groups]

    def wl_merge(mod):
        return lambda: [mod.merge_bottom_p(a, b, 8) for a, b in pairs]

    def wl_intersect(mod):
        return lambda: [mod.sketches_intersect(a, b) for a, b in pairs]

    return {
        "hash_users[2000]": wl_hash,
        "bottom_p[200x40]": wl_bottom,
        "merge_bottom_p[2000]": wl_merge,
        "sketches_intersect[2000]": wl_intersect,
    }


def bench_kernels(repeat: int, seed: int) -> list[dict]:
    rows = []
    for name, make in _workloads(random.Random(seed)).items():
        row = {"kernel": name}
        row["python_ms"] = min(timeit.repeat(make(_kernels_py), number=5, repeat=repeat)) / 5 * 1e3
        if _compiled is not None:
            row["compiled_ms"] = min(timeit.repeat(make(_compiled), number=5, repeat=repeat)) / 5 * 1e3
            row["speedup"] = row["python_ms"] / row["compiled_ms"]
        rows.append(row)
    return rows


def _trace_spec(quanta: int) -> TraceSpec:
    events = [
        {
            "keywords": [f"ev{e}k{i}" for i in range(5)],
            "start": 2 + 6 * e,
            "duration": 15,
            "users_per_quantum": 10,
            "cooccurrence": 0.7,
        }
        for e in range(max(1, quanta // 8))
    ]
    return TraceSpec.from_dict({"quanta": quanta, "quantum_size": 160, "events": events})


def bench_replay(quanta: int, seed: int) -> list[dict]:
    rows = []
    with tempfile.TemporaryDirectory() as tmp:
        trace = Path(tmp) / "trace.jsonl"
        trace.write_text(dump_trace(gen_trace(_trace_spec(quanta), seed)), encoding="utf-8")
        for label, env_extra in (("compiled", {}), ("python", {"EVENTGRAPH_PURE_PYTHON": "1"})):
            env = dict(os.environ, **env_extra)
            proc = subprocess.run(
                [sys.executable, "-m", "eventgraph.cli", "replay", "-i", str(trace), "-o", os.devnull],
                env=env, capture_output=True, text=True, check=True,
            )
            m = json.loads(proc.stderr.strip().splitlines()[-1])
            rows.append({"backend": m["backend"], "requested": label,
                         "messages": m["messages"], "messages_per_sec": m["messages_per_sec"]})
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quanta", type=int, default=60)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--json", action="store_true", help="print one JSON document instead of tables")
    args = ap.parse_args()

    kern = bench_kernels(args.repeat, args.seed)
    replay = bench_replay(args.quanta, args.seed)
    if args.json:
        print(json.dumps({"kernels": kern, "replay": replay}, indent=2))
        return 0
    if _compiled is None:
        print("compiled extension not built; showing pure-Python timings only")
    print(f"{'kernel':28s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}")
    for r in kern:
        c = f"{r['compiled_ms']:12.3f}" if "compiled_ms" in r else f"{'-':>12s}"
        s = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'-':>8s}"
        print(f"{r['kernel']:28s} {r['python_ms']:10.3f} {c} {s}")
    print()
    for r in replay:
        print(f"replay backend={r['backend']:8s} {r['messages']} msgs  {r['messages_per_sec']:.0f} msgs/sec")
    return 0


if __name__ == "__main__":
    sys.exit(main())
