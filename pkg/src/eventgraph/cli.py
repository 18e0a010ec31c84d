"""Command line: replay, baseline, gen-trace, eval."""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from typing import Sequence

from . import kernels
from .evaluate import eval_pr, load_events, load_labels
from .ingest import ParseError, batch_quanta, batch_quanta_by_time, load_stopwords, read_messages
from .pipeline import Detector, RunMetrics
from .ranking import EventRecord
from .tracegen import TraceSpec, TraceSpecError, dump_labels, dump_trace, gen_trace
from .window import ConfigError, EngineConfig

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

# flag dest -> config-file key
_CONFIG_KEYS = {
    "quantum": "quantum",
    "window": "window",
    "gamma": "gamma",
    "lam": "lambda",
    "minhash_p": "minhash_p",
    "tau": "tau",
    "seed": "seed",
    "stopwords": "stopwords",
    "mode": "mode",
    "quantum_mode": "quantum_mode",
    "input": "input",
    "output": "output",
}

_DEFAULTS = {
    "quantum": 160,
    "window": 30,
    "gamma": 4,
    "lam": 0.20,
    "minhash_p": None,
    "tau": 1.0,
    "seed": 0,
    "stopwords": None,
    "mode": "scp",
    "quantum_mode": "count",
    "input": None,
    "output": None,
}


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _engine_flags(p: argparse.ArgumentParser, with_mode: bool) -> None:
    # defaults are None so that a config file value is only overridden by an explicit flag
    p.add_argument("--config", help="JSON config file; explicit flags win")
    p.add_argument("--input", "-i", help="message trace, JSON lines (default stdin)")
    p.add_argument("--output", "-o", help="event stream destination (default stdout)")
    p.add_argument("--quantum", type=int, help="messages per quantum (ms in time mode), default 160")
    p.add_argument("--quantum-mode", choices=["count", "time"])
    p.add_argument("--window", type=int, help="window length in quanta, default 30")
    p.add_argument("--gamma", type=int, help="burst threshold in distinct users per quantum, default 4")
    p.add_argument("--lambda", dest="lam", type=float, help="edge correlation threshold, default 0.20")
    p.add_argument("--minhash-p", type=int, help="bottom-p sketch size (default derived from gamma, lambda)")
    p.add_argument("--tau", type=float, help="report threshold scale, default 1.0")
    p.add_argument("--seed", type=int, help="user-id hash seed, default 0")
    p.add_argument("--stopwords", help="newline-delimited stop-word file")
    if with_mode:
        p.add_argument("--mode", choices=["scp", "bc"])


def _resolve(args: argparse.Namespace) -> dict:
    file_cfg: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_CONFIG, f"config is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise CliError(EXIT_CONFIG, "config must be a JSON object")
        unknown = set(file_cfg) - set(_CONFIG_KEYS.values())
        if unknown:
            raise CliError(EXIT_CONFIG, f"unknown config keys: {sorted(unknown)}")
    out = {}
    for dest, key in _CONFIG_KEYS.items():
        flag = getattr(args, dest, None)
        if flag is not None:
            out[dest] = flag
        elif key in file_cfg:
            out[dest] = file_cfg[key]
        else:
            out[dest] = _DEFAULTS[dest]
    return out


def build_config(opts: dict) -> EngineConfig:
    try:
        return EngineConfig(
            quantum=int(opts["quantum"]),
            window=int(opts["window"]),
            gamma=int(opts["gamma"]),
            lam=float(opts["lam"]),
            p=None if opts["minhash_p"] is None else int(opts["minhash_p"]),
            tau=float(opts["tau"]),
            hash_seed=int(opts["seed"]),
            quantum_mode=str(opts["quantum_mode"]),
        )
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"invalid configuration: {exc}") from exc


def _read_text(path: str | None) -> list[str]:
    if path is None or path == "-":
        return sys.stdin.read().splitlines()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def replay_lines(
    lines: Sequence[str],
    config: EngineConfig,
    mode: str = "scp",
    stopwords=None,
) -> tuple[list[EventRecord], RunMetrics]:
    """Run the detector over in-memory trace lines; timing covers parsing and processing."""
    det = Detector(config, mode=mode)
    errors: list[ParseError] = []
    t0 = time.perf_counter()
    kwargs = {} if stopwords is None else {"stopwords": stopwords}
    msgs = read_messages(lines, errors=errors, **kwargs)
    if config.quantum_mode == "time":
        batches = batch_quanta_by_time(msgs, config.quantum)
    else:
        batches = batch_quanta(msgs, config.quantum)
    records = det.run(batches)
    metrics = det.finalize()
    metrics.elapsed_s = time.perf_counter() - t0
    metrics.parse_errors = len(errors)
    metrics.backend = kernels.BACKEND
    return records, metrics


def run_replay(opts: dict, mode: str) -> RunMetrics:
    config = build_config(opts)
    if mode not in ("scp", "bc"):
        raise CliError(EXIT_CONFIG, f"unknown mode {mode!r}")
    try:
        stop = load_stopwords(opts["stopwords"]) if opts["stopwords"] else None
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read stopwords: {exc}") from exc
    lines = _read_text(opts["input"])
    records, metrics = replay_lines(lines, config, mode, stop)
    _write_text(opts["output"], "".join(r.to_json() + "\n" for r in records))
    return metrics


def _cmd_replay(args: argparse.Namespace) -> int:
    opts = _resolve(args)
    metrics = run_replay(opts, opts["mode"])
    print(json.dumps(metrics.as_dict(), sort_keys=True), file=sys.stderr)
    return EXIT_OK


def _cmd_baseline(args: argparse.Namespace) -> int:
    opts = _resolve(args)
    metrics = run_replay(opts, "bc")
    print(json.dumps(metrics.as_dict(), sort_keys=True), file=sys.stderr)
    return EXIT_OK


def _cmd_gen_trace(args: argparse.Namespace) -> int:
    raw = _read_text(args.spec)
    try:
        spec = TraceSpec.from_dict(json.loads("\n".join(raw)))
    except (json.JSONDecodeError, TraceSpecError) as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from exc
    _write_text(args.output, dump_trace(gen_trace(spec, args.seed)))
    if args.labels:
        _write_text(args.labels, dump_labels(spec))
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    events_lines = _read_text(args.events)
    labels_lines = _read_text(args.labels)
    try:
        events = load_events(events_lines)
        labels = load_labels(labels_lines)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"malformed events or labels: {exc}") from exc
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = eval_pr(events, labels)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print(json.dumps(res.as_dict(), sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eventgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay", help="run the detector over a message trace")
    _engine_flags(p, with_mode=True)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("baseline", help="same as replay --mode bc")
    _engine_flags(p, with_mode=False)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("gen-trace", help="generate a synthetic trace from a JSON description")
    p.add_argument("spec", help="trace description JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="trace destination (default stdout)")
    p.add_argument("--labels", help="write ground-truth labels (JSON lines) here")
    p.set_defaults(func=_cmd_gen_trace)

    p = sub.add_parser("eval", help="precision/recall of an event stream against labels")
    p.add_argument("events")
    p.add_argument("labels")
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"eventgraph: {err}", file=sys.stderr)
        return err.code
    except ConfigError as err:
        print(f"eventgraph: invalid configuration: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
