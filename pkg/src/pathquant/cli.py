"""Command-line batch runner.

    pathquant run CONFIG.json [--check] [--jobs K] [--out DIR]
    pathquant list
    pathquant schema

Exit codes: 0 success, 2 invalid configuration or arguments, 3 a tolerance
check failed under ``--check``.  The output directory comes from ``--out``,
then ``$PATHQUANT_OUTPUT_DIR``, then the config's ``output_dir``, then
``./pathquant-results``; nothing else is read from the environment.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from .experiments import REGISTRY, derive_seed

SCHEMA_VERSION = 1
OUTPUT_ENV = "PATHQUANT_OUTPUT_DIR"
DEFAULT_OUTPUT = "pathquant-results"
EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE = 0, 2, 3

TOP_FIELDS = {"schema_version": int, "seed": int, "output_dir": str, "experiments": list}
ENTRY_FIELDS = {"name": str, "params": dict}


class ConfigError(ValueError):
    pass


def _type_ok(value, expected):
    """JSON-level type match; ``bool`` is not an ``int`` and ints count as floats."""
    if isinstance(expected, bool):
        return isinstance(value, bool)
    if isinstance(expected, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(expected, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(expected, str):
        return isinstance(value, str)
    if isinstance(expected, list):
        return isinstance(value, list)
    if expected is None:
        return True
    return isinstance(value, type(expected))


def validate(config):
    """Return ``(seed, output_dir_or_None, [(name, params), ...])`` or raise ConfigError."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(config) - set(TOP_FIELDS)
    if unknown:
        raise ConfigError(f"unknown top-level field(s): {sorted(unknown)}")
    for key in ("schema_version", "seed", "experiments"):
        if key not in config:
            raise ConfigError(f"missing required field {key!r}")
    for key, typ in TOP_FIELDS.items():
        if key in config and not (isinstance(config[key], typ) and not isinstance(config[key], bool)):
            raise ConfigError(f"field {key!r} must be {typ.__name__}")
    if config["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {config['schema_version']}; expected {SCHEMA_VERSION}")
    if config["seed"] < 0:
        raise ConfigError("seed must be non-negative")
    entries, seen = [], set()
    for k, entry in enumerate(config["experiments"]):
        if not isinstance(entry, dict):
            raise ConfigError(f"experiments[{k}] must be an object")
        bad = set(entry) - set(ENTRY_FIELDS)
        if bad:
            raise ConfigError(f"experiments[{k}]: unknown field(s) {sorted(bad)}")
        name = entry.get("name")
        if name not in REGISTRY:
            raise ConfigError(f"experiments[{k}]: unknown experiment {name!r}")
        if name in seen:
            raise ConfigError(f"experiment {name!r} listed twice")
        seen.add(name)
        params = entry.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError(f"experiments[{k}].params must be an object")
        defaults = REGISTRY[name].defaults
        for key, value in params.items():
            if key not in defaults:
                raise ConfigError(f"{name}: unknown parameter {key!r}; allowed {sorted(defaults)}")
            if not _type_ok(value, defaults[key]):
                raise ConfigError(f"{name}: parameter {key!r} has the wrong type")
        entries.append((name, params))
    return config["seed"], config.get("output_dir"), entries


def schema():
    return {
        "schema_version": SCHEMA_VERSION,
        "fields": {"schema_version": "int (required)", "seed": "int >= 0 (required)",
                   "output_dir": "str (optional)",
                   "experiments": "list of {name: str, params: object (optional)} (required)"},
        "experiments": {name: {"description": e.description, "params": e.defaults}
                        for name, e in REGISTRY.items()},
    }


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) or type(value).__module__ == "numpy":
        return repr(float(value))
    return str(value)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_format(v) for v in row])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    try:
        f = float(x)
    except (TypeError, ValueError):
        return str(x)
    return f if f == f and abs(f) != float("inf") else str(f)


def run_one(name, params, seed, out_dir):
    """Run one experiment, write its files, return a short status dict."""
    exp = REGISTRY[name]
    derived = derive_seed(seed, name)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    result = exp.run(params, derived)
    elapsed = time.perf_counter() - t0
    target = Path(out_dir) / name
    target.mkdir(parents=True, exist_ok=True)
    files = []
    for table, (header, rows) in result.tables.items():
        path = target / f"{table}.csv"
        path.write_text(_csv_text(header, rows), encoding="utf-8")
        files.append(path.name)
    merged = dict(exp.defaults)
    merged.update(params)
    summary = {
        "experiment": name,
        "params": _jsonable(merged),
        "seed": seed,
        "derived_seed": derived,
        "passed": result.passed,
        "checks": [c.to_json() for c in result.checks],
        "metadata": _jsonable({k: v for k, v in result.metadata.items() if k != "runtime_s"}),
        "tables": sorted(files),
    }
    (target / "summary.json").write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    (target / "run.json").write_text(json.dumps({"started": started, "runtime_s": elapsed}, indent=2) + "\n",
                                     encoding="utf-8")
    return {"name": name, "passed": result.passed,
            "failed": [c.name for c in result.checks if not c.passed]}


def _output_dir(args, config_dir):
    if args.out:
        return Path(args.out)
    if os.environ.get(OUTPUT_ENV):
        return Path(os.environ[OUTPUT_ENV])
    if config_dir:
        return Path(config_dir)
    return Path(DEFAULT_OUTPUT)


def _run(args):
    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        seed, config_dir, entries = validate(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    if not entries:
        print("no experiments configured")
        return EXIT_OK
    out = _output_dir(args, config_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.jobs == 1:
        statuses = [run_one(n, p, seed, out) for n, p in entries]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(run_one, n, p, seed, out) for n, p in entries]
            statuses = [f.result() for f in futures]
    for s in statuses:
        line = "PASS" if s["passed"] else "FAIL " + ", ".join(s["failed"])
        print(f"{s['name']}: {line}")
    if args.check and not all(s["passed"] for s in statuses):
        return EXIT_TOLERANCE
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser():
    parser = _Parser(prog="pathquant", description="Run phase-space quantization experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run the experiments listed in a JSON config")
    run.add_argument("config")
    run.add_argument("--check", action="store_true", help="exit 3 if any tolerance check fails")
    run.add_argument("--jobs", type=int, default=1, help="experiments to run in parallel")
    run.add_argument("--out", help="output directory (overrides environment and config)")
    sub.add_parser("list", help="list registered experiments")
    sub.add_parser("schema", help="print the config schema with parameter defaults")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for name, e in REGISTRY.items():
            print(f"{name}: {e.description}")
        return EXIT_OK
    if args.command == "schema":
        print(json.dumps(_jsonable(schema()), indent=2))
        return EXIT_OK
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
