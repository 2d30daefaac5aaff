"""``germflow`` command line."""

import argparse
import json
import logging
import sys

from . import config as cfgmod
from .runner import ConfigError, NumericFailure, run

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh), None
    except OSError as exc:
        return None, [f"<file>: cannot read {path}: {exc.strerror}"]
    except json.JSONDecodeError as exc:
        return None, [f"<file>: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]


def _report(errors):
    for e in errors:
        print(f"error: {e}", file=sys.stderr)


def cmd_run(args):
    cfg, errors = _load(args.config)
    if errors:
        _report(errors)
        return EXIT_INVALID
    if args.plots:
        cfg = dict(cfg)
        out = dict(cfg.get("output", {}))
        fmts = list(out.get("formats", ["csv", "json"]))
        if "png" not in fmts:
            fmts.append("png")
        out["formats"] = fmts
        cfg["output"] = out
    try:
        manifest = run(cfg, jobs=args.jobs, out=args.out)
    except ConfigError as exc:
        _report(exc.errors)
        return EXIT_INVALID
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for study, files in manifest["outputs"].items():
        for f in files:
            print(f)
    return EXIT_OK


def cmd_validate(args):
    cfg, errors = _load(args.config)
    if errors is None:
        errors = cfgmod.validate(cfg)
    if errors:
        _report(errors)
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


def cmd_schema(args):
    print(json.dumps(cfgmod.SCHEMA, indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="germflow", description="Classical-limit diagnostics for coherent-state germs and mean-field models.")
    p.add_argument("-v", "--verbose", action="store_true", help="log stage timings")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario config")
    r.add_argument("config")
    r.add_argument("--jobs", type=int, default=1, help="worker processes for schedule entries")
    r.add_argument("--out", default=None, help="output directory (overrides GERMFLOW_OUT and the config)")
    r.add_argument("--plots", action="store_true", help="also render PNG figures")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="check a config without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("schema", help="print the config JSON schema")
    s.set_defaults(func=cmd_schema)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
