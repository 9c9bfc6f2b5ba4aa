"""Command-line entry point.

``perceptronium <experiment> [--flags]`` and ``perceptronium run <experiment> [--flags]``
run one experiment; ``verify`` and ``golden`` manage regression files.
Exit status: 0 ok, 1 configuration error, 2 numerical error or golden mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._validation import ConfigError, PerceptroniumError, ShapeError
from .experiments import EXPERIMENTS, ExperimentConfig, _schema, run, verify, write_goldens, write_result

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _list_of(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _add_param_flags(parser, name):
    props = _schema(name)["properties"]["params"]["properties"]
    for key, spec in props.items():
        flag = "--" + key.replace("_", "-")
        kw = {"dest": f"param_{key}", "default": None}
        t = spec.get("type")
        if t == "integer":
            kw["type"] = int
        elif t == "number":
            kw["type"] = float
        elif t == "array":
            item = spec.get("items", {}).get("type")
            kw["type"] = _list_of(int if item == "integer" else float)
            kw["metavar"] = "A,B,..."
        else:
            kw["type"] = str
            if "enum" in spec:
                kw["choices"] = spec["enum"]
        if "default" in spec:
            kw["help"] = f"default: {spec['default']}"
        parser.add_argument(flag, **kw)


def _add_common(parser):
    parser.add_argument("--config", type=Path, help="JSON config file; flags override its params")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output", "-o", default=None, help="CSV path ('-' for stdout)")


def build_parser():
    p = argparse.ArgumentParser(prog="perceptronium", description="Integrated-information and factorization experiments.")
    p.add_argument("--version", action="version", version=f"perceptronium {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment by name")
    run_sub = run_p.add_subparsers(dest="experiment", required=True)
    for name in sorted(EXPERIMENTS):
        for parent in (sub, run_sub):
            sp = parent.add_parser(name)
            sp.set_defaults(experiment=name, command="experiment")
            _add_common(sp)
            _add_param_flags(sp, name)

    v = sub.add_parser("verify", help="re-run golden configs and compare")
    v.add_argument("golden_dir", type=Path)
    v.add_argument("--tol", type=float, default=None, help="override every column tolerance")
    v.add_argument("--seed", type=int, default=None, help="replace the seed of seeded configs")
    v.add_argument("--report", type=Path, default=None, help="write the JSON report here")

    g = sub.add_parser("golden", help="write bundled golden configs")
    g.add_argument("golden_dir", type=Path)
    g.add_argument("--only", type=_list_of(str), default=None)
    return p


def _config_from_args(args):
    base = {"experiment": args.experiment}
    if args.config is not None:
        try:
            base = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if base.get("experiment", args.experiment) != args.experiment:
            raise ConfigError(f"config is for {base.get('experiment')!r}, not {args.experiment!r}")
        base["experiment"] = args.experiment
    params = dict(base.get("params", {}))
    for key, val in vars(args).items():
        if key.startswith("param_") and val is not None:
            params[key[len("param_"):]] = val
    base["params"] = params
    if args.seed is not None:
        base["seed"] = args.seed
    return ExperimentConfig.from_dict(base)


def _run_experiment(args):
    cfg = _config_from_args(args)
    result = run(cfg)
    out = args.output if args.output is not None else cfg.output_path
    text = write_result(result, cfg, out)
    if not out or out == "-":
        sys.stdout.write(text)
    return EXIT_OK


def _run_verify(args):
    entries = verify(args.golden_dir, tol_override=args.tol, seed_override=args.seed)
    width = max([len(e.experiment) for e in entries] + [10])
    print(f"{'experiment':<{width}}  status  detail")
    for e in entries:
        print(f"{e.experiment:<{width}}  {e.status:<6}  {e.detail}")
    counts = {s: sum(e.status == s for e in entries) for s in ("PASS", "FAIL", "SKIP")}
    print(f"pass={counts['PASS']} fail={counts['FAIL']} skip={counts['SKIP']}"
          + (f" tolerance_override={args.tol:g}" if args.tol is not None else ""))
    if args.report is not None:
        report = {
            "version": __version__,
            "tolerance_override": args.tol,
            "seed_override": args.seed,
            "entries": [vars(e) for e in entries],
            "counts": counts,
        }
        args.report.write_text(json.dumps(report, indent=2) + "\n")
    return EXIT_NUMERIC if counts["FAIL"] else EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "golden":
            for path in write_goldens(args.golden_dir, args.only):
                print(path)
            return EXIT_OK
        return _run_experiment(args)
    except (ConfigError, ShapeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PerceptroniumError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
