"""Command-line interface: optimize, benchmark, compare, validate.

Optimization output is streamed as JSON lines (one complete record per
iteration, flushed immediately), so interrupting a run leaves a parseable
prefix. Seeds default to OS entropy but are always echoed into the output for
reproducibility. Exit codes: 0 success, 1 model violation, 2 usage error.
"""

import argparse
import json
import os
import secrets
import sys

import numpy as np

from .bench.experiments import METHODS, ExperimentSpec, run_experiment
from .bench.registry import build_model, registered_models
from .driver import OptConfig, optimize
from .errors import ModelViolationError
from .modes import validate


def _output_dir():
    return os.environ.get("MARGOPT_OUTPUT_DIR", ".")


def _resolve_path(path):
    if path is None or os.path.isabs(path):
        return path
    return os.path.join(_output_dir(), path)


def _load_model_config(args):
    config = {}
    if getattr(args, "model_config", None):
        with open(args.model_config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    return config


def _add_common(parser):
    parser.add_argument("--model", required=True,
                        help="registered model id or use --model-config")
    parser.add_argument("--model-config", default=None,
                        help="JSON file with model parameters (data seed, T, ...)")
    parser.add_argument("--seed", type=int, default=None,
                        help="rng seed (default: OS entropy, echoed in output)")
    parser.add_argument("--output", default=None,
                        help="output file (default: stdout / derived name)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="margopt",
        description="Evidence maximization for generative models")
    sub = parser.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="run the optimization loop")
    _add_common(opt)
    opt.add_argument("--iters", type=int, default=50)
    opt.add_argument("--particles", type=int, default=100)
    opt.add_argument("--init", type=int, default=5)
    opt.add_argument("--format", choices=("json", "csv"), default="json")
    opt.add_argument("-v", "--verbose", action="count", default=0)

    ben = sub.add_parser("benchmark", help="optimize a named benchmark model")
    _add_common(ben)
    ben.add_argument("--iters", type=int, default=50)
    ben.add_argument("--particles", type=int, default=1)
    ben.add_argument("--init", type=int, default=5)
    ben.add_argument("--format", choices=("json", "csv"), default="json")
    ben.add_argument("-v", "--verbose", action="count", default=0)

    cmp_ = sub.add_parser("compare", help="compare methods with equal budgets")
    _add_common(cmp_)
    cmp_.add_argument("--methods", default="bo,pmmh-lmh",
                      help=f"comma-separated subset of {METHODS}")
    cmp_.add_argument("--budget", type=int, default=50,
                      help="evidence evaluations per run")
    cmp_.add_argument("--particles", type=int, default=200)
    cmp_.add_argument("--runs", type=int, default=10)
    cmp_.add_argument("--jobs", type=int, default=1)

    val = sub.add_parser("validate", help="check a model's variable contract")
    _add_common(val)
    val.add_argument("--probes", type=int, default=50)
    return parser


def _open_sink(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _cmd_optimize(args):
    seed = args.seed if args.seed is not None else secrets.randbits(32)
    try:
        built = build_model(args.model, _load_model_config(args))
    except KeyError as err:
        print(str(err), file=sys.stderr)
        return 2
    cfg = OptConfig(n_init=args.init, n_particles=args.particles,
                    max_iterations=args.iters, seed=seed)
    sink, close = _open_sink(_resolve_path(args.output))
    try:
        steps = optimize(built.model, cfg)
    except ModelViolationError as err:
        print(json.dumps({"error": "model-violation",
                          "report": err.report.to_dict() if err.report else str(err)}),
              file=sys.stderr)
        if close:
            sink.close()
        return 1
    try:
        if args.format == "csv":
            sink.write("m,u_star,log_z_next,theta_star_json,theta_next_json,"
                       "seed,wall_ms\n")
            sink.flush()
        for step in steps:
            record = step.to_dict()
            record["seed"] = seed
            if args.format == "json":
                sink.write(json.dumps(record, sort_keys=True) + "\n")
            else:
                sink.write(f'{record["m"]},{record["u_star"]!r},'
                           f'{record["log_z_next"]!r},'
                           f'"{json.dumps(record["theta_star"])}",'
                           f'"{json.dumps(record["theta_next"])}",'
                           f'{seed},{record["wall_ms"]}\n')
            sink.flush()
            if args.verbose:
                print(f"[{step.m}] u*={step.u_star:.4f} "
                      f"log_z={step.log_z_next:.4f}", file=sys.stderr)
    finally:
        if close:
            sink.close()
    return 0


def _cmd_compare(args):
    seed = args.seed if args.seed is not None else secrets.randbits(32)
    output = _resolve_path(args.output) or os.path.join(
        _output_dir(), f"compare_{args.model}.csv")
    try:
        spec = ExperimentSpec(model_id=args.model,
                              methods=tuple(args.methods.split(",")),
                              budget=args.budget, n_particles=args.particles,
                              runs=args.runs, seed=seed,
                              model_config=_load_model_config(args),
                              output_path=output, n_jobs=args.jobs)
        build_model(args.model, spec.model_config)
    except KeyError as err:
        print(str(err), file=sys.stderr)
        return 2
    table = run_experiment(spec)
    print(f"wrote {len(table.rows)} rows to {output} (seed {seed})")
    return 0


def _cmd_validate(args):
    seed = args.seed if args.seed is not None else secrets.randbits(32)
    try:
        built = build_model(args.model, _load_model_config(args))
    except KeyError as err:
        print(str(err), file=sys.stderr)
        return 2
    report = validate(built.model, probe_budget=args.probes,
                      rng=np.random.default_rng(seed))
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0 if report.ok else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("optimize", "benchmark"):
        return _cmd_optimize(args)
    if args.command == "compare":
        return _cmd_compare(args)
    if args.command == "validate":
        return _cmd_validate(args)
    parser.error(f"unknown command {args.command}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
