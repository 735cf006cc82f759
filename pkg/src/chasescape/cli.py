"""Command-line driver: simulate, estimate, exact, verify.

Exit codes: 0 on success, 1 when verification reports a failure, 2 on usage
or parameter errors.  Values supplied through ``--config`` take precedence
over the corresponding command-line flags.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from .analytics import exact_distribution_W
from .chain import record_trajectory
from .harness import (
    Engine,
    Estimator,
    ExperimentConfig,
    canonical_json,
    params_as_dict,
    run_experiment,
    write_trajectory_csv,
)
from .params import InitMode, ParameterError, Params
from .rng import make_rng, stream_seed

_CONFIG_KEYS = {
    "n", "lambda", "alpha", "init", "engine", "trials", "seed",
    "parallelism", "estimator", "graph_file",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chasescape",
        description="Chase-escape with conversion: simulators, exact oracles, Monte Carlo harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, default=100, help="white-site budget")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="red spread rate")
        p.add_argument("--alpha", type=float, default=1.0, help="conversion rate")
        p.add_argument(
            "--init",
            choices=[m.value for m in InitMode],
            default=InitMode.STANDARD.value,
            help="initial condition mode",
        )

    sim = sub.add_parser("simulate", help="emit one trajectory as CSV (or JSON)")
    add_model_flags(sim)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--trials", type=int, default=1, help="must be 1 for simulate")
    sim.add_argument("--output", default=None, help="output path (default: stdout)")
    sim.add_argument("--format", choices=["csv", "json"], default="csv")

    est = sub.add_parser("estimate", help="Monte Carlo estimate with CI as JSON")
    add_model_flags(est)
    est.add_argument("--engine", choices=[e.value for e in Engine], default=Engine.CHAIN.value)
    est.add_argument(
        "--estimator", choices=[e.value for e in Estimator], default=Estimator.EXPECTED_W.value
    )
    est.add_argument("--trials", type=int, default=1000)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--parallelism", type=int, default=1)
    est.add_argument("--graph-file", dest="graph_file", default=None, help="edge list for the graph engine")
    est.add_argument("--config", default=None, help="JSON config; its values override flags")
    est.add_argument("--output", default=None)

    exact = sub.add_parser("exact", help="exact white-survivor distribution as JSON")
    add_model_flags(exact)
    exact.add_argument("--output", default=None)

    ver = sub.add_parser("verify", help="run the built-in verification suite")
    ver.add_argument("--level", choices=["fast", "full"], default="fast")
    ver.add_argument("--output", default=None)
    return parser


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _params_from_args(args: argparse.Namespace) -> Params:
    return Params(n=args.n, lam=args.lam, alpha=args.alpha, init_mode=InitMode(args.init))


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.trials != 1:
        raise ParameterError("simulate runs a single trajectory; use estimate for many trials")
    params = _params_from_args(args)
    trajectory = record_trajectory(params, make_rng(stream_seed(args.seed, 0)))
    if args.format == "csv":
        buf = io.StringIO()
        write_trajectory_csv(trajectory, buf)
        _write_output(buf.getvalue(), args.output)
    else:
        rows = [
            {
                "jump_index": i,
                "time": rec.time,
                "r": rec.state.r,
                "b": rec.state.b,
                "w": rec.state.w,
                "event": rec.event.value,
            }
            for i, rec in enumerate(trajectory.records, start=1)
        ]
        _write_output(canonical_json({"params": params_as_dict(params), "jumps": rows}), args.output)
    return 0


def _apply_config_file(args: argparse.Namespace) -> None:
    with open(args.config, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    if not isinstance(overrides, dict):
        raise ParameterError("config file must hold a JSON object")
    unknown = set(overrides) - _CONFIG_KEYS
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    mapping = {"lambda": "lam"}
    for key, value in overrides.items():
        setattr(args, mapping.get(key, key), value)


def _cmd_estimate(args: argparse.Namespace) -> int:
    if args.config is not None:
        _apply_config_file(args)
    config = ExperimentConfig(
        params=_params_from_args(args),
        trials=args.trials,
        seed=args.seed,
        estimator=Estimator(args.estimator),
        engine=Engine(args.engine),
        parallelism=args.parallelism,
        graph_file=args.graph_file,
    )
    summary = run_experiment(config)
    _write_output(summary.to_json(), args.output)
    return 0


def _cmd_exact(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    dist = exact_distribution_W(params.n, params.lam, params.alpha, params.init_mode)
    payload = {
        "params": params_as_dict(params),
        "distribution": dist.probabilities.tolist(),
        "expected_w": dist.expected_w,
        "expected_c": dist.expected_c,
        "extinction_probability": dist.extinction_probability,
    }
    _write_output(canonical_json(payload), args.output)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    from .verify import format_report, run_verification

    report = run_verification(args.level)
    _write_output(format_report(report), args.output)
    return 0 if report["passed"] else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "estimate": _cmd_estimate,
        "exact": _cmd_exact,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (ParameterError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
