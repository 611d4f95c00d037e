"""Command-line entry point for reproducible experiments.

Subcommands: bounds, solve-threshold, simulate, oracle, hard,
transform, validate-decay.  All file IO is UTF-8 JSON/CSV; identical
arguments and seed produce byte-identical outputs.  Exit codes: 0
success, 2 argument/validation error, 3 resource guard, 1 internal
error.  The default seed is 0xC0FFEE; the environment variable
PROPHET_SEED overrides it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import evaluation, instances, policies, theory
from .decay import DecaySequence, gamma_of, validate as validate_decay_seq
from .distributions import Instance, solve_max_quantile
from .errors import InstanceTooLarge, LookbackError, SpaceTooLarge

DEFAULT_SEED = 0xC0FFEE

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _default_seed() -> int:
    env = os.environ.get("PROPHET_SEED")
    return int(env, 0) if env else DEFAULT_SEED


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_spec(spec: str) -> dict:
    """Inline JSON, or @path to a JSON file."""
    text = _read_text(spec[1:]) if spec.startswith("@") else spec
    return json.loads(text)


def _load_instance(path: str) -> Instance:
    return Instance.from_json(_read_text(path))


def _cmd_bounds(args) -> int:
    if args.gamma is not None:
        grid = [args.gamma]
    else:
        grid = theory.default_gamma_grid(args.grid)
    curves = theory.bound_table(grid)
    _write_text(args.out, theory.bound_table_csv(curves))
    return EXIT_OK


def _cmd_solve_threshold(args) -> int:
    inst = _load_instance(args.instance)
    if args.p is not None:
        target_inst, p = inst, args.p
    else:
        if args.model is None or args.gamma is None:
            raise LookbackError("need either --p or both --model and --gamma")
        g = args.gamma
        if args.model == "adv":
            target_inst, p = inst, theory.adversarial_bound(g)  # 1/(2-gamma)
        elif args.model == "ro":
            target_inst, p = inst, theory.solve_p_gamma(g).value
        else:  # iid: per-item tail Pr(X > theta) = a/n
            if inst.order != "iid":
                raise LookbackError("--model iid needs an iid instance")
            a = theory.solve_a_n_gamma(inst.n, g).value
            target_inst = Instance(order="adversarial", distributions=inst.distributions)
            p = 1.0 - a / inst.n
    sol = solve_max_quantile(target_inst, p)
    print(f"theta {sol.theta:.15g}")
    print(f"tie_break_accept_prob {sol.tie_break_accept_prob:.15g}")
    print(f"achieved_p {sol.achieved_p:.15g}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    inst = _load_instance(args.instance)
    decay = DecaySequence.from_dict(_load_spec(args.decay))
    policy = policies.policy_from_dict(_load_spec(args.policy), inst)
    report = evaluation.monte_carlo(inst, policy, decay, args.reps, args.seed, args.workers)
    g = gamma_of(decay)[0]
    lower, upper = evaluation.theory_bounds_for_order(inst.order, g)
    rows = [{"gamma": g, "report": report, "theory_lower": lower, "theory_upper": upper}]
    _write_text(args.out, evaluation.report_csv_rows(rows))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    decay = DecaySequence.from_dict(_load_spec(args.decay))
    policy = policies.policy_from_dict(_load_spec(args.policy), inst)
    value = evaluation.brute_force_value(inst, policy, decay)
    print(f"{value:.15g}")
    return EXIT_OK


def _cmd_hard(args) -> int:
    if args.family == "adv":
        if args.gamma is None:
            raise LookbackError("hard --family adv needs --gamma")
        inst = instances.adv_hard(args.gamma, args.eps)
    elif args.family == "ro":
        if args.n is None:
            raise LookbackError("hard --family ro needs --n")
        a = args.a if args.a is not None else instances.random_order_hard_a(args.gamma or 0.0)
        inst = instances.random_order_hard(args.n, a)
    else:
        if args.n is None:
            raise LookbackError("hard --family iid needs --n")
        if args.x is not None and args.a is not None:
            x, a = args.x, args.a
        elif args.gamma is not None:
            x, a = instances.iid_hard_params(args.gamma)
        else:
            raise LookbackError("hard --family iid needs --x and --a, or --gamma")
        inst = instances.iid_hard(args.n, x, a)
    _write_text(args.out, inst.to_json() + "\n")
    return EXIT_OK


def _cmd_transform(args) -> int:
    inst = _load_instance(args.input)
    if args.kind == "pad-adv":
        out = instances.zero_pad_adversarial(inst, _require(args.m, "--m"))
    elif args.kind == "pad-ro":
        out = instances.zero_pad_random(inst, _require(args.m, "--m"))
    elif args.kind == "dilute":
        if inst.order != "iid":
            raise LookbackError("dilute needs an iid instance")
        out = instances.dilute_iid(inst.distributions[0], inst.n, _require(args.m, "--m"))
    else:
        out = instances.rescale(inst, _require(args.r, "--r"))
    _write_text(args.out, out.to_json() + "\n")
    return EXIT_OK


def _require(value, name):
    if value is None:
        raise LookbackError(f"missing required option {name}")
    return value


def _cmd_validate_decay(args) -> int:
    seq = DecaySequence.from_dict(_load_spec(args.decay))
    grid = [float(x) for x in args.grid.split(",")] if args.grid else [0.0, 0.5, 1.0, 2.0, 10.0, 100.0]
    report = validate_decay_seq(seq, grid, args.max_lag)
    if report.passed:
        print("passed")
        return EXIT_OK
    print(f"failed: {len(report.violations)} violation(s)")
    for v in report.violations:
        print(f"  {v}")
    return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lookback-prophet",
        description="Stopping policies with decaying recall: bounds, thresholds, "
        "hard instances, exact oracles and seeded simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="emit the seven-curve bound table as CSV")
    p.add_argument("--grid", type=int, default=101, help="number of gamma grid points")
    p.add_argument("--gamma", type=float, default=None, help="single gamma row instead of a grid")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("solve-threshold", help="threshold and tie-break for a target quantile")
    p.add_argument("instance", help="instance JSON path")
    p.add_argument("--p", type=float, default=None, help="explicit never-accept probability")
    p.add_argument("--model", choices=("adv", "ro", "iid"), default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=_cmd_solve_threshold)

    p = sub.add_parser("simulate", help="seeded Monte Carlo report as CSV")
    p.add_argument("instance", help="instance JSON path")
    p.add_argument("--policy", required=True, help="policy JSON (inline or @file)")
    p.add_argument("--decay", required=True, help="decay JSON (inline or @file)")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=_default_seed())
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("oracle", help="exact expected reward by total enumeration")
    p.add_argument("instance", help="instance JSON path")
    p.add_argument("--policy", required=True)
    p.add_argument("--decay", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("hard", help="emit a hard instance as JSON")
    p.add_argument("--family", choices=("adv", "ro", "iid"), required=True)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_hard)

    p = sub.add_parser("transform", help="pad, dilute or rescale an instance")
    p.add_argument("kind", choices=("pad-adv", "pad-ro", "dilute", "rescale"))
    p.add_argument("--m", type=int, default=None, help="padding count / dilution length")
    p.add_argument("--r", type=float, default=None, help="rescale factor")
    p.add_argument("--in", dest="input", required=True, help="input instance JSON path")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("validate-decay", help="check the decay-sequence conditions")
    p.add_argument("decay", help="decay JSON (inline or @file)")
    p.add_argument("--grid", default=None, help="comma-separated x grid")
    p.add_argument("--max-lag", type=int, default=8)
    p.set_defaults(func=_cmd_validate_decay)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (SpaceTooLarge, InstanceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (LookbackError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
