"""Reproducible command-line pipeline: oracle, train, eval, report.

Every subcommand writes a run manifest into its output directory before
any results, consults no environment variables, and is idempotent for
identical inputs and seeds. Exit codes: 0 success, 2 user/input error,
3 success with an approximation flag (cap-bound oracle front).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, agents, harness, oracle
from .fronts import ParetoFront
from .lavagrid import DEFAULT_GAMMA, DEFAULT_MAX_STEPS, LavaGridContext, builtin_context
from .stats import GENERATOR_ID

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_APPROXIMATE = 3


class InputError(Exception):
    """User or input-file error; maps to exit code 2."""


def _write_manifest(out_dir: Path, subcommand: str, config_path, base_seed, **extra) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "subcommand": subcommand,
        "config": str(config_path) if config_path else None,
        "out": str(out_dir),
        "base_seed": base_seed,
        "software_version": __version__,
        "rng_generator": GENERATOR_ID,
        **extra,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _load_json(path: Path):
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _resolve_context(spec: str) -> LavaGridContext:
    try:
        return builtin_context(spec)
    except KeyError:
        pass
    path = Path(spec)
    if not path.exists():
        raise InputError(f"{spec!r} is neither a builtin context nor an existing file")
    obj = _load_json(path)
    try:
        ctx = LavaGridContext.from_json_obj(obj)
        ctx.validate(require_all_goals=False)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    return ctx


def _load_config(path_str: str) -> tuple[harness.EvalConfig, Path]:
    path = Path(path_str)
    obj = _load_json(path)
    try:
        return harness.EvalConfig.from_json_obj(obj), path
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_oracle(args) -> int:
    ctx = _resolve_context(args.context)
    out_dir = Path(args.out)
    _write_manifest(out_dir, "oracle", None, args.seed, context=ctx.to_json_obj())
    try:
        result = oracle.pareto_backward_induction(
            ctx, args.gamma, args.horizon, cap=args.cap
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    result.front.to_csv(out_dir / "front.csv")
    sidecar = {
        "exact": result.exact,
        "epsilon": result.epsilon,
        "gamma": args.gamma,
        "horizon": args.horizon,
        "cap": args.cap,
        "context": ctx.to_json_obj(),
        "witnesses": {
            ",".join(repr(float(x)) for x in point): wit
            for point, wit in zip(result.front.points, result.front.tags)
        },
    }
    with open(out_dir / "witnesses.json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")
    status = "exact" if result.exact else f"approximate (epsilon={result.epsilon:g})"
    print(f"oracle front: {len(result.front)} points, {status}")
    return EXIT_OK if result.exact else EXIT_APPROXIMATE


def cmd_train(args) -> int:
    config, config_path = _load_config(args.config)
    out_dir = Path(args.out)
    if args.seed is not None:
        config.seeds = [args.seed]
    _write_manifest(out_dir, "train", config_path, config.seeds[0])
    grid = config.weight_grid()
    modes = args.mode
    for seed in config.seeds:
        if "generalist" in modes:
            q = agents.train_scalarized_q(
                context_source=config.dr_space(),
                weight_grid=grid,
                episodes=config.train_episodes,
                gamma=config.gamma,
                stream=harness.RandomStream(seed, (harness._TRAIN,)),
                alpha=config.alpha,
                max_steps=config.max_steps,
            )
            q.save(out_dir / f"generalist_seed{seed}.json")
        if "specialists" in modes:
            for idx, (name, ctx) in enumerate(config.contexts):
                q = agents.train_scalarized_q(
                    context_source=ctx,
                    weight_grid=grid,
                    episodes=config.train_episodes,
                    gamma=config.gamma,
                    stream=harness.RandomStream(seed, (harness._SPECIALIST, idx)),
                    alpha=config.alpha,
                    max_steps=config.max_steps,
                )
                q.save(out_dir / f"specialist_seed{seed}_{name}.json")
    print(f"trained {', '.join(modes)} for seeds {config.seeds}")
    return EXIT_OK


def _snapshot_fronts(config, snapshot_dir: Path, kind: str):
    """front_for_cell closure over trained snapshots, or raise InputError."""
    grid = config.weight_grid()

    def front_for_cell(seed, idx, name, ctx):
        if kind == "generalist":
            path = snapshot_dir / f"generalist_seed{seed}.json"
        else:
            path = snapshot_dir / f"specialist_seed{seed}_{name}.json"
        if not path.exists():
            raise InputError(f"missing agent snapshot {path}")
        q = agents.TabularQ.load(path)
        return agents.build_front(
            q,
            grid,
            ctx,
            config.gamma,
            max_steps=config.max_steps,
            max_weights=config.eval_episodes,
        )

    return front_for_cell


def _print_summary(report: harness.EvalReport) -> None:
    agg = report.aggregates

    def fmt(x):
        return "   n/a" if x is None else f"{x:6.3f}"

    print(f"agent: {report.agent_kind}")
    print("metric   IQM     optimality-gap")
    print(f"NHGR   {fmt(agg['nhgr_iqm'])}  {fmt(agg['nhgr_optimality_gap'])}")
    print(f"EUGR   {fmt(agg['eugr_iqm'])}  {fmt(agg['eugr_optimality_gap'])}")
    if report.excluded_contexts:
        print(f"excluded contexts (degenerate reference): {report.excluded_contexts}")


def _write_report(report: harness.EvalReport, out_dir: Path) -> None:
    with open(out_dir / "report.json", "w") as fh:
        fh.write(report.to_json())
    report.write_csv(out_dir / "report.csv")
    cells_dir = out_dir / "cells"
    cells_dir.mkdir(exist_ok=True)
    for cell in report.cells:
        front = ParetoFront.from_json_obj(cell["front"])
        front.to_csv(cells_dir / f"seed{cell['seed']}_{cell['context']}.csv")


def cmd_eval(args) -> int:
    config, config_path = _load_config(args.config)
    out_dir = Path(args.out)
    if args.seed is not None:
        config.seeds = [args.seed]
    _write_manifest(out_dir, "eval", config_path, config.seeds[0])
    refs = harness.make_reference_fronts(config)
    if args.self_test:
        report = harness.evaluate_reference_self_test(config, refs)
    elif args.random_baseline:
        report = harness.evaluate_random_baseline(config, refs)
    else:
        if args.agents is None:
            raise InputError("--agents is required unless --self-test or --random-baseline")
        front_for_cell = _snapshot_fronts(config, Path(args.agents), args.kind)
        report = harness.evaluate_custom(config, refs, args.kind, front_for_cell)
    _write_report(report, out_dir)
    _print_summary(report)
    return EXIT_OK


def cmd_report(args) -> int:
    obj = _load_json(Path(args.report))
    try:
        report = harness.EvalReport.from_json_obj(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{args.report}: {exc}") from None

    contexts = sorted({c["context"] for c in report.cells})
    print(f"agent: {report.agent_kind}   (software {report.software_version})")
    header = f"{'context':<14}{'HV':>12}{'EUM':>12}{'NHGR':>8}{'EUGR':>8}  provenance"
    print(header)
    print("-" * len(header))
    for name in contexts:
        cells = [c for c in report.cells if c["context"] == name]

        def mean_of(key):
            vals = [c[key] for c in cells if c[key] is not None]
            return float(np.mean(vals)) if vals else None

        def fmt(x, width, digits=3):
            return ("n/a" if x is None else f"{x:.{digits}f}").rjust(width)

        print(
            f"{name:<14}"
            f"{fmt(mean_of('hypervolume'), 12)}"
            f"{fmt(mean_of('eum'), 12)}"
            f"{fmt(mean_of('nhgr'), 8)}"
            f"{fmt(mean_of('eugr'), 8)}"
            f"  {cells[0]['provenance']}"
        )
    agg = report.recompute_aggregates()
    print("-" * len(header))

    def fmt_agg(x):
        return "n/a" if x is None else f"{x:.3f}"

    print(
        f"aggregate NHGR: IQM={fmt_agg(agg['nhgr_iqm'])} "
        f"gap={fmt_agg(agg['nhgr_optimality_gap'])}   "
        f"EUGR: IQM={fmt_agg(agg['eugr_iqm'])} "
        f"gap={fmt_agg(agg['eugr_optimality_gap'])}"
    )
    if report.excluded_contexts:
        print(f"excluded contexts: {report.excluded_contexts}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morlgen",
        description="Multi-objective RL generalization evaluation pipeline.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", help="compute a reference Pareto front")
    p.add_argument("context", help="builtin context name or context JSON file")
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--horizon", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--cap", type=int, default=32, help="per-state set-size cap")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("train", help="train generalist and/or specialist agents")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="override config seeds")
    p.add_argument(
        "--mode",
        nargs="+",
        choices=["generalist", "specialists"],
        default=["generalist", "specialists"],
    )
    p.add_argument("--parallel", type=int, default=None, help="accepted; outputs are independent of it")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate agents and write a report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--agents", default=None, help="snapshot directory from 'train'")
    p.add_argument("--kind", choices=["generalist", "specialist"], default="generalist")
    p.add_argument("--self-test", action="store_true", help="score the reference fronts against themselves")
    p.add_argument("--random-baseline", action="store_true", help="score the uniform-random policy baseline")
    p.add_argument("--seed", type=int, default=None, help="override config seeds")
    p.add_argument("--parallel", type=int, default=None, help="accepted; outputs are independent of it")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="render a report as a plain-text table")
    p.add_argument("report", help="path to report.json")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
