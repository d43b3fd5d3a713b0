"""Batch entry points: generate, run-one, benchmark, serve."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import FormatError, OracleUnavailableError, ValidationError
from .pool import DataPool, SyntheticSpec, generate_synthetic, load_pool, split_pool, write_pool
from .session import SessionConfig, auc_of_run, run_with_simulated_oracle
from .strategies import STRATEGY_NAMES, lambda_name
from .membership import LambdaConfig

DATA_DIR_ENV = "DISPLAYLAB_DATA_DIR"


def _spec_from_file(path: str) -> SyntheticSpec:
    with open(path) as fh:
        return SyntheticSpec(**json.load(fh))


def _load_source(args) -> DataPool:
    if getattr(args, "dataset", None):
        return load_pool(args.dataset)
    if getattr(args, "synthetic", None):
        return generate_synthetic(_spec_from_file(args.synthetic))
    raise ValidationError("provide --dataset FILE or --synthetic SPEC.json")


def _parse_seeds(text: str) -> list[int]:
    try:
        text = text.strip()
        if ".." in text:
            lo, hi = text.split("..", 1)
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}; use 1..10 or 1,2,3")
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _parse_strategies(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [n for n in names if n not in STRATEGY_NAMES]
    if unknown or not names:
        raise argparse.ArgumentTypeError(
            f"unknown strategies {unknown}; choose from {', '.join(STRATEGY_NAMES)}"
        )
    return names


def _run_csv_rows(state) -> list[list]:
    rows = []
    for rec in state.history:
        action = lambda_name(LambdaConfig(*rec.action)) if rec.action else ""
        rows.append(
            [
                rec.iteration,
                repr(rec.sampling_percent),
                rec.strategy,
                action,
                "" if rec.reward is None else repr(rec.reward),
                "" if rec.eer_percent is None else repr(rec.eer_percent),
            ]
        )
    return rows


def _write_run_csv(state, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "samp_percent", "strategy", "action", "reward", "eer"])
        writer.writerows(_run_csv_rows(state))


def _session_config(args, strategy: str, seed: int) -> SessionConfig:
    return SessionConfig(
        strategy=strategy,
        display_size=args.display_size,
        iterations=args.iterations,
        n_clusters=args.clusters,
        seed=seed,
        evaluation_enabled=True,
    )


def cmd_generate(args) -> int:
    if args.spec:
        spec = _spec_from_file(args.spec)
    else:
        spec = SyntheticSpec(
            n_samples=args.n_samples,
            positive_fraction=args.positive_fraction,
            n_modes_per_class=args.modes,
            feature_dim=args.feature_dim,
            mode_spread=args.mode_spread,
            within_mode_noise=args.noise,
            seed=args.seed,
        )
    pool = generate_synthetic(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_pool(pool, out)
    print(f"wrote {len(pool)} samples to {out}")
    return 0


def cmd_run_one(args) -> int:
    pool = _load_source(args)
    pool = split_pool(pool, args.train_fraction, seed=args.seed)
    config = _session_config(args, args.strategy, args.seed)
    state = run_with_simulated_oracle(pool, config)
    out = Path(args.out)
    _write_run_csv(state, out)
    print(
        f"strategy={args.strategy} seed={args.seed} "
        f"auc={auc_of_run(state.history):.4f} -> {out}"
    )
    return 0


def cmd_benchmark(args) -> int:
    base_pool = _load_source(args)
    strategies = args.strategies
    seeds = args.seeds
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    curves: dict[str, list[list[float]]] = {name: [] for name in strategies}
    aucs: dict[str, list[float]] = {name: [] for name in strategies}
    for name in strategies:
        for seed in seeds:
            pool = split_pool(base_pool, args.train_fraction, seed=seed)
            config = _session_config(args, name, seed)
            state = run_with_simulated_oracle(pool, config)
            _write_run_csv(state, out_dir / name / f"{seed}.csv")
            curves[name].append([rec.eer_percent for rec in state.history])
            aucs[name].append(auc_of_run(state.history))
            print(f"{name} seed={seed} auc={aucs[name][-1]:.4f}")

    summary = out_dir / "summary.csv"
    with open(summary, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["strategy"]
            + [f"iter_{t}" for t in range(1, args.iterations + 1)]
            + ["auc"]
        )
        for name in strategies:
            mean_curve = np.mean(np.asarray(curves[name]), axis=0)
            writer.writerow(
                [name]
                + [repr(float(v)) for v in mean_curve]
                + [repr(float(np.mean(aucs[name])))]
            )
    print(f"summary -> {summary}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir or os.environ.get(DATA_DIR_ENV))
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"server failed to start: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="displaylab",
        description="Interactive active-learning display selection toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset file")
    gen.add_argument("--spec", help="json file with generator settings")
    gen.add_argument("--n-samples", type=int, default=2000)
    gen.add_argument("--positive-fraction", type=float, default=0.02)
    gen.add_argument("--modes", type=int, default=3)
    gen.add_argument("--feature-dim", type=int, default=8)
    gen.add_argument("--mode-spread", type=float, default=6.0)
    gen.add_argument("--noise", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output dataset (.csv or .jsonl)")
    gen.set_defaults(func=cmd_generate)

    def add_run_args(p, with_strategy: bool):
        p.add_argument("--dataset", help="dataset file (.csv or .jsonl)")
        p.add_argument("--synthetic", help="json file with generator settings")
        if with_strategy:
            p.add_argument("--strategy", required=True, choices=STRATEGY_NAMES)
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--display-size", type=int, default=8)
        p.add_argument("--iterations", type=int, default=10)
        p.add_argument("--clusters", type=int, default=None)
        p.add_argument("--train-fraction", type=float, default=0.5)

    one = sub.add_parser("run-one", help="run one simulated-oracle session")
    add_run_args(one, with_strategy=True)
    one.add_argument("--out", required=True, help="per-run csv path")
    one.set_defaults(func=cmd_run_one)

    bench = sub.add_parser("benchmark", help="run a strategy x seed ablation grid")
    add_run_args(bench, with_strategy=False)
    bench.add_argument(
        "--strategies",
        type=_parse_strategies,
        default=["rep", "div", "amb", "flat", "rl"],
        help="comma-separated strategy names",
    )
    bench.add_argument(
        "--seeds", type=_parse_seeds, default=list(range(1, 11)), help="e.g. 1..10 or 3,5,8"
    )
    bench.add_argument("--out", required=True, help="output directory")
    bench.set_defaults(func=cmd_benchmark)

    srv = sub.add_parser("serve", help="start the labeling service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--data-dir", default=None)
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FormatError, OracleUnavailableError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
