"""Command-line surface: train one model, a model matrix, or a grid."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .data import MODEL_KINDS
from .grid import GridSpec, run_grid, run_matrix
from .models import ModelSpec
from .train import TrainConfig, TrainingDiverged, run_training


def _add_spec_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--embedding-dim", type=int, default=100)
    parser.add_argument("--hidden-dim", type=int, default=100)
    parser.add_argument("--activation", choices=("relu", "tanh"), default="relu")
    parser.add_argument("--dropout", type=float, default=0.0)
    parser.add_argument("--learning-rate", type=float, default=1e-3)
    parser.add_argument("--l2", type=float, default=0.0)


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epochs", type=int, default=4)
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--eval-every", type=int, default=3000)
    parser.add_argument("--max-examples", type=int, default=None)


def _spec_from_args(args: argparse.Namespace, kind: str) -> ModelSpec:
    return ModelSpec(
        kind=kind,
        embedding_dim=args.embedding_dim,
        hidden_dim=args.hidden_dim,
        activation=args.activation,
        dropout=args.dropout,
        learning_rate=args.learning_rate,
        l2=args.l2,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelharness",
        description="Train and evaluate NLI models on a quantnli corpus directory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one model, one seed")
    p_train.add_argument("--corpus", required=True)
    p_train.add_argument("--model", required=True, choices=MODEL_KINDS)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", default=None)
    _add_spec_flags(p_train)
    _add_budget_flags(p_train)

    p_matrix = sub.add_parser(
        "matrix", help="train several kinds across several seeds"
    )
    p_matrix.add_argument("--corpus", required=True)
    p_matrix.add_argument(
        "--models",
        default="all",
        help="comma-separated kinds, or 'all'",
    )
    p_matrix.add_argument("--seeds", default="0,1,2")
    p_matrix.add_argument("--out", default=None)
    p_matrix.add_argument(
        "--recipes",
        default=None,
        help=(
            "per-kind overrides as a JSON object "
            "({kind: {epochs, dropout, ...}}) or @path to a JSON file"
        ),
    )
    _add_budget_flags(p_matrix)

    p_grid = sub.add_parser("grid", help="hyperparameter grid at reduced budget")
    p_grid.add_argument("--corpus", required=True)
    p_grid.add_argument("--model", required=True, choices=MODEL_KINDS)
    p_grid.add_argument("--out", required=True, help="CSV path")
    p_grid.add_argument("--seed", type=int, default=0)
    p_grid.add_argument("--jobs", type=int, default=1)
    _add_budget_flags(p_grid)

    return parser


def cmd_train(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args, args.model)
    config = TrainConfig(
        spec=spec,
        epochs=args.epochs,
        batch_size=args.batch_size,
        eval_every=args.eval_every,
        seed=args.seed,
        max_examples=args.max_examples,
    )
    metrics = run_training(args.corpus, config, args.out)
    info = metrics["informative"]
    info_text = (
        "n/a" if info["accuracy"] is None else f"{info['accuracy']:.4f}"
    )
    print(
        f"{args.model} seed {args.seed}: "
        f"dev {metrics['accuracy']['dev']:.4f} "
        f"test {metrics['accuracy']['test']:.4f} "
        f"informative {info_text} ({info['count']} records)"
    )
    if args.out is None:
        print(json.dumps(metrics))
    return 0


def _load_recipes(raw: Optional[str]) -> Optional[dict]:
    if raw is None:
        return None
    if raw.startswith("@"):
        with open(raw[1:]) as fh:
            return json.load(fh)
    return json.loads(raw)


def cmd_matrix(args: argparse.Namespace) -> int:
    kinds = (
        list(MODEL_KINDS)
        if args.models == "all"
        else [k.strip() for k in args.models.split(",")]
    )
    for kind in kinds:
        if kind not in MODEL_KINDS:
            print(f"unknown model kind {kind!r}", file=sys.stderr)
            return 1
    seeds = [int(s) for s in args.seeds.split(",")]
    summary = run_matrix(
        args.corpus,
        kinds,
        seeds,
        out_dir=args.out,
        epochs=args.epochs,
        batch_size=args.batch_size,
        eval_every=args.eval_every,
        recipes=_load_recipes(args.recipes),
    )
    for kind in kinds:
        accs = [
            summary["runs"][kind][str(seed)]["accuracy"]["test"]
            for seed in seeds
        ]
        mean = sum(accs) / len(accs)
        print(
            f"{kind}: test "
            + " ".join(f"{a:.4f}" for a in accs)
            + f" (mean {mean:.4f})"
        )
    return 0


def cmd_grid(args: argparse.Namespace) -> int:
    rows = run_grid(
        args.corpus,
        args.model,
        args.out,
        epochs=args.epochs,
        batch_size=args.batch_size,
        eval_every=args.eval_every,
        seed=args.seed,
        max_examples=args.max_examples,
        jobs=args.jobs,
    )
    grid = GridSpec()
    print(f"wrote {len(rows)} rows to {args.out} (grid size {grid.size})")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            return cmd_train(args)
        if args.command == "matrix":
            return cmd_matrix(args)
        return cmd_grid(args)
    except TrainingDiverged as err:
        print(f"training diverged: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
