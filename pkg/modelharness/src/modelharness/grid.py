"""Hyperparameter grid search and the multi-model training matrix."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Optional, Sequence, Union

from .models import ModelSpec
from .train import TrainConfig, run_training

GRID_FIELDS = (
    "kind",
    "embedding_dim",
    "hidden_dim",
    "activation",
    "dropout",
    "learning_rate",
    "l2",
    "seed",
)


@dataclass
class GridSpec:
    """Default grid mirrors the published search space."""

    dropouts: tuple[float, ...] = (0.0, 0.1, 0.2)
    learning_rates: tuple[float, ...] = (1e-2, 3e-4, 1e-3)
    l2s: tuple[float, ...] = (0.0, 1e-4, 1e-3)
    activations: tuple[str, ...] = ("relu", "tanh")

    @property
    def size(self) -> int:
        return (
            len(self.dropouts)
            * len(self.learning_rates)
            * len(self.l2s)
            * len(self.activations)
        )

    def configs(self, kind: str, base: ModelSpec) -> list[ModelSpec]:
        specs = []
        for dropout, lr, l2, act in product(
            self.dropouts, self.learning_rates, self.l2s, self.activations
        ):
            specs.append(
                ModelSpec(
                    kind=kind,
                    embedding_dim=base.embedding_dim,
                    hidden_dim=base.hidden_dim,
                    activation=act,
                    dropout=dropout,
                    learning_rate=lr,
                    l2=l2,
                )
            )
        return specs


def _grid_worker(args: tuple) -> dict:
    corpus_dir, spec_fields, epochs, batch_size, eval_every, seed, max_examples = args
    spec = ModelSpec(**spec_fields)
    config = TrainConfig(
        spec=spec,
        epochs=epochs,
        batch_size=batch_size,
        eval_every=eval_every,
        seed=seed,
        max_examples=max_examples,
    )
    metrics = run_training(corpus_dir, config)
    row = {name: spec_fields[name] for name in GRID_FIELDS if name != "seed"}
    row["seed"] = seed
    row["final_dev_accuracy"] = metrics["accuracy"]["dev"]
    return row


def run_grid(
    corpus_dir: Union[str, Path],
    kind: str,
    out_csv: Union[str, Path],
    grid: Optional[GridSpec] = None,
    base: Optional[ModelSpec] = None,
    epochs: int = 1,
    batch_size: int = 64,
    eval_every: int = 3000,
    seed: int = 0,
    max_examples: Optional[int] = None,
    jobs: int = 1,
) -> list[dict]:
    """Train every grid config at reduced budget; one CSV row per config.

    Configs run as independent processes when jobs > 1.
    """
    grid = grid or GridSpec()
    base = base or ModelSpec(kind=kind)
    specs = grid.configs(kind, base)
    work = [
        (
            str(corpus_dir),
            spec.as_dict(),
            epochs,
            batch_size,
            eval_every,
            seed,
            max_examples,
        )
        for spec in specs
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_grid_worker, work))
    else:
        rows = [_grid_worker(item) for item in work]

    fieldnames = list(GRID_FIELDS) + ["final_dev_accuracy"]
    with open(out_csv, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return rows


BUDGET_KEYS = ("epochs", "batch_size", "eval_every", "max_examples")


def run_matrix(
    corpus_dir: Union[str, Path],
    kinds: Sequence[str],
    seeds: Sequence[int],
    out_dir: Optional[Union[str, Path]] = None,
    epochs: int = 4,
    batch_size: int = 64,
    eval_every: int = 3000,
    spec_overrides: Optional[dict] = None,
    recipes: Optional[dict] = None,
) -> dict:
    """Train each model kind at each seed; return a nested summary.

    summary["runs"][kind][str(seed)] holds the metrics dict of that run.
    When out_dir is given, each run writes metrics.json and curve.csv
    under out_dir/<kind>_seed<seed>/ and the summary goes to
    out_dir/summary.json.

    recipes maps a kind to per-kind overrides; budget keys (epochs,
    batch_size, eval_every, max_examples) override the shared budget,
    all other keys override ModelSpec fields.  Models need very
    different budgets here: the aligned tree model trains an order of
    magnitude longer than the sequence models before its late jump.
    """
    started = time.perf_counter()
    recipes = recipes or {}
    unknown = set(recipes) - set(kinds)
    if unknown:
        raise ValueError(f"recipes for kinds not in this matrix: {sorted(unknown)}")
    runs: dict[str, dict[str, dict]] = {}
    for kind in kinds:
        runs[kind] = {}
        recipe = dict(recipes.get(kind, {}))
        budget = {
            "epochs": epochs,
            "batch_size": batch_size,
            "eval_every": eval_every,
            "max_examples": None,
        }
        for key in BUDGET_KEYS:
            if key in recipe:
                budget[key] = recipe.pop(key)
        spec_fields = dict(spec_overrides or {})
        spec_fields.update(recipe)
        for seed in seeds:
            spec = ModelSpec(kind=kind, **spec_fields)
            config = TrainConfig(
                spec=spec,
                seed=seed,
                **budget,
            )
            run_out = (
                Path(out_dir) / f"{kind}_seed{seed}"
                if out_dir is not None
                else None
            )
            runs[kind][str(seed)] = run_training(corpus_dir, config, run_out)

    summary = {
        "corpus_dir": str(corpus_dir),
        "kinds": list(kinds),
        "seeds": list(seeds),
        "wallclock_seconds": time.perf_counter() - started,
        "runs": runs,
    }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    return summary
