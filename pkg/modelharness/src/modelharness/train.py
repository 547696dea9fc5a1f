"""Training loop, evaluation, and metrics artifacts.

One training run = one model kind, one seed, one corpus directory.  The
run logs dev accuracy on a fixed examples-seen cadence, evaluates dev
and test (plus the informative subset of test) at the end, and can write
a metrics JSON and a learning-curve CSV with columns
examples_seen,dev_accuracy.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
import torch
from torch import nn

from .data import (
    EncodedDataset,
    SEQUENCE_KINDS,
    Vocabulary,
    encode_corpus,
    load_corpus,
)
from .models import ModelSpec, PairModel, build_model


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; carries the offending optimizer step."""

    def __init__(self, step: int, loss: float):
        super().__init__(f"non-finite loss {loss!r} at optimizer step {step}")
        self.step = step


@dataclass
class TrainConfig:
    spec: ModelSpec
    epochs: int = 4
    batch_size: int = 64
    eval_every: int = 3000
    seed: int = 0
    max_examples: Optional[int] = None

    def __post_init__(self) -> None:
        if self.epochs < 1 or self.batch_size < 1 or self.eval_every < 1:
            raise ValueError("epochs, batch_size, eval_every must be positive")
        if self.max_examples is not None and self.max_examples < 1:
            raise ValueError("max_examples must be positive when set")


@dataclass
class EvalReport:
    """Final accuracies plus the dev learning curve of one run."""

    accuracy: dict[str, float]
    informative_accuracy: Optional[float]
    informative_count: int
    curve: list[tuple[int, float]]

    def __post_init__(self) -> None:
        for split, acc in self.accuracy.items():
            if not 0.0 <= acc <= 1.0:
                raise ValueError(f"accuracy[{split}] out of range: {acc}")
        if self.informative_accuracy is not None:
            if not 0.0 <= self.informative_accuracy <= 1.0:
                raise ValueError("informative accuracy out of range")
        seen = [s for s, _ in self.curve]
        if any(b <= a for a, b in zip(seen, seen[1:])):
            raise ValueError("curve must be strictly increasing in examples seen")


def _batch(ds: EncodedDataset, idx: np.ndarray) -> dict[str, torch.Tensor]:
    out = {"labels": torch.from_numpy(ds.labels[idx])}
    if ds.kind in SEQUENCE_KINDS:
        plen = ds.premise_lengths[idx]
        hlen = ds.hypothesis_lengths[idx]
        out["premise"] = torch.from_numpy(ds.premise[idx][:, : plen.max()])
        out["hypothesis"] = torch.from_numpy(ds.hypothesis[idx][:, : hlen.max()])
        out["premise_lengths"] = torch.from_numpy(plen)
        out["hypothesis_lengths"] = torch.from_numpy(hlen)
    else:
        out["premise"] = torch.from_numpy(ds.premise[idx])
        out["hypothesis"] = torch.from_numpy(ds.hypothesis[idx])
    return out


def predict(
    model: PairModel, ds: EncodedDataset, batch_size: int = 512
) -> np.ndarray:
    """Predicted label indices for a whole split."""
    model.eval()
    preds = []
    with torch.no_grad():
        for start in range(0, len(ds), batch_size):
            idx = np.arange(start, min(start + batch_size, len(ds)))
            logits = model(_batch(ds, idx))
            preds.append(logits.argmax(dim=1).numpy())
    model.train()
    return np.concatenate(preds)


def evaluate(
    model: PairModel, ds: EncodedDataset, batch_size: int = 512
) -> float:
    return float((predict(model, ds, batch_size) == ds.labels).mean())


def evaluate_subset(
    model: PairModel,
    ds: EncodedDataset,
    mask: np.ndarray,
    batch_size: int = 512,
) -> tuple[Optional[float], int]:
    """Accuracy over the masked rows; (None, 0) when the subset is empty."""
    count = int(mask.sum())
    if count == 0:
        return None, 0
    preds = predict(model, ds, batch_size)
    return float((preds[mask] == ds.labels[mask]).mean()), count


def train_model(
    config: TrainConfig, encoded: dict[str, EncodedDataset]
) -> tuple[PairModel, EvalReport]:
    """Train one model on encoded train/dev/test splits."""
    train_ds = encoded["train"]
    dev_ds = encoded["dev"]
    test_ds = encoded["test"]

    torch.manual_seed(config.seed)
    vocab_size = int(
        max(
            train_ds.premise.max(),
            train_ds.hypothesis.max(),
            dev_ds.premise.max(),
            dev_ds.hypothesis.max(),
            test_ds.premise.max(),
            test_ds.hypothesis.max(),
        )
        + 1
    )
    model = build_model(config.spec, vocab_size)
    optimizer = torch.optim.Adam(
        model.parameters(),
        lr=config.spec.learning_rate,
        weight_decay=config.spec.l2,
    )
    loss_fn = nn.CrossEntropyLoss()
    shuffle_rng = np.random.default_rng(config.seed)

    n_train = len(train_ds)
    budget = config.epochs * n_train
    if config.max_examples is not None:
        budget = min(budget, config.max_examples)

    curve: list[tuple[int, float]] = []
    examples_seen = 0
    next_eval = config.eval_every
    step = 0
    model.train()
    done = False
    while not done:
        order = shuffle_rng.permutation(n_train)
        for start in range(0, n_train, config.batch_size):
            idx = order[start : start + config.batch_size]
            batch = _batch(train_ds, idx)
            optimizer.zero_grad()
            logits = model(batch)
            loss = loss_fn(logits, batch["labels"])
            if not torch.isfinite(loss):
                raise TrainingDiverged(step, float(loss.detach()))
            loss.backward()
            optimizer.step()
            step += 1
            examples_seen += len(idx)
            if examples_seen >= next_eval:
                curve.append((examples_seen, evaluate(model, dev_ds)))
                while next_eval <= examples_seen:
                    next_eval += config.eval_every
            if examples_seen >= budget:
                done = True
                break

    if not curve or curve[-1][0] != examples_seen:
        curve.append((examples_seen, evaluate(model, dev_ds)))

    dev_acc = curve[-1][1]
    test_acc = evaluate(model, test_ds)
    info_acc, info_count = evaluate_subset(
        model, test_ds, test_ds.informative
    )
    report = EvalReport(
        accuracy={"dev": dev_acc, "test": test_acc},
        informative_accuracy=info_acc,
        informative_count=info_count,
        curve=curve,
    )
    return model, report


def metrics_dict(
    config: TrainConfig,
    report: EvalReport,
    vocab: Vocabulary,
    wallclock: float,
) -> dict:
    return {
        "config": {
            **config.spec.as_dict(),
            "epochs": config.epochs,
            "batch_size": config.batch_size,
            "eval_every": config.eval_every,
            "seed": config.seed,
            "max_examples": config.max_examples,
        },
        "notes": (
            "hidden_dim sets the LSTM, tree, and head widths; it is the "
            "first knob to adjust if desk-scale phenomena fail to appear"
        ),
        "vocab_size": vocab.size,
        "accuracy": report.accuracy,
        "informative": {
            "accuracy": report.informative_accuracy,
            "count": report.informative_count,
        },
        "curve": [[seen, acc] for seen, acc in report.curve],
        "wallclock_seconds": wallclock,
    }


def write_curve_csv(path: Union[str, Path], curve: list[tuple[int, float]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["examples_seen", "dev_accuracy"])
        for seen, acc in curve:
            writer.writerow([seen, f"{acc:.6f}"])


def run_training(
    corpus_dir: Union[str, Path],
    config: TrainConfig,
    out_dir: Optional[Union[str, Path]] = None,
) -> dict:
    """Load, encode, train, and (optionally) write metrics artifacts."""
    started = time.perf_counter()
    corpus = load_corpus(corpus_dir)
    vocab = Vocabulary.build(list(corpus.values()))
    encoded = encode_corpus(corpus, config.spec.kind, vocab)
    _, report = train_model(config, encoded)
    metrics = metrics_dict(
        config, report, vocab, time.perf_counter() - started
    )
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "metrics.json", "w") as fh:
            json.dump(metrics, fh, indent=2)
            fh.write("\n")
        write_curve_csv(out_dir / "curve.csv", report.curve)
    return metrics
