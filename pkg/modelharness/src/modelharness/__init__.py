"""Toy-scale trainer and evaluator for NLI models over the quantnli corpus format."""

from .data import (
    Example,
    EncodedDataset,
    SchemaError,
    Vocabulary,
    encode_corpus,
    encode_dataset,
    load_corpus,
    load_examples,
)
from .models import ModelSpec, build_model
from .train import (
    EvalReport,
    TrainConfig,
    TrainingDiverged,
    evaluate,
    run_training,
    train_model,
)
from .grid import GridSpec, run_grid, run_matrix

__all__ = [
    "Example",
    "EncodedDataset",
    "SchemaError",
    "Vocabulary",
    "encode_corpus",
    "encode_dataset",
    "load_corpus",
    "load_examples",
    "ModelSpec",
    "build_model",
    "EvalReport",
    "TrainConfig",
    "TrainingDiverged",
    "evaluate",
    "run_training",
    "train_model",
    "GridSpec",
    "run_grid",
    "run_matrix",
]
